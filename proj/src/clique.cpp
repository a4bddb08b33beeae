// Maximum clique by branch and bound.
//
// Vertices are ordered by degeneracy (smallest-last). Every clique has a
// unique earliest vertex v in that order and lies inside {v} + F(v), where
// F(v) are the later neighbours of v, so the top level is one subproblem per
// vertex with |F(v)| <= degeneracy. Top-level subproblems are visited in
// descending order of their colouring bound.
//
// Inside a subproblem (R, P) the candidates P are greedily coloured; the
// number of colours bounds the clique size in P. Branching uses whichever of
// two valid branch sets is smaller:
//   * colour branching: the vertices whose colour can still beat the
//     incumbent, processed from the highest colour down;
//   * Bron-Kerbosch pivoting: P minus the neighbours of a pivot u chosen to
//     maximise |P ∩ N(u)|. Every maximal clique of P meets this set.
// Either way each branched vertex is removed from P before the next one, so a
// clique is explored from its first branched member only.
//
// When the expanded-node budget runs out the search stops and reports
// [incumbent, max(incumbent, bound of every unfinished top-level subproblem)].

#include <algorithm>
#include <bit>
#include <numeric>

#include "lexdiv/diversity.hpp"

namespace lexdiv {

namespace {

using Bits = std::vector<std::uint64_t>;

void set(Bits& s, std::size_t v) { s[v / 64] |= std::uint64_t{1} << (v % 64); }
void reset(Bits& s, std::size_t v) { s[v / 64] &= ~(std::uint64_t{1} << (v % 64)); }

std::size_t count(const Bits& s) {
    std::size_t total = 0;
    for (auto w : s) total += static_cast<std::size_t>(std::popcount(w));
    return total;
}

template <typename F>
void for_each_bit(const Bits& s, F&& f) {
    for (std::size_t w = 0; w < s.size(); ++w) {
        std::uint64_t word = s[w];
        while (word) {
            const auto bit = static_cast<std::size_t>(std::countr_zero(word));
            f(w * 64 + bit);
            word &= word - 1;
        }
    }
}

// Smallest-last ordering; returns vertices in removal order.
std::vector<std::size_t> degeneracy_order(const SimilarityGraph& g) {
    const std::size_t n = g.n_vertices();
    std::vector<std::size_t> degree(n);
    std::size_t max_degree = 0;
    for (std::size_t v = 0; v < n; ++v) max_degree = std::max(max_degree, degree[v] = g.degree(v));

    std::vector<std::vector<std::size_t>> buckets(max_degree + 1);
    for (std::size_t v = 0; v < n; ++v) buckets[degree[v]].push_back(v);
    std::vector<bool> removed(n, false);
    std::vector<std::size_t> order;
    order.reserve(n);
    std::size_t lowest = 0;
    while (order.size() < n) {
        lowest = std::min(lowest, max_degree);
        while (buckets[lowest].empty()) ++lowest;
        const std::size_t v = buckets[lowest].back();
        buckets[lowest].pop_back();
        if (removed[v] || degree[v] != lowest) continue;  // stale entry
        removed[v] = true;
        order.push_back(v);
        for_each_bit(Bits(g.neighbours(v).begin(), g.neighbours(v).end()), [&](std::size_t u) {
            if (!removed[u]) {
                --degree[u];
                buckets[degree[u]].push_back(u);
                if (degree[u] < lowest) lowest = degree[u];
            }
        });
    }
    return order;
}

class CliqueSearch {
public:
    CliqueSearch(const SimilarityGraph& g, std::uint64_t budget)
        : g_(g), words_(g.words_per_row()), budget_(budget) {}

    std::uint64_t nodes() const { return nodes_; }
    bool aborted() const { return aborted_; }
    std::size_t best_size() const { return best_.size(); }
    const std::vector<std::size_t>& best() const { return best_; }

    void seed_incumbent(std::vector<std::size_t> clique) {
        if (clique.size() > best_.size()) best_ = std::move(clique);
    }

    // Greedy sequential colouring of `p`. Fills `order` with the vertices sorted
    // by colour and `colour` with the colour (1-based) of each entry.
    void colour(const Bits& p, std::vector<std::size_t>& order, std::vector<std::size_t>& colour) const {
        order.clear();
        colour.clear();
        Bits uncoloured = p;
        std::size_t k = 0;
        Bits q(words_);
        while (std::any_of(uncoloured.begin(), uncoloured.end(), [](auto w) { return w != 0; })) {
            ++k;
            q = uncoloured;
            for (std::size_t w = 0; w < words_; ++w) {
                while (q[w]) {
                    const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(q[w]));
                    reset(q, v);
                    reset(uncoloured, v);
                    order.push_back(v);
                    colour.push_back(k);
                    auto nb = g_.neighbours(v);
                    for (std::size_t x = w; x < words_; ++x) q[x] &= ~nb[x];
                }
            }
        }
    }

    std::size_t colour_bound(const Bits& p) const {
        std::vector<std::size_t> order;
        std::vector<std::size_t> colours;
        colour(p, order, colours);
        return colours.empty() ? 0 : colours.back();
    }

    // Returns false if the budget ran out.
    bool expand(Bits p) {
        if (aborted_) return false;
        if (++nodes_ > budget_) {
            aborted_ = true;
            return false;
        }
        const std::size_t size_p = count(p);
        if (size_p == 0) {
            if (current_.size() > best_.size()) best_ = current_;
            return true;
        }

        std::vector<std::size_t> order;
        std::vector<std::size_t> colours;
        colour(p, order, colours);
        if (current_.size() + colours.back() <= best_.size()) return true;

        // Colour branch set: suffix of `order` whose colours can improve the incumbent.
        const std::size_t need = best_.size() >= current_.size() ? best_.size() - current_.size() : 0;
        const auto first_useful = static_cast<std::size_t>(
            std::upper_bound(colours.begin(), colours.end(), need) - colours.begin());
        const std::size_t colour_set_size = order.size() - first_useful;

        // Pivot branch set: P \ N(u) for u maximising |P ∩ N(u)|.
        std::size_t pivot = order.front();
        std::size_t pivot_cover = 0;
        for (std::size_t v : order) {
            auto nb = g_.neighbours(v);
            std::size_t cover = 0;
            for (std::size_t w = 0; w < words_; ++w) cover += static_cast<std::size_t>(std::popcount(p[w] & nb[w]));
            if (cover > pivot_cover) pivot_cover = cover, pivot = v;
        }
        const std::size_t pivot_set_size = size_p - pivot_cover;

        std::vector<std::size_t> branch;
        bool by_colour = colour_set_size <= pivot_set_size;
        if (by_colour) {
            for (std::size_t idx = order.size(); idx-- > first_useful;) branch.push_back(idx);
        } else {
            auto nb = g_.neighbours(pivot);
            for (std::size_t idx = order.size(); idx-- > 0;)
                if (!((nb[order[idx] / 64] >> (order[idx] % 64)) & 1U)) branch.push_back(idx);
        }

        Bits child(words_);
        for (std::size_t idx : branch) {
            const std::size_t v = order[idx];
            if (by_colour && current_.size() + colours[idx] <= best_.size()) break;
            auto nb = g_.neighbours(v);
            for (std::size_t w = 0; w < words_; ++w) child[w] = p[w] & nb[w];
            current_.push_back(v);
            const bool ok = expand(child);
            current_.pop_back();
            if (!ok) return false;
            reset(p, v);
        }
        return true;
    }

    bool run_root(std::size_t v, const Bits& forward) {
        current_.assign(1, v);
        const bool ok = expand(forward);
        current_.clear();
        return ok;
    }

private:
    const SimilarityGraph& g_;
    std::size_t words_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    bool aborted_ = false;
    std::vector<std::size_t> current_;
    std::vector<std::size_t> best_;
};

// Greedy clique from v inside its forward set: repeatedly add the candidate
// with most candidate neighbours. Cheap incumbent before the exact search.
std::vector<std::size_t> greedy_clique(const SimilarityGraph& g, std::size_t v, Bits p) {
    std::vector<std::size_t> clique{v};
    const std::size_t words = g.words_per_row();
    while (count(p) > 0) {
        std::size_t best_v = 0;
        std::size_t best_cover = 0;
        bool first = true;
        for_each_bit(p, [&](std::size_t u) {
            auto nb = g.neighbours(u);
            std::size_t cover = 0;
            for (std::size_t w = 0; w < words; ++w) cover += static_cast<std::size_t>(std::popcount(p[w] & nb[w]));
            if (first || cover > best_cover) best_v = u, best_cover = cover, first = false;
        });
        clique.push_back(best_v);
        auto nb = g.neighbours(best_v);
        for (std::size_t w = 0; w < words; ++w) p[w] &= nb[w];
    }
    return clique;
}

}  // namespace

SimilarityResult clique_number(const SimilarityGraph& graph, std::uint64_t node_budget) {
    if (node_budget == 0) throw InputError("clique search needs a node budget >= 1");
    const std::size_t n = graph.n_vertices();
    SimilarityResult result;
    result.epsilon = graph.epsilon();
    result.delta = graph.delta();
    if (n == 0) throw InputError("similarity graph has no vertices");

    const auto order = degeneracy_order(graph);
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;

    const std::size_t words = graph.words_per_row();
    std::vector<Bits> forward(n, Bits(words, 0));
    for (std::size_t v = 0; v < n; ++v) {
        Bits nb(graph.neighbours(v).begin(), graph.neighbours(v).end());
        for_each_bit(nb, [&](std::size_t u) {
            if (position[u] > position[v]) set(forward[v], u);
        });
    }

    CliqueSearch search(graph, node_budget);
    std::vector<std::size_t> root_bound(n);
    for (std::size_t v = 0; v < n; ++v) root_bound[v] = 1 + search.colour_bound(forward[v]);

    std::vector<std::size_t> roots(n);
    std::iota(roots.begin(), roots.end(), std::size_t{0});
    std::stable_sort(roots.begin(), roots.end(), [&](std::size_t a, std::size_t b) {
        return root_bound[a] != root_bound[b] ? root_bound[a] > root_bound[b] : position[a] < position[b];
    });

    search.seed_incumbent(greedy_clique(graph, roots.front(), forward[roots.front()]));

    std::size_t unfinished_bound = 0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const std::size_t v = roots[i];
        if (root_bound[v] <= search.best_size()) break;  // sorted: no later root can improve
        if (!search.run_root(v, forward[v])) {
            for (std::size_t j = i; j < roots.size(); ++j) unfinished_bound = std::max(unfinished_bound, root_bound[roots[j]]);
            break;
        }
    }

    result.search_nodes = search.nodes();
    result.budget_exhausted = search.aborted();
    result.alpha_lower = search.best_size();
    result.alpha_upper = std::max(result.alpha_lower, unfinished_bound);
    result.exact = result.alpha_lower == result.alpha_upper;
    result.k_lower = result.alpha_lower + 1;
    result.k_upper = result.alpha_upper + 1;
    result.witness = search.best();
    std::sort(result.witness.begin(), result.witness.end());
    return result;
}

}  // namespace lexdiv
