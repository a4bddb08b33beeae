#include "lexdiv/diversity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace lexdiv {

namespace {

// Counts differing cases between two rows, stopping early at `cap`.
std::size_t capped_distance(std::span<const double> a, std::span<const double> b, bool discrete, double delta,
                            std::size_t cap) {
    std::size_t d = 0;
    if (discrete) {
        for (std::size_t c = 0; c < a.size() && d < cap; ++c) d += a[c] != b[c];
    } else {
        for (std::size_t c = 0; c < a.size() && d < cap; ++c) d += std::fabs(a[c] - b[c]) > delta;
    }
    return d;
}

void require_epsilon_range(Epsilon epsilon) {
    if (!(epsilon > Epsilon{}) || epsilon > Epsilon::from_ratio(1, 1))
        throw InputError("epsilon must lie in (0, 1], got " + epsilon.to_string());
}

}  // namespace

void validate_delta(const ErrorMatrix& matrix, double delta) {
    if (matrix.kind() == LossKind::discrete) {
        if (delta != 0.0) throw InputError("delta must be 0 for discrete losses");
    } else if (!(delta >= 0.0) || !std::isfinite(delta)) {
        throw InputError("delta must be finite and >= 0");
    }
}

std::size_t phenotypic_distance(const ErrorMatrix& matrix, std::size_t i, std::size_t j, double delta) {
    validate_delta(matrix, delta);
    if (i >= matrix.n_individuals() || j >= matrix.n_individuals()) throw InputError("row index out of range");
    return capped_distance(matrix.row(i), matrix.row(j), matrix.kind() == LossKind::discrete, delta,
                           std::numeric_limits<std::size_t>::max());
}

SimilarityGraph::SimilarityGraph(std::size_t n_vertices, Epsilon epsilon, double delta)
    : n_(n_vertices), words_((n_vertices + 63) / 64), epsilon_(epsilon), delta_(delta), bits_(n_ * words_, 0) {}

void SimilarityGraph::add_edge(std::size_t a, std::size_t b) {
    if (a == b) return;
    bits_[a * words_ + b / 64] |= std::uint64_t{1} << (b % 64);
    bits_[b * words_ + a / 64] |= std::uint64_t{1} << (a % 64);
}

std::size_t SimilarityGraph::degree(std::size_t v) const {
    std::size_t d = 0;
    for (auto w : neighbours(v)) d += static_cast<std::size_t>(std::popcount(w));
    return d;
}

std::size_t SimilarityGraph::edge_count() const {
    std::size_t total = 0;
    for (std::size_t v = 0; v < n_; ++v) total += degree(v);
    return total / 2;
}

DistanceTable::DistanceTable(const DedupProfile& profile, double delta, std::size_t cap)
    : n_(profile.n_unique()), n_cases_(profile.n_cases()), cap_(cap), delta_(delta) {
    const ErrorMatrix& m = profile.unique;
    validate_delta(m, delta);
    if (cap > std::numeric_limits<std::uint32_t>::max()) cap_ = std::numeric_limits<std::uint32_t>::max();
    const bool discrete = m.kind() == LossKind::discrete;
    upper_.assign(n_ * (n_ - 1) / 2, 0);

    const auto n = static_cast<std::ptrdiff_t>(n_);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t a = 0; a < n; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const std::size_t base = ua * (2 * n_ - ua - 1) / 2;
        for (std::size_t b = ua + 1; b < n_; ++b)
            upper_[base + (b - ua - 1)] = static_cast<std::uint32_t>(capped_distance(m.row(ua), m.row(b), discrete, delta_, cap_));
    }
}

std::size_t DistanceTable::capped(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    return upper_[a * (2 * n_ - a - 1) / 2 + (b - a - 1)];
}

SimilarityGraph DistanceTable::graph(Epsilon epsilon) const {
    require_epsilon_range(epsilon);
    const std::size_t threshold = epsilon.far_threshold(n_cases_);
    if (threshold > cap_)
        throw InputError("distance table capped at " + std::to_string(cap_) + " cannot resolve epsilon " +
                         epsilon.to_string());
    SimilarityGraph g(n_, epsilon, delta_);
    for (std::size_t a = 0; a < n_; ++a)
        for (std::size_t b = a + 1; b < n_; ++b)
            if (capped(a, b) < threshold) g.add_edge(a, b);
    return g;
}

SimilarityGraph build_similarity_graph(const DedupProfile& profile, Epsilon epsilon, double delta) {
    require_epsilon_range(epsilon);
    const ErrorMatrix& m = profile.unique;
    validate_delta(m, delta);
    const std::size_t n = profile.n_unique();
    const std::size_t threshold = epsilon.far_threshold(m.n_cases());
    const bool discrete = m.kind() == LossKind::discrete;

    // Each row collects its higher-indexed neighbours; the symmetric fill is serial.
    std::vector<std::vector<std::size_t>> forward(n);
    const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t a = 0; a < sn; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        for (std::size_t b = ua + 1; b < n; ++b)
            if (capped_distance(m.row(ua), m.row(b), discrete, delta, threshold) < threshold)
                forward[ua].push_back(b);
    }

    SimilarityGraph g(n, epsilon, delta);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b : forward[a]) g.add_edge(a, b);
    return g;
}

SimilarityResult epsilon_cluster_similarity(const DedupProfile& profile, Epsilon epsilon, double delta,
                                            std::uint64_t node_budget) {
    return clique_number(build_similarity_graph(profile, epsilon, delta), node_budget);
}

std::size_t similarity_bruteforce(const DedupProfile& profile, Epsilon epsilon, double delta) {
    require_epsilon_range(epsilon);
    const std::size_t n = profile.n_unique();
    if (n > 20) throw InputError("similarity_bruteforce is limited to 20 unique rows");
    const std::size_t n_cases = profile.n_cases();

    std::vector<std::vector<bool>> far_pair(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            far_pair[a][b] = far_pair[b][a] = epsilon.far(phenotypic_distance(profile.unique, a, b, delta), n_cases);

    // For each k, every k-subset must contain a far pair.
    for (std::size_t k = 2; k <= n; ++k) {
        std::vector<std::size_t> subset(k);
        for (std::size_t i = 0; i < k; ++i) subset[i] = i;
        bool every_subset_has_far_pair = true;
        while (true) {
            bool has_far = false;
            for (std::size_t x = 0; x < k && !has_far; ++x)
                for (std::size_t y = x + 1; y < k && !has_far; ++y) has_far = far_pair[subset[x]][subset[y]];
            if (!has_far) {
                every_subset_has_far_pair = false;
                break;
            }
            // next combination in lexicographic order
            std::size_t pos = k;
            while (pos > 0 && subset[pos - 1] == n - k + pos - 1) --pos;
            if (pos == 0) break;
            ++subset[pos - 1];
            for (std::size_t i = pos; i < k; ++i) subset[i] = subset[i - 1] + 1;
        }
        if (every_subset_has_far_pair) return k;
    }
    return n + 1;
}

double covariance_mean(const ErrorMatrix& matrix) {
    const std::size_t n = matrix.n_individuals();
    const std::size_t c = matrix.n_cases();
    if (c < 2) throw InputError("covariance needs at least two cases");

    // sum_{i,j} cov(i,j) = 1/(C-1) * sum_c (sum_i centred(i,c))^2, so the N x N
    // matrix never has to be materialised.
    std::vector<double> column_sum(c, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = matrix.row(i);
        double mean = 0.0;
        for (double v : row) mean += v;
        mean /= static_cast<double>(c);
        for (std::size_t j = 0; j < c; ++j) column_sum[j] += row[j] - mean;
    }
    double total = 0.0;
    for (double s : column_sum) total += s * s;
    return total / static_cast<double>(c - 1) / (static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace lexdiv
