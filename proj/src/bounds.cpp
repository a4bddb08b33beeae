#include "lexdiv/bounds.hpp"

#include <algorithm>

#include "lexdiv/csv_io.hpp"

namespace lexdiv {

namespace {

double pool_term(std::size_t n_unique, Epsilon epsilon) {
    return 4.0 * static_cast<double>(n_unique) * static_cast<double>(epsilon.denominator()) /
           static_cast<double>(epsilon.numerator());
}

double cases_term(std::size_t n_cases, std::size_t k) {
    return 2.0 * static_cast<double>(k) * static_cast<double>(n_cases);
}

}  // namespace

double theorem_bound(std::size_t n_unique, std::size_t n_cases, Epsilon epsilon, std::size_t k) {
    if (!(epsilon > Epsilon{}) || epsilon > Epsilon::from_ratio(1, 1))
        throw InputError("theorem bound needs epsilon in (0, 1], got " + epsilon.to_string());
    if (k < 2) throw InputError("theorem bound needs k >= 2");
    return pool_term(n_unique, epsilon) + cases_term(n_cases, k);
}

BoundReport make_bound_report(const DedupProfile& profile, const SimilarityResult& similarity) {
    BoundReport r;
    r.epsilon = similarity.epsilon;
    r.delta = similarity.delta;
    r.k = similarity.k_upper;
    r.exact_k = similarity.exact;
    r.n_unique = profile.n_unique();
    r.n_original = profile.n_original();
    r.n_cases = profile.n_cases();
    r.total = theorem_bound(r.n_unique, r.n_cases, r.epsilon, r.k);
    r.term_pool = pool_term(r.n_unique, r.epsilon);
    r.term_cases = cases_term(r.n_cases, r.k);
    r.worst_case = static_cast<double>(r.n_unique) * static_cast<double>(r.n_cases);
    r.ratio = r.total / r.worst_case;
    return r;
}

std::vector<BoundReport> sweep(const DedupProfile& profile, std::span<const Epsilon> epsilons, double delta,
                               std::uint64_t node_budget) {
    if (epsilons.empty()) throw InputError("epsilon grid is empty");
    std::size_t cap = 0;
    for (const Epsilon& e : epsilons) {
        if (!(e > Epsilon{}) || e > Epsilon::from_ratio(1, 1))
            throw InputError("epsilon must lie in (0, 1], got " + e.to_string());
        cap = std::max(cap, e.far_threshold(profile.n_cases()));
    }
    const DistanceTable distances(profile, delta, cap);

    std::vector<BoundReport> reports;
    reports.reserve(epsilons.size());
    for (const Epsilon& e : epsilons)
        reports.push_back(make_bound_report(profile, clique_number(distances.graph(e), node_budget)));
    return reports;
}

BoundReport best_epsilon(std::span<const BoundReport> reports) {
    if (reports.empty()) throw InputError("best_epsilon needs at least one report");
    const BoundReport* best = &reports.front();
    for (const auto& r : reports)
        if (r.total < best->total || (r.total == best->total && r.epsilon < best->epsilon)) best = &r;
    return *best;
}

std::string reports_to_csv(std::span<const BoundReport> reports) {
    std::string out = "epsilon,delta,k,exact_k,term_pool,term_cases,total,worst_case,ratio\n";
    for (const auto& r : reports) {
        out += r.epsilon.to_string() + ',' + format_double(r.delta) + ',' + std::to_string(r.k) + ',' +
               (r.exact_k ? "true" : "false") + ',' + format_double(r.term_pool) + ',' + format_double(r.term_cases) +
               ',' + format_double(r.total) + ',' + format_double(r.worst_case) + ',' + format_double(r.ratio) + '\n';
    }
    return out;
}

nlohmann::json to_json(const BoundReport& r) {
    // epsilon is emitted as a number; the decimal string is kept for exactness.
    return nlohmann::json{{"epsilon", r.epsilon.value()},   {"epsilon_exact", r.epsilon.to_string()},
                          {"delta", r.delta},               {"k", r.k},
                          {"exact_k", r.exact_k},           {"term_pool", r.term_pool},
                          {"term_cases", r.term_cases},     {"total", r.total},
                          {"worst_case", r.worst_case},     {"ratio", r.ratio},
                          {"n_unique", r.n_unique},         {"n_original", r.n_original},
                          {"n_cases", r.n_cases}};
}

nlohmann::json reports_to_json(std::span<const BoundReport> reports) {
    auto arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return arr;
}

}  // namespace lexdiv
