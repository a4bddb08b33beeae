#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lexdiv/core.hpp"
#include "lexdiv/diversity.hpp"
#include "lexdiv/epsilon.hpp"

namespace lexdiv {

/// Runtime bound 4N/eps + 2kC for one epsilon, next to the N*C worst case.
struct BoundReport {
    Epsilon epsilon;
    double delta = 0.0;
    std::size_t k = 2;  // k_upper when the clique search was cut short
    bool exact_k = true;
    double term_pool = 0.0;
    double term_cases = 0.0;
    double total = 0.0;
    double worst_case = 0.0;
    double ratio = 0.0;
    std::size_t n_unique = 0;
    std::size_t n_original = 0;
    std::size_t n_cases = 0;
};

/// Expected-evaluation bound 4n/eps + 2kC. Requires 0 < eps <= 1 and k >= 2.
double theorem_bound(std::size_t n_unique, std::size_t n_cases, Epsilon epsilon, std::size_t k);

BoundReport make_bound_report(const DedupProfile& profile, const SimilarityResult& similarity);

/// One report per grid value, in grid order. Pairwise distances are computed
/// once and re-thresholded for every epsilon.
std::vector<BoundReport> sweep(const DedupProfile& profile, std::span<const Epsilon> epsilons, double delta,
                               std::uint64_t node_budget = kDefaultNodeBudget);

/// Report with the smallest total; ties go to the smaller epsilon.
BoundReport best_epsilon(std::span<const BoundReport> reports);

// Serialisation: columns epsilon, delta, k, exact_k, term_pool, term_cases, total, worst_case, ratio.
std::string reports_to_csv(std::span<const BoundReport> reports);
nlohmann::json reports_to_json(std::span<const BoundReport> reports);
nlohmann::json to_json(const BoundReport& report);

}  // namespace lexdiv
