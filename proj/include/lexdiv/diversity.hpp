#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lexdiv/core.hpp"
#include "lexdiv/epsilon.hpp"

namespace lexdiv {

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

/// Number of cases on which rows i and j differ. Discrete: any inequality
/// (delta must be 0). Real: |L(i,c) - L(j,c)| > delta.
std::size_t phenotypic_distance(const ErrorMatrix& matrix, std::size_t i, std::size_t j, double delta);

/// Undirected graph over unique rows; an edge joins two rows that are similar,
/// i.e. their (delta-)distance is strictly below eps * C.
class SimilarityGraph {
public:
    SimilarityGraph(std::size_t n_vertices, Epsilon epsilon, double delta);

    std::size_t n_vertices() const { return n_; }
    std::size_t words_per_row() const { return words_; }
    Epsilon epsilon() const { return epsilon_; }
    double delta() const { return delta_; }

    bool adjacent(std::size_t a, std::size_t b) const {
        return (bits_[a * words_ + b / 64] >> (b % 64)) & 1U;
    }
    void add_edge(std::size_t a, std::size_t b);
    std::span<const std::uint64_t> neighbours(std::size_t v) const { return {bits_.data() + v * words_, words_}; }

    std::size_t degree(std::size_t v) const;
    std::size_t edge_count() const;

    friend bool operator==(const SimilarityGraph& a, const SimilarityGraph& b) {
        return a.n_ == b.n_ && a.epsilon_ == b.epsilon_ && a.delta_ == b.delta_ && a.bits_ == b.bits_;
    }

private:
    std::size_t n_;
    std::size_t words_;
    Epsilon epsilon_;
    double delta_;
    std::vector<std::uint64_t> bits_;
};

/// Outcome of the clique analysis. When the node budget runs out the clique
/// number is only bracketed; k_upper is the conservative value.
struct SimilarityResult {
    Epsilon epsilon;
    double delta = 0.0;
    std::size_t alpha_lower = 1;
    std::size_t alpha_upper = 1;
    bool exact = true;
    std::size_t k_lower = 2;
    std::size_t k_upper = 2;
    std::uint64_t search_nodes = 0;
    bool budget_exhausted = false;
    /// One largest clique found; which one is not part of the contract.
    std::vector<std::size_t> witness;

    std::size_t k() const { return k_upper; }
};

/// Pairwise distances, each capped at `cap` (counting stops once a pair reaches it).
/// Build once and threshold for several epsilons with cap >= the largest far threshold.
class DistanceTable {
public:
    DistanceTable(const DedupProfile& profile, double delta, std::size_t cap);

    std::size_t n() const { return n_; }
    std::size_t n_cases() const { return n_cases_; }
    std::size_t cap() const { return cap_; }
    double delta() const { return delta_; }
    /// min(distance(a, b), cap), a != b.
    std::size_t capped(std::size_t a, std::size_t b) const;

    SimilarityGraph graph(Epsilon epsilon) const;

private:
    std::size_t n_;
    std::size_t n_cases_;
    std::size_t cap_;
    double delta_;
    std::vector<std::uint32_t> upper_;  // packed strict upper triangle
};

/// Similarity graph for one epsilon, rows processed in parallel.
SimilarityGraph build_similarity_graph(const DedupProfile& profile, Epsilon epsilon, double delta);

/// Maximum clique by branch and bound; see clique.cpp.
SimilarityResult clique_number(const SimilarityGraph& graph, std::uint64_t node_budget = kDefaultNodeBudget);

/// epsilon-cluster similarity k = clique number + 1.
SimilarityResult epsilon_cluster_similarity(const DedupProfile& profile, Epsilon epsilon, double delta,
                                            std::uint64_t node_budget = kDefaultNodeBudget);

/// Same quantity straight from the set definition: smallest k >= 2 such that
/// every k rows contain a pair at distance >= eps * C. Exponential; N_unique <= 20.
std::size_t similarity_bruteforce(const DedupProfile& profile, Epsilon epsilon, double delta);

/// Mean over all N^2 entries of the individual-by-individual covariance matrix
/// of error vectors (sample covariance across cases, divisor C - 1).
double covariance_mean(const ErrorMatrix& matrix);

/// Checks delta against the matrix kind: 0 for discrete, finite and >= 0 for real.
void validate_delta(const ErrorMatrix& matrix, double delta);

}  // namespace lexdiv
