#pragma once

// Serial reference versions of the OpenMP kernels. They follow the plain
// definitions with no scratch reuse or early exit; tests require the parallel
// kernels to reproduce them exactly and the benchmark compares the two.

#include <cstdint>
#include <vector>

#include "lexdiv/core.hpp"
#include "lexdiv/diversity.hpp"
#include "lexdiv/simulate.hpp"

namespace lexdiv::reference {

SimilarityGraph build_similarity_graph(const DedupProfile& profile, Epsilon epsilon, double delta);

RunStats estimate_runtime(const DedupProfile& profile, std::uint64_t trials, const RngStream& rng);

std::vector<double> selection_distribution(const DedupProfile& profile, std::uint64_t trials, const RngStream& rng);

}  // namespace lexdiv::reference
