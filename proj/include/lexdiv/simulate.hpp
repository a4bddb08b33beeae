#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lexdiv/core.hpp"
#include "lexdiv/engine.hpp"
#include "lexdiv/epsilon.hpp"

namespace lexdiv {

__extension__ typedef unsigned __int128 uint128;

/// Monte Carlo summary of the evaluation count M.
struct RunStats {
    std::uint64_t trials = 0;
    double mean_evaluations = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(trials)
    std::uint64_t min_evaluations = 0;
    std::uint64_t max_evaluations = 0;
    double mean_iterations = 0.0;
    /// Mean X_t for t = 0, 1, ...; a finished selection keeps its final pool size.
    std::vector<double> pool_size_profile;

    friend bool operator==(const RunStats&, const RunStats&) = default;
};

/// Exact integer tallies behind RunStats. Merging is commutative, so the
/// result does not depend on how trials are split across threads.
struct RunTally {
    std::uint64_t trials = 0;
    std::uint64_t sum = 0;
    uint128 sum_squares = 0;
    std::uint64_t min = UINT64_MAX;
    std::uint64_t max = 0;
    std::uint64_t iterations = 0;
    std::vector<std::uint64_t> pool_sums;  // sum over trials of X_t
    std::vector<std::uint64_t> finished;   // trials whose final X is at step t, summed pool size

    void add(const SelectionTrace& trace);
    void merge(const RunTally& other);
    RunStats finish() const;
};

/// Runs `trials` selections, trial i on rng.substream(i). Parallel over trials.
RunStats estimate_runtime(const DedupProfile& profile, std::uint64_t trials, const RngStream& rng);

/// Empirical winner frequency per original individual (sums to 1).
std::vector<double> selection_distribution(const DedupProfile& profile, std::uint64_t trials, const RngStream& rng,
                                           FilterFault fault = FilterFault::none);

struct ExactDistribution {
    std::vector<double> per_unique;
    std::vector<double> per_original;
};

/// Exact winner probabilities by replaying every one of the C! case orders.
/// Limited to C <= 8 and N_unique <= 12.
ExactDistribution oracle_distribution(const DedupProfile& profile);

double total_variation(std::span<const double> p, std::span<const double> q);

/// Conditional one-step pool shrinkage, tabulated per exact pool size x >= 2k.
struct DriftRow {
    std::size_t pool_size = 0;
    std::uint64_t samples = 0;
    double mean_next = 0.0;
    double std_error = 0.0;
    double bound = 0.0;   // x (1 - eps/4)
    bool checked = false;  // enough samples for the 3 SE test
    bool flagged = false;  // mean_next - 3 SE > bound
};

struct DriftReport {
    Epsilon epsilon;
    std::size_t k = 2;
    std::uint64_t trials = 0;
    std::uint64_t min_samples = 0;
    std::vector<DriftRow> rows;

    std::size_t flagged() const;
    bool passed() const { return flagged() == 0; }
};

inline constexpr std::uint64_t kDefaultDriftMinSamples = 30;

/// Simulates `trials` selections and checks E[X_{t+1} | X_t = x] <= x (1 - eps/4)
/// for every observed x >= 2k. Rows with fewer than `min_samples` observations
/// are listed but not tested.
DriftReport drift_check(const DedupProfile& profile, Epsilon epsilon, std::size_t k, std::uint64_t trials,
                        const RngStream& rng, std::uint64_t min_samples = kDefaultDriftMinSamples);

nlohmann::json to_json(const RunStats& stats);
nlohmann::json to_json(const DriftReport& report);
std::string drift_to_csv(const DriftReport& report);

}  // namespace lexdiv
