#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lexdiv/core.hpp"

namespace lexdiv {

/// One lexicase selection event.
struct SelectionTrace {
    std::size_t winner_unique_index = 0;
    std::size_t winner_original_index = 0;
    /// Cases drawn, in draw order; never repeats a case.
    std::vector<std::size_t> case_order;
    /// Pool sizes X_0 = N_unique, X_1, ..., X_T; X_t is the pool after t filter steps.
    std::vector<std::size_t> pool_sizes;
    /// Loss lookups performed: X_0 + ... + X_{T-1}.
    std::uint64_t evaluations = 0;

    std::size_t iterations() const { return case_order.size(); }
    friend bool operator==(const SelectionTrace&, const SelectionTrace&) = default;
};

/// Deliberate corruption of the elite filter. Only the self-check's negative
/// control uses anything other than `none`.
enum class FilterFault { none, keep_worst };

/// Reusable lexicase selector bound to one profile.
///
/// Holds scratch buffers so repeated selections (Monte Carlo loops) do not
/// allocate. Not thread-safe; give each thread its own runner.
class LexicaseRunner {
public:
    explicit LexicaseRunner(const DedupProfile& profile, FilterFault fault = FilterFault::none);

    /// Runs one selection drawing all randomness from `rng`.
    void run(const RngStream& rng, SelectionTrace& out);
    SelectionTrace run(const RngStream& rng);

    const DedupProfile& profile() const { return profile_; }

private:
    const DedupProfile& profile_;
    FilterFault fault_;
    std::vector<std::size_t> pool_;
    std::vector<std::size_t> next_pool_;
    std::vector<std::size_t> remaining_cases_;
};

/// Selects one parent: repeatedly draws an unused case uniformly, keeps the
/// pool members with the minimal loss on it, and stops at a single survivor.
/// The parent is then drawn uniformly from that survivor's clone group.
///
/// If every case is used up while several rows survive (only possible when
/// the profile still contains identical rows, e.g. after down-sampling), the
/// survivor is drawn uniformly from the remaining pool.
SelectionTrace lexicase_select(const DedupProfile& profile, const RngStream& rng);

/// `count` independent selections; selection i uses rng.substream(i).
std::vector<SelectionTrace> select_parents(const DedupProfile& profile, std::size_t count, const RngStream& rng);

/// Static epsilon-lexicase preprocessing: 0 where the loss is within thresholds[c]
/// of the population minimum on case c, 1 otherwise. Output is discrete.
ErrorMatrix static_epsilon_binarize(const ErrorMatrix& matrix, std::span<const double> thresholds);

/// Per-case median absolute deviation.
std::vector<double> mad_thresholds(const ErrorMatrix& matrix);

/// Keeps ceil(fraction * C) uniformly chosen cases, in their original order.
ErrorMatrix downsample_cases(const ErrorMatrix& matrix, double fraction, const RngStream& rng);

/// Down-samples the unique rows of a profile and keeps the clone groups as they
/// are. Rows may coincide afterwards; lexicase_select handles that.
DedupProfile downsample_profile(const DedupProfile& profile, double fraction, const RngStream& rng);

}  // namespace lexdiv
