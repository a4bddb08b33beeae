#include "lexdiv/engine.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

namespace lexdiv {

namespace {

std::size_t uniform_index(RngStream::engine_type& gen, std::size_t size) {
    return std::uniform_int_distribution<std::size_t>(0, size - 1)(gen);
}

void require_discrete(const ErrorMatrix& m, const char* what) {
    if (m.kind() != LossKind::discrete)
        throw NeedsBinarization(std::string(what) + " needs discrete losses; binarize real-valued losses first");
}

double median_of(std::vector<double> values) {
    const std::size_t n = values.size();
    std::sort(values.begin(), values.end());
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

LexicaseRunner::LexicaseRunner(const DedupProfile& profile, FilterFault fault) : profile_(profile), fault_(fault) {
    require_discrete(profile.unique, "lexicase selection");
    if (profile.groups.size() != profile.n_unique())
        throw InputError("profile has " + std::to_string(profile.groups.size()) + " clone groups for " +
                         std::to_string(profile.n_unique()) + " unique rows");
    for (const auto& g : profile.groups)
        if (g.empty()) throw InputError("profile contains an empty clone group");
    pool_.reserve(profile.n_unique());
    next_pool_.reserve(profile.n_unique());
    remaining_cases_.reserve(profile.n_cases());
}

void LexicaseRunner::run(const RngStream& rng, SelectionTrace& out) {
    const ErrorMatrix& m = profile_.unique;
    const std::size_t n_cases = m.n_cases();
    auto gen = rng.engine();

    out.case_order.clear();
    out.pool_sizes.clear();
    out.evaluations = 0;

    pool_.resize(m.n_individuals());
    std::iota(pool_.begin(), pool_.end(), std::size_t{0});
    remaining_cases_.resize(n_cases);
    std::iota(remaining_cases_.begin(), remaining_cases_.end(), std::size_t{0});
    out.pool_sizes.push_back(pool_.size());

    while (pool_.size() > 1 && !remaining_cases_.empty()) {
        // Draw from the unused cases; swap-remove keeps the draw O(1).
        const std::size_t pick = uniform_index(gen, remaining_cases_.size());
        const std::size_t c = remaining_cases_[pick];
        remaining_cases_[pick] = remaining_cases_.back();
        remaining_cases_.pop_back();
        out.case_order.push_back(c);

        double elite = m.at(pool_.front(), c);
        for (std::size_t idx : pool_) {
            const double loss = m.at(idx, c);
            elite = fault_ == FilterFault::keep_worst ? std::max(elite, loss) : std::min(elite, loss);
        }
        out.evaluations += pool_.size();

        next_pool_.clear();
        for (std::size_t idx : pool_)
            if (m.at(idx, c) == elite) next_pool_.push_back(idx);
        pool_.swap(next_pool_);
        out.pool_sizes.push_back(pool_.size());
    }

    const std::size_t winner = pool_.size() == 1 ? pool_.front() : pool_[uniform_index(gen, pool_.size())];
    const auto& clones = profile_.groups[winner];
    out.winner_unique_index = winner;
    out.winner_original_index = clones[uniform_index(gen, clones.size())];
}

SelectionTrace LexicaseRunner::run(const RngStream& rng) {
    SelectionTrace trace;
    run(rng, trace);
    return trace;
}

SelectionTrace lexicase_select(const DedupProfile& profile, const RngStream& rng) {
    return LexicaseRunner(profile).run(rng);
}

std::vector<SelectionTrace> select_parents(const DedupProfile& profile, std::size_t count, const RngStream& rng) {
    if (count == 0) throw InputError("select_parents needs count >= 1");
    LexicaseRunner runner(profile);
    std::vector<SelectionTrace> traces(count);
    for (std::size_t i = 0; i < count; ++i) runner.run(rng.substream(i), traces[i]);
    return traces;
}

ErrorMatrix static_epsilon_binarize(const ErrorMatrix& matrix, std::span<const double> thresholds) {
    if (matrix.kind() != LossKind::real)
        throw InputError("static epsilon binarization expects a real-valued matrix");
    const std::size_t n = matrix.n_individuals();
    const std::size_t c = matrix.n_cases();
    if (thresholds.size() != c)
        throw InputError("expected " + std::to_string(c) + " thresholds, got " + std::to_string(thresholds.size()));
    for (double t : thresholds)
        if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("binarization thresholds must be finite and >= 0");

    std::vector<double> column_min(c, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
        double best = matrix.at(0, j);
        for (std::size_t i = 1; i < n; ++i) best = std::min(best, matrix.at(i, j));
        column_min[j] = best;
    }
    std::vector<double> out(n * c);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < c; ++j)
            out[i * c + j] = matrix.at(i, j) <= column_min[j] + thresholds[j] ? 0.0 : 1.0;
    return ErrorMatrix(n, c, std::move(out), LossKind::discrete, matrix.individual_labels(), matrix.case_labels());
}

std::vector<double> mad_thresholds(const ErrorMatrix& matrix) {
    if (matrix.kind() != LossKind::real) throw InputError("MAD thresholds are defined for real-valued matrices");
    const std::size_t n = matrix.n_individuals();
    std::vector<double> thresholds(matrix.n_cases());
    std::vector<double> column(n);
    for (std::size_t j = 0; j < matrix.n_cases(); ++j) {
        for (std::size_t i = 0; i < n; ++i) column[i] = matrix.at(i, j);
        const double med = median_of(column);
        for (double& v : column) v = std::fabs(v - med);
        thresholds[j] = median_of(column);
    }
    return thresholds;
}

ErrorMatrix downsample_cases(const ErrorMatrix& matrix, double fraction, const RngStream& rng) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw InputError("down-sampling fraction must lie in (0, 1]");
    const std::size_t c = matrix.n_cases();
    const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(c)));
    if (keep == 0) throw InputError("down-sampling keeps no cases");

    std::vector<std::size_t> all(c);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<std::size_t> chosen;
    chosen.reserve(keep);
    auto gen = rng.engine();
    std::sample(all.begin(), all.end(), std::back_inserter(chosen), keep, gen);  // order-preserving

    const std::size_t n = matrix.n_individuals();
    std::vector<double> out;
    out.reserve(n * keep);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : chosen) out.push_back(matrix.at(i, j));
    std::vector<std::string> labels;
    if (!matrix.case_labels().empty())
        for (std::size_t j : chosen) labels.push_back(matrix.case_labels()[j]);
    return ErrorMatrix(n, keep, std::move(out), matrix.kind(), matrix.individual_labels(), std::move(labels));
}

DedupProfile downsample_profile(const DedupProfile& profile, double fraction, const RngStream& rng) {
    return DedupProfile{downsample_cases(profile.unique, fraction, rng), profile.groups};
}

}  // namespace lexdiv
