#include "lexdiv/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lexdiv/csv_io.hpp"

namespace lexdiv {

void RunTally::add(const SelectionTrace& trace) {
    ++trials;
    sum += trace.evaluations;
    sum_squares += static_cast<uint128>(trace.evaluations) * trace.evaluations;
    min = std::min(min, trace.evaluations);
    max = std::max(max, trace.evaluations);
    iterations += trace.iterations();
    const std::size_t steps = trace.pool_sizes.size();
    if (pool_sums.size() < steps) pool_sums.resize(steps, 0), finished.resize(steps, 0);
    for (std::size_t t = 0; t < steps; ++t) pool_sums[t] += trace.pool_sizes[t];
    finished[steps - 1] += trace.pool_sizes.back();
}

void RunTally::merge(const RunTally& other) {
    trials += other.trials;
    sum += other.sum;
    sum_squares += other.sum_squares;
    min = std::min(min, other.min);
    max = std::max(max, other.max);
    iterations += other.iterations;
    if (pool_sums.size() < other.pool_sums.size())
        pool_sums.resize(other.pool_sums.size(), 0), finished.resize(other.pool_sums.size(), 0);
    for (std::size_t t = 0; t < other.pool_sums.size(); ++t) {
        pool_sums[t] += other.pool_sums[t];
        finished[t] += other.finished[t];
    }
}

RunStats RunTally::finish() const {
    RunStats s;
    s.trials = trials;
    if (trials == 0) return s;
    const auto n = static_cast<long double>(trials);
    s.mean_evaluations = static_cast<double>(static_cast<long double>(sum) / n);
    if (trials > 1) {
        // n * sum(x^2) - (sum x)^2 is exact in 128-bit integers.
        const uint128 centred =
            static_cast<uint128>(trials) * sum_squares - static_cast<uint128>(sum) * sum;
        const long double variance = static_cast<long double>(centred) / (n * (n - 1));
        s.std_error = static_cast<double>(std::sqrt(variance / n));
    }
    s.min_evaluations = min;
    s.max_evaluations = max;
    s.mean_iterations = static_cast<double>(static_cast<long double>(iterations) / n);
    s.pool_size_profile.resize(pool_sums.size());
    std::uint64_t carried = 0;  // final pool sizes of selections that already stopped
    for (std::size_t t = 0; t < pool_sums.size(); ++t) {
        s.pool_size_profile[t] = static_cast<double>(static_cast<long double>(pool_sums[t] + carried) / n);
        carried += finished[t];
    }
    return s;
}

RunStats estimate_runtime(const DedupProfile& profile, std::uint64_t trials, const RngStream& rng) {
    if (trials == 0) throw InputError("estimate_runtime needs at least one trial");
    RunTally total;
    const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel
    {
        LexicaseRunner runner(profile);
        SelectionTrace trace;
        RunTally local;
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < n; ++i) {
            runner.run(rng.substream(static_cast<std::uint64_t>(i)), trace);
            local.add(trace);
        }
#pragma omp critical(lexdiv_runtime_merge)
        total.merge(local);
    }
    return total.finish();
}

std::vector<double> selection_distribution(const DedupProfile& profile, std::uint64_t trials, const RngStream& rng,
                                           FilterFault fault) {
    if (trials == 0) throw InputError("selection_distribution needs at least one trial");
    std::vector<std::uint64_t> wins(profile.n_original(), 0);
    const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel
    {
        LexicaseRunner runner(profile, fault);
        SelectionTrace trace;
        std::vector<std::uint64_t> local(wins.size(), 0);
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < n; ++i) {
            runner.run(rng.substream(static_cast<std::uint64_t>(i)), trace);
            ++local[trace.winner_original_index];
        }
#pragma omp critical(lexdiv_distribution_merge)
        for (std::size_t j = 0; j < wins.size(); ++j) wins[j] += local[j];
    }
    std::vector<double> freq(wins.size());
    for (std::size_t j = 0; j < wins.size(); ++j)
        freq[j] = static_cast<double>(wins[j]) / static_cast<double>(trials);
    return freq;
}

ExactDistribution oracle_distribution(const DedupProfile& profile) {
    const ErrorMatrix& m = profile.unique;
    if (m.kind() != LossKind::discrete) throw NeedsBinarization("oracle_distribution needs discrete losses");
    const std::size_t n = profile.n_unique();
    const std::size_t c = profile.n_cases();
    if (c > 8 || n > 12) throw InputError("oracle_distribution is limited to C <= 8 and N_unique <= 12");

    std::vector<std::size_t> perm(c);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<double> weight(n, 0.0);
    std::uint64_t permutations = 0;
    std::vector<std::size_t> pool;
    std::vector<std::size_t> next;
    do {
        ++permutations;
        pool.resize(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t step = 0; step < c && pool.size() > 1; ++step) {
            const std::size_t cs = perm[step];
            double elite = m.at(pool.front(), cs);
            for (std::size_t u : pool) elite = std::min(elite, m.at(u, cs));
            next.clear();
            for (std::size_t u : pool)
                if (m.at(u, cs) == elite) next.push_back(u);
            pool.swap(next);
        }
        for (std::size_t u : pool) weight[u] += 1.0 / static_cast<double>(pool.size());
    } while (std::next_permutation(perm.begin(), perm.end()));

    ExactDistribution out;
    out.per_unique.resize(n);
    out.per_original.assign(profile.n_original(), 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        out.per_unique[u] = weight[u] / static_cast<double>(permutations);
        for (std::size_t original : profile.groups[u])
            out.per_original[original] = out.per_unique[u] / static_cast<double>(profile.groups[u].size());
    }
    return out;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw InputError("total variation needs distributions of equal length");
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::fabs(p[i] - q[i]);
    return 0.5 * tv;
}

std::size_t DriftReport::flagged() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const DriftRow& r) { return r.flagged; }));
}

DriftReport drift_check(const DedupProfile& profile, Epsilon epsilon, std::size_t k, std::uint64_t trials,
                        const RngStream& rng, std::uint64_t min_samples) {
    if (trials < 1000) throw InputError("drift_check needs at least 1000 trials");
    if (k < 2) throw InputError("drift_check needs k >= 2");
    if (!(epsilon > Epsilon{}) || epsilon > Epsilon::from_ratio(1, 1))
        throw InputError("drift_check needs epsilon in (0, 1]");

    const std::size_t n = profile.n_unique();
    std::vector<std::uint64_t> count(n + 1, 0);
    std::vector<std::uint64_t> sum(n + 1, 0);
    std::vector<std::uint64_t> sum_squares(n + 1, 0);
    const auto total = static_cast<std::int64_t>(trials);
#pragma omp parallel
    {
        LexicaseRunner runner(profile);
        SelectionTrace trace;
        std::vector<std::uint64_t> c(n + 1, 0);
        std::vector<std::uint64_t> s(n + 1, 0);
        std::vector<std::uint64_t> ss(n + 1, 0);
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < total; ++i) {
            runner.run(rng.substream(static_cast<std::uint64_t>(i)), trace);
            for (std::size_t t = 0; t + 1 < trace.pool_sizes.size(); ++t) {
                const std::size_t x = trace.pool_sizes[t];
                if (x < 2 * k) continue;
                const std::uint64_t next = trace.pool_sizes[t + 1];
                ++c[x];
                s[x] += next;
                ss[x] += next * next;
            }
        }
#pragma omp critical(lexdiv_drift_merge)
        for (std::size_t x = 0; x <= n; ++x) count[x] += c[x], sum[x] += s[x], sum_squares[x] += ss[x];
    }

    DriftReport report;
    report.epsilon = epsilon;
    report.k = k;
    report.trials = trials;
    report.min_samples = min_samples;
    const double shrink = 1.0 - epsilon.value() / 4.0;
    for (std::size_t x = 2 * k; x <= n; ++x) {
        if (count[x] == 0) continue;
        DriftRow row;
        row.pool_size = x;
        row.samples = count[x];
        const auto m = static_cast<long double>(count[x]);
        row.mean_next = static_cast<double>(static_cast<long double>(sum[x]) / m);
        if (count[x] > 1) {
            const long double centred = static_cast<long double>(sum_squares[x]) -
                                        static_cast<long double>(sum[x]) * static_cast<long double>(sum[x]) / m;
            row.std_error = static_cast<double>(std::sqrt(std::max(0.0L, centred) / (m - 1) / m));
        }
        row.bound = static_cast<double>(x) * shrink;
        row.checked = count[x] >= min_samples;
        row.flagged = row.checked && row.mean_next - 3.0 * row.std_error > row.bound;
        report.rows.push_back(row);
    }
    return report;
}

nlohmann::json to_json(const RunStats& s) {
    return nlohmann::json{{"trials", s.trials},
                          {"mean_evaluations", s.mean_evaluations},
                          {"std_error", s.std_error},
                          {"min", s.min_evaluations},
                          {"max", s.max_evaluations},
                          {"mean_iterations", s.mean_iterations},
                          {"pool_size_profile", s.pool_size_profile}};
}

nlohmann::json to_json(const DriftReport& r) {
    auto rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"pool_size", row.pool_size},
                        {"samples", row.samples},
                        {"mean_next", row.mean_next},
                        {"std_error", row.std_error},
                        {"bound", row.bound},
                        {"checked", row.checked},
                        {"flagged", row.flagged}});
    }
    return nlohmann::json{{"epsilon", r.epsilon.value()}, {"epsilon_exact", r.epsilon.to_string()},
                          {"k", r.k},                     {"trials", r.trials},
                          {"min_samples", r.min_samples}, {"flagged", r.flagged()},
                          {"passed", r.passed()},         {"rows", rows}};
}

std::string drift_to_csv(const DriftReport& r) {
    std::string out = "pool_size,samples,mean_next,std_error,bound,checked,flagged\n";
    for (const auto& row : r.rows) {
        out += std::to_string(row.pool_size) + ',' + std::to_string(row.samples) + ',' + format_double(row.mean_next) +
               ',' + format_double(row.std_error) + ',' + format_double(row.bound) + ',' +
               (row.checked ? "true" : "false") + ',' + (row.flagged ? "true" : "false") + '\n';
    }
    return out;
}

}  // namespace lexdiv
