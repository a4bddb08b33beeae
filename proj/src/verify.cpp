#include "lexdiv/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "lexdiv/bounds.hpp"
#include "lexdiv/diversity.hpp"
#include "lexdiv/popgen.hpp"
#include "lexdiv/simulate.hpp"

namespace lexdiv {

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;

    void fail(const std::string& why) {
        if (passed) detail = why;
        passed = false;
    }
};

// Small discrete population with random clones mixed in.
ErrorMatrix random_population_with_clones(RngStream::engine_type& gen, std::size_t max_unique, std::size_t max_cases) {
    const std::size_t c = std::uniform_int_distribution<std::size_t>(1, max_cases)(gen);
    const std::size_t levels = std::uniform_int_distribution<std::size_t>(2, 3)(gen);
    std::size_t capacity = 1;
    for (std::size_t j = 0; j < c && capacity < max_unique; ++j) capacity *= levels;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, std::min(max_unique, capacity))(gen);
    const ErrorMatrix base = gen_random_uniform(n, c, levels, RngStream(gen()));

    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t copies = 1 + std::uniform_int_distribution<std::size_t>(0, 2)(gen) / 2;
        rows.insert(rows.end(), copies, i);
    }
    std::shuffle(rows.begin(), rows.end(), gen);
    std::vector<double> losses;
    for (std::size_t r : rows) losses.insert(losses.end(), base.row(r).begin(), base.row(r).end());
    return ErrorMatrix(rows.size(), c, std::move(losses), LossKind::discrete);
}

DedupProfile matrix_profile(std::size_t n, std::size_t c, std::vector<double> values) {
    return deduplicate(ErrorMatrix(n, c, std::move(values), LossKind::discrete));
}

Outcome check_elite_filter(FilterFault fault) {
    Outcome out;
    // C attains the minimum on both cases, so it must always win.
    const auto profile = matrix_profile(3, 2, {0, 1, 1, 0, 0, 0});
    LexicaseRunner runner(profile, fault);
    const RngStream rng(101);
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const auto trace = runner.run(rng.substream(i));
        if (trace.winner_original_index != 2) {
            out.fail("dominated individual " + std::to_string(trace.winner_original_index) + " won selection " +
                     std::to_string(i));
            break;
        }
    }
    return out;
}

Outcome check_distribution(std::size_t fixtures, std::uint64_t trials, double tolerance, FilterFault fault,
                           std::uint64_t seed) {
    Outcome out;
    RngStream::engine_type gen(seed);
    double worst = 0.0;
    for (std::size_t f = 0; f < fixtures; ++f) {
        const auto profile = deduplicate(random_population_with_clones(gen, 6, 6));
        const auto exact = oracle_distribution(profile);
        const auto sampled = selection_distribution(profile, trials, RngStream(seed, f), fault);
        const double tv = total_variation(exact.per_original, sampled);
        worst = std::max(worst, tv);
        if (tv > tolerance) {
            std::ostringstream why;
            why << "fixture " << f << ": total variation " << tv << " > " << tolerance;
            out.fail(why.str());
        }
    }
    if (out.passed) out.detail = "max TV " + std::to_string(worst) + " over " + std::to_string(fixtures) + " profiles";
    return out;
}

Outcome check_replay(FilterFault fault) {
    Outcome out;
    RngStream::engine_type gen(7);
    for (int f = 0; f < 20 && out.passed; ++f) {
        const auto profile = deduplicate(random_population_with_clones(gen, 10, 8));
        LexicaseRunner runner(profile, fault);
        for (std::uint64_t i = 0; i < 50 && out.passed; ++i) {
            const auto trace = runner.run(RngStream(99, i));
            const ErrorMatrix& m = profile.unique;
            std::vector<std::size_t> pool(profile.n_unique());
            for (std::size_t u = 0; u < pool.size(); ++u) pool[u] = u;
            for (std::size_t step = 0; step < trace.case_order.size(); ++step) {
                const std::size_t c = trace.case_order[step];
                double best = m.at(pool.front(), c);
                for (auto u : pool) best = std::min(best, m.at(u, c));
                std::erase_if(pool, [&](std::size_t u) { return m.at(u, c) != best; });
                if (pool.size() != trace.pool_sizes[step + 1]) out.fail("pool size mismatch on replay");
            }
            if (pool.size() != 1 || pool.front() != trace.winner_unique_index) out.fail("winner mismatch on replay");
        }
    }
    return out;
}

Outcome check_definitions(std::size_t fixtures) {
    Outcome out;
    RngStream::engine_type gen(2024);
    const auto grid = default_epsilon_grid();
    for (std::size_t f = 0; f < fixtures && out.passed; ++f) {
        const auto profile = deduplicate(random_population_with_clones(gen, 10, 10));
        for (const auto& e : grid) {
            const auto fast = epsilon_cluster_similarity(profile, e, 0.0);
            const auto slow = similarity_bruteforce(profile, e, 0.0);
            if (!fast.exact || fast.k_upper != slow) {
                out.fail("profile " + std::to_string(f) + " eps " + e.to_string() + ": clique k " +
                         std::to_string(fast.k_upper) + " vs set-definition k " + std::to_string(slow));
                break;
            }
        }
    }
    return out;
}

std::vector<DedupProfile> generator_fixtures(std::size_t scale) {
    std::vector<DedupProfile> out;
    out.push_back(deduplicate(gen_adversarial_single_case(scale / 4, scale / 2)));
    out.push_back(deduplicate(gen_log_binary(scale >= 128 ? 128 : 16, scale / 2)));
    out.push_back(deduplicate(gen_two_cluster(scale / 5 * 2, scale / 2)));
    out.push_back(deduplicate(gen_random_uniform(scale, scale, 4, RngStream(11))));
    out.push_back(deduplicate(gen_clustered(scale, scale / 2, 4, 0.05, RngStream(12))));
    return out;
}

Outcome check_monotone(std::size_t scale) {
    Outcome out;
    const auto grid = default_epsilon_grid();
    for (const auto& profile : generator_fixtures(scale)) {
        const auto reports = sweep(profile, grid, 0.0);
        for (std::size_t i = 1; i < reports.size(); ++i) {
            if (reports[i].k < reports[i - 1].k) out.fail("k decreased at eps " + reports[i].epsilon.to_string());
            if (!(reports[i].term_pool < reports[i - 1].term_pool)) out.fail("4N/eps not strictly decreasing");
        }
    }
    return out;
}

Outcome check_two_cluster() {
    Outcome out;
    const auto profile = deduplicate(gen_two_cluster(20, 40));
    const auto r = epsilon_cluster_similarity(profile, Epsilon::parse("0.9"), 0.0);
    if (!r.exact || r.k_upper != 11) out.fail("k(0.9) = " + std::to_string(r.k_upper) + ", expected 11");
    return out;
}

Outcome check_covariance() {
    Outcome out;
    RngStream::engine_type gen(5);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    for (int f = 0; f < 20; ++f) {
        const std::size_t n = 2 + static_cast<std::size_t>(f % 5);
        const std::size_t c = 2 + static_cast<std::size_t>(f % 7);
        std::vector<double> v(n * c);
        for (double& x : v) x = value(gen);
        const ErrorMatrix m(n, c, v, LossKind::real);
        double naive = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double mi = 0.0;
                double mj = 0.0;
                for (std::size_t k = 0; k < c; ++k) mi += m.at(i, k), mj += m.at(j, k);
                mi /= static_cast<double>(c);
                mj /= static_cast<double>(c);
                double cov = 0.0;
                for (std::size_t k = 0; k < c; ++k) cov += (m.at(i, k) - mi) * (m.at(j, k) - mj);
                naive += cov / static_cast<double>(c - 1);
            }
        }
        naive /= static_cast<double>(n * n);
        const double got = covariance_mean(m);
        if (std::fabs(got - naive) > 1e-12 * std::max(1.0, std::fabs(naive))) out.fail("covariance mismatch");
    }
    return out;
}

Outcome check_adversarial_expectation(std::uint64_t trials) {
    Outcome out;
    const auto profile = deduplicate(gen_adversarial_single_case(4, 5));
    const auto stats = estimate_runtime(profile, trials, RngStream(3));
    const double exact = 4.0 * (5.0 + 1.0) / 2.0;
    if (std::fabs(stats.mean_evaluations - exact) > 3.0 * stats.std_error)
        out.fail("mean " + std::to_string(stats.mean_evaluations) + " not within 3 SE of " + std::to_string(exact));
    return out;
}

Outcome check_bound(std::size_t scale, std::uint64_t trials) {
    Outcome out;
    const auto grid = default_epsilon_grid();
    std::size_t checked = 0;
    for (const auto& profile : generator_fixtures(scale)) {
        const auto stats = estimate_runtime(profile, trials, RngStream(17));
        for (const auto& r : sweep(profile, grid, 0.0)) {
            if (!r.exact_k) continue;
            ++checked;
            if (stats.mean_evaluations + 3.0 * stats.std_error > r.total)
                out.fail("mean + 3 SE = " + std::to_string(stats.mean_evaluations + 3.0 * stats.std_error) +
                         " exceeds bound " + std::to_string(r.total) + " at eps " + r.epsilon.to_string());
        }
    }
    if (out.passed) out.detail = std::to_string(checked) + " grid points";
    return out;
}

Outcome check_drift(std::uint64_t trials) {
    Outcome out;
    struct Case {
        std::size_t n, c, clusters;
        const char* eps;
    };
    for (const Case& fixture : {Case{60, 40, 6, "0.25"}, Case{100, 100, 4, "0.2"}}) {
        const auto profile = deduplicate(gen_clustered(fixture.n, fixture.c, fixture.clusters, 0.05, RngStream(21)));
        const auto eps = Epsilon::parse(fixture.eps);
        const auto sim = epsilon_cluster_similarity(profile, eps, 0.0);
        if (!sim.exact) {
            out.fail("k not exact for clustered fixture");
            continue;
        }
        const auto report = drift_check(profile, eps, sim.k_upper, trials, RngStream(22));
        if (!report.passed()) out.fail(std::to_string(report.flagged()) + " pool sizes violate the drift inequality");
    }
    return out;
}

}  // namespace

bool VerifyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerifyReport run_verify(VerifyLevel level, FilterFault fault, std::ostream* progress) {
    VerifyReport report;
    auto run = [&](const std::string& name, const std::function<Outcome()>& body) {
        const auto start = std::chrono::steady_clock::now();
        CheckResult result;
        result.name = name;
        try {
            const Outcome o = body();
            result.passed = o.passed;
            result.detail = o.detail;
        } catch (const std::exception& e) {
            result.passed = false;
            result.detail = std::string("exception: ") + e.what();
        }
        result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (progress) {
            *progress << (result.passed ? "PASS " : "FAIL ") << result.name;
            if (!result.detail.empty()) *progress << ": " << result.detail;
            *progress << '\n';
        }
        report.checks.push_back(std::move(result));
    };

    run("lexicase.elite_filter", [&] { return check_elite_filter(fault); });
    run("lexicase.replay_consistency", [&] { return check_replay(fault); });
    run("lexicase.oracle_distribution", [&] { return check_distribution(6, 20'000, 0.03, fault, 31); });
    run("diversity.definition_equivalence", [] { return check_definitions(30); });
    run("diversity.two_cluster_similarity", [] { return check_two_cluster(); });
    run("diversity.covariance_mean", [] { return check_covariance(); });
    run("bounds.monotonicity", [] { return check_monotone(40); });
    run("simulate.adversarial_expectation", [] { return check_adversarial_expectation(20'000); });
    run("bounds.theorem_bound_small", [] { return check_bound(40, 2'000); });

    if (level == VerifyLevel::full) {
        run("lexicase.oracle_distribution_1e5", [&] { return check_distribution(20, 100'000, 0.02, fault, 37); });
        run("diversity.definition_equivalence_full", [] { return check_definitions(100); });
        run("simulate.drift_inequality", [] { return check_drift(10'000); });
        run("bounds.monotonicity_full", [] { return check_monotone(200); });
        run("bounds.theorem_bound_full", [] { return check_bound(200, 10'000); });
    }
    return report;
}

}  // namespace lexdiv
