// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
//
// Tolerances:
//   1  total variation <= 0.02 at 1e5 trials, >= 20 profiles, < 60 s
//   2  exact equality on >= 100 profiles over the default grid, < 60 s
//   3  mean + 3 SE <= 4N/eps + 2kC at 1e4 trials, zero violations, < 300 s
//   4  mean >= 0.4 NC and |mean - exact| <= 3 SE at 1e4 trials
//   5  avg distance >= 0.4 C, k(0.9) == N/2 + 1, mean >= 0.1 NC
//   6  exact monotonicity, no tolerance
//   7  zero drift flags at 1e4 trials with the 3 SE margin
//   8  relative error <= 1e-12 on 50 matrices; "large" means the covariance
//      mean reaches half the mean per-individual variance
//   9  run-directory pipeline, end to end
//   10 analyze < 30 s with every k exact; simulate (1e3 trials) < 30 s

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lexdiv/bounds.hpp"
#include "lexdiv/cli.hpp"
#include "lexdiv/csv_io.hpp"
#include "lexdiv/diversity.hpp"
#include "lexdiv/popgen.hpp"
#include "lexdiv/simulate.hpp"

using namespace lexdiv;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool passed = true;
    std::ostringstream detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            if (!passed) detail << "; ";
            else detail.str("");
            detail << what;
            passed = false;
        }
    }
};

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

// Random discrete population with some rows repeated, at most `max_unique` distinct rows.
ErrorMatrix population_with_clones(RngStream::engine_type& gen, std::size_t max_unique, std::size_t max_cases,
                                   std::size_t min_unique) {
    for (;;) {
        const std::size_t c = std::uniform_int_distribution<std::size_t>(2, max_cases)(gen);
        const std::size_t levels = std::uniform_int_distribution<std::size_t>(2, 3)(gen);
        const std::size_t n = std::uniform_int_distribution<std::size_t>(min_unique, max_unique)(gen);
        std::vector<double> cells(n * c);
        for (double& x : cells) x = static_cast<double>(gen() % levels);
        const auto profile = deduplicate(ErrorMatrix(n, c, cells, LossKind::discrete));
        if (profile.n_unique() < min_unique) continue;
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < n; ++i) rows.insert(rows.end(), 1 + gen() % 2, i);
        std::shuffle(rows.begin(), rows.end(), gen);
        std::vector<double> losses;
        for (auto r : rows) losses.insert(losses.end(), cells.begin() + r * c, cells.begin() + (r + 1) * c);
        return ErrorMatrix(rows.size(), c, std::move(losses), LossKind::discrete);
    }
}

std::vector<std::pair<std::string, DedupProfile>> generator_fixtures() {
    std::vector<std::pair<std::string, DedupProfile>> out;
    out.emplace_back("adversarial 200x200", deduplicate(gen_adversarial_single_case(200, 200)));
    out.emplace_back("adversarial 20x40", deduplicate(gen_adversarial_single_case(20, 40)));
    out.emplace_back("log_binary 128x200", deduplicate(gen_log_binary(128, 200)));
    out.emplace_back("log_binary 8x64", deduplicate(gen_log_binary(8, 64)));
    out.emplace_back("two_cluster 200x200", deduplicate(gen_two_cluster(200, 200)));
    out.emplace_back("two_cluster 20x40", deduplicate(gen_two_cluster(20, 40)));
    out.emplace_back("random_uniform 200x200", deduplicate(gen_random_uniform(200, 200, 4, RngStream(1))));
    out.emplace_back("random_uniform 100x30 levels 2", deduplicate(gen_random_uniform(100, 30, 2, RngStream(2))));
    out.emplace_back("clustered 200x200", deduplicate(gen_clustered(200, 200, 5, 0.05, RngStream(3))));
    out.emplace_back("clustered 60x40", deduplicate(gen_clustered(60, 40, 6, 0.05, RngStream(21))));
    return out;
}

double naive_covariance_mean(const ErrorMatrix& m) {
    const std::size_t n = m.n_individuals();
    const std::size_t c = m.n_cases();
    std::vector<double> mean(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < c; ++k) mean[i] += m.at(i, k);
        mean[i] /= static_cast<double>(c);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < c; ++k) s += (m.at(i, k) - mean[i]) * (m.at(j, k) - mean[j]);
            total += s / static_cast<double>(c - 1);
        }
    return total / static_cast<double>(n * n);
}

double mean_row_variance(const ErrorMatrix& m) {
    double total = 0.0;
    for (std::size_t i = 0; i < m.n_individuals(); ++i) {
        double mu = 0.0;
        for (double x : m.row(i)) mu += x;
        mu /= static_cast<double>(m.n_cases());
        double s = 0.0;
        for (double x : m.row(i)) s += (x - mu) * (x - mu);
        total += s / static_cast<double>(m.n_cases() - 1);
    }
    return total / static_cast<double>(m.n_individuals());
}

// Transposed reading: covariance between cases, averaged over the C x C matrix.
double case_axis_covariance_mean(const ErrorMatrix& m) {
    std::vector<double> t(m.n_individuals() * m.n_cases());
    for (std::size_t i = 0; i < m.n_individuals(); ++i)
        for (std::size_t k = 0; k < m.n_cases(); ++k) t[k * m.n_individuals() + i] = m.at(i, k);
    return covariance_mean(ErrorMatrix(m.n_cases(), m.n_individuals(), std::move(t), LossKind::real));
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
    double seconds;
};

CliRun cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const auto start = Clock::now();
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str(), seconds_since(start)};
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

std::string field(const std::string& line, std::size_t index) {
    std::istringstream in(line);
    std::string cell;
    for (std::size_t i = 0; i <= index; ++i) std::getline(in, cell, ',');
    return cell;
}

// ---------------------------------------------------------------------------

Verdict oracle_equivalence() {
    Verdict v;
    RngStream::engine_type gen(20240601);
    std::vector<DedupProfile> profiles;
    // Hand-made cases: dominated row, symmetric pair, clones of the only winner.
    profiles.push_back(deduplicate(ErrorMatrix(3, 2, {0, 1, 1, 0, 0, 0}, LossKind::discrete)));
    profiles.push_back(deduplicate(ErrorMatrix(3, 2, {0, 1, 1, 0, 0, 1}, LossKind::discrete)));
    profiles.push_back(deduplicate(ErrorMatrix(3, 2, {0, 0, 1, 1, 0, 0}, LossKind::discrete)));
    while (profiles.size() < 24) profiles.push_back(deduplicate(population_with_clones(gen, 6, 6, 2)));

    double worst = 0.0;
    std::size_t with_clones = 0;
    for (std::size_t f = 0; f < profiles.size(); ++f) {
        const auto& p = profiles[f];
        v.require(p.n_unique() <= 6 && p.n_cases() <= 6, "fixture outside N <= 6, C <= 6");
        with_clones += p.n_original() > p.n_unique();
        const auto exact = oracle_distribution(p);
        const auto sampled = selection_distribution(p, 100'000, RngStream(77, f));
        const double tv = total_variation(exact.per_original, sampled);
        worst = std::max(worst, tv);
        v.require(tv <= 0.02, "fixture " + std::to_string(f) + " TV " + std::to_string(tv));
    }
    if (v.passed)
        v.detail << profiles.size() << " profiles (" << with_clones << " with clones), max TV " << worst;
    return v;
}

Verdict definition_equivalence() {
    Verdict v;
    RngStream::engine_type gen(99);
    const auto grid = default_epsilon_grid();
    std::size_t comparisons = 0;
    for (int f = 0; f < 120; ++f) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(gen);
        const std::size_t c = std::uniform_int_distribution<std::size_t>(1, 12)(gen);
        const std::size_t levels = std::uniform_int_distribution<std::size_t>(2, 4)(gen);
        std::vector<double> cells(n * c);
        for (double& x : cells) x = static_cast<double>(gen() % levels);
        const auto p = deduplicate(ErrorMatrix(n, c, cells, LossKind::discrete));
        for (const auto& e : grid) {
            const auto fast = epsilon_cluster_similarity(p, e, 0.0);
            const auto slow = similarity_bruteforce(p, e, 0.0);
            ++comparisons;
            v.require(fast.exact && fast.k() == slow, "profile " + std::to_string(f) + " eps " + e.to_string() +
                                                          ": " + std::to_string(fast.k()) + " vs " +
                                                          std::to_string(slow));
        }
    }
    if (v.passed) v.detail << "120 profiles, " << comparisons << " comparisons";
    return v;
}

Verdict bound_holds() {
    Verdict v;
    const auto grid = default_epsilon_grid();
    std::size_t checked = 0;
    double tightest = 0.0;
    for (const auto& [name, p] : generator_fixtures()) {
        const auto stats = estimate_runtime(p, 10'000, RngStream(2024));
        const double upper = stats.mean_evaluations + 3.0 * stats.std_error;
        for (const auto& r : sweep(p, grid, 0.0)) {
            if (!r.exact_k) continue;
            ++checked;
            tightest = std::max(tightest, upper / r.total);
            v.require(upper <= r.total, name + " eps " + r.epsilon.to_string() + ": " + std::to_string(upper) +
                                            " > " + std::to_string(r.total));
        }
    }
    v.require(checked > 0, "no grid point with exact k");
    if (v.passed) v.detail << checked << " (fixture, eps) points, max (mean+3SE)/bound " << tightest;
    return v;
}

Verdict adversarial_lower_bound() {
    Verdict v;
    const std::size_t n = 100;
    const std::size_t c = 100;
    const auto p = deduplicate(gen_adversarial_single_case(n, c));
    const auto stats = estimate_runtime(p, 10'000, RngStream(4));
    // The pool stays at N until the discriminating case appears: step t costs N
    // with probability (C - t) / C.
    double exact = 0.0;
    for (std::size_t t = 0; t < c; ++t) exact += static_cast<double>(n) * static_cast<double>(c - t) / c;
    v.require(stats.mean_evaluations >= 0.4 * n * c, "mean below 0.4 NC");
    v.require(std::fabs(stats.mean_evaluations - exact) <= 3.0 * stats.std_error, "mean not within 3 SE of exact");
    if (v.passed)
        v.detail << "mean " << stats.mean_evaluations << " +- " << stats.std_error << ", exact " << exact
                 << ", 0.4NC = " << 0.4 * n * c;
    return v;
}

Verdict two_cluster_counterexample() {
    Verdict v;
    const std::size_t n = 20;
    const std::size_t c = 40;
    const auto m = gen_two_cluster(n, c);
    double total = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) total += static_cast<double>(phenotypic_distance(m, a, b, 0.0));
    const double average = total / static_cast<double>(n * (n - 1) / 2);
    const auto p = deduplicate(m);
    const auto sim = epsilon_cluster_similarity(p, Epsilon::parse("0.9"), 0.0);
    const auto stats = estimate_runtime(p, 10'000, RngStream(5));
    v.require(average >= 0.4 * c, "average distance " + std::to_string(average) + " < 0.4 C");
    v.require(sim.exact && sim.k() == n / 2 + 1, "k(0.9) = " + std::to_string(sim.k()));
    v.require(stats.mean_evaluations >= 0.1 * n * c, "mean " + std::to_string(stats.mean_evaluations) + " < 0.1 NC");
    if (v.passed)
        v.detail << "avg distance " << average << ", k(0.9) = " << sim.k() << ", mean " << stats.mean_evaluations
                 << " >= " << 0.1 * n * c;
    return v;
}

Verdict monotone_terms() {
    Verdict v;
    const auto grid = default_epsilon_grid();
    auto fixtures = generator_fixtures();
    fixtures.emplace_back("two_cluster 6x10", deduplicate(gen_two_cluster(6, 10)));
    std::size_t interior = 0;
    for (const auto& [name, p] : fixtures) {
        const auto reports = sweep(p, grid, 0.0);
        for (std::size_t i = 1; i < reports.size(); ++i) {
            v.require(reports[i].k >= reports[i - 1].k, name + ": k decreases at " + reports[i].epsilon.to_string());
            v.require(reports[i].term_pool < reports[i - 1].term_pool, name + ": term_pool not strictly decreasing");
            v.require(reports[i].term_cases >= reports[i - 1].term_cases, name + ": term_cases decreases");
        }
        const auto best = best_epsilon(reports);
        const auto lowest = std::min_element(reports.begin(), reports.end(),
                                             [](const BoundReport& a, const BoundReport& b) { return a.total < b.total; });
        v.require(best.total == lowest->total && best.epsilon == lowest->epsilon, name + ": best_epsilon is not the minimum");
        interior += best.epsilon != grid.front() && best.epsilon != grid.back();
    }
    if (v.passed) v.detail << fixtures.size() << " fixtures, " << interior << " with an interior minimum";
    return v;
}

Verdict drift_inequality() {
    Verdict v;
    struct Fixture {
        std::size_t n, c, clusters;
        double spread;
        const char* eps;
    };
    std::size_t rows_tested = 0;
    for (const auto& f : {Fixture{60, 40, 6, 0.05, "0.25"}, Fixture{100, 100, 4, 0.05, "0.2"},
                          Fixture{200, 200, 5, 0.05, "0.3"}}) {
        const auto p = deduplicate(gen_clustered(f.n, f.c, f.clusters, f.spread, RngStream(21)));
        const auto eps = Epsilon::parse(f.eps);
        const auto sim = epsilon_cluster_similarity(p, eps, 0.0);
        const std::string name = "clustered " + std::to_string(f.n) + "x" + std::to_string(f.c);
        v.require(sim.exact, name + ": k not exact");
        const auto report = drift_check(p, eps, sim.k(), 10'000, RngStream(22));
        v.require(report.passed(), name + ": " + std::to_string(report.flagged()) + " pool sizes flagged");
        for (const auto& row : report.rows) rows_tested += row.checked;
    }
    v.require(rows_tested > 0, "no pool size had enough samples to test");
    if (v.passed) v.detail << "3 fixtures, " << rows_tested << " pool sizes tested, 0 flagged";
    return v;
}

Verdict covariance_baseline() {
    Verdict v;
    RngStream::engine_type gen(8);
    std::normal_distribution<double> z(0.0, 5.0);
    double worst = 0.0;
    for (int f = 0; f < 50; ++f) {
        const std::size_t n = 2 + gen() % 30;
        const std::size_t c = 2 + gen() % 30;
        std::vector<double> cells(n * c);
        for (double& x : cells) x = z(gen);
        const ErrorMatrix m(n, c, cells, LossKind::real);
        const double naive = naive_covariance_mean(m);
        const double rel = std::fabs(covariance_mean(m) - naive) / std::max(std::fabs(naive), 1e-300);
        worst = std::max(worst, rel);
        v.require(rel <= 1e-12, "matrix " + std::to_string(f) + " relative error " + std::to_string(rel));
    }

    const auto m = gen_two_cluster(20, 40);
    const double cov = covariance_mean(m);
    const double scale = mean_row_variance(m);
    const auto k = epsilon_cluster_similarity(deduplicate(m), Epsilon::parse("0.9"), 0.0).k();
    v.require(k == 11, "k(0.9) = " + std::to_string(k));
    v.require(std::fabs(cov) >= 0.5 * scale, "two_cluster covariance mean " + std::to_string(cov) +
                                                  " is small next to the mean row variance " + std::to_string(scale));
    std::cout << "     info: oracle max relative error " << worst << "; two_cluster covariance mean " << cov
              << ", mean row variance " << scale << ", ratio " << cov / scale << ", case-axis covariance mean "
              << case_axis_covariance_mean(m) << ", k(0.9) = " << k << '\n';
    if (v.passed) v.detail << "covariance mean " << cov << " with k(0.9) = " << k;
    return v;
}

Verdict sweep_pipeline(const fs::path& dir) {
    Verdict v;
    const std::vector<std::vector<std::string>> gens = {
        {"--kind", "clustered", "--n", "80", "--c", "50", "--clusters", "2", "--spread", "0.05", "--seed", "1"},
        {"--kind", "clustered", "--n", "80", "--c", "50", "--clusters", "5", "--spread", "0.1", "--seed", "2"},
        {"--kind", "clustered", "--n", "80", "--c", "50", "--clusters", "16", "--spread", "0.2", "--seed", "3"},
        {"--kind", "random_uniform", "--n", "80", "--c", "50", "--seed", "4"},
    };
    for (std::size_t g = 0; g < gens.size(); ++g) {
        std::vector<std::string> args{"genpop"};
        args.insert(args.end(), gens[g].begin(), gens[g].end());
        args.insert(args.end(), {"--out", (dir / ("gen_" + std::to_string(g) + ".csv")).string()});
        v.require(cli(args).code == 0, "genpop failed for generation " + std::to_string(g));
    }
    const auto run = cli({"sweep-run", dir.string(), "--require-exact"});
    v.require(run.code == 0, "sweep-run exit " + std::to_string(run.code) + ": " + run.err);
    const auto rows = split_lines(run.out);
    v.require(rows.size() == gens.size() + 1, "expected one row per generation");
    if (!v.passed) return v;

    double previous = 1e300;
    for (std::size_t g = 0; g < gens.size(); ++g) {
        v.require(field(rows[g + 1], 0) == std::to_string(g), "generation order");
        const auto single = split_lines(cli({"analyze", (dir / ("gen_" + std::to_string(g) + ".csv")).string()}).out);
        double best = 1e300;
        for (std::size_t j = 1; j < single.size(); ++j) best = std::min(best, std::stod(field(single[j], 6)));
        v.require(std::stod(field(rows[g + 1], 3)) == best, "generation " + std::to_string(g) + " disagrees with analyze");
        const double ratio = std::stod(field(rows[g + 1], 5));
        v.require(ratio <= previous, "ratio rises at generation " + std::to_string(g));
        previous = ratio;
    }
    const auto again = cli({"sweep-run", dir.string(), "--require-exact"});
    v.require(again.out == run.out, "sweep-run output not byte-stable");
    if (v.passed)
        v.detail << "synthetic run of " << gens.size() << " generations, ratios " << field(rows[1], 5) << " -> "
                 << field(rows.back(), 5)
                 << "; published GP-run statistics need external evolution runs and are not reproduced";
    return v;
}

Verdict performance(const fs::path& dir) {
    Verdict v;
    const auto matrix = (dir / "uniform_1000x200.csv").string();
    v.require(cli({"genpop", "--kind", "random_uniform", "--n", "1000", "--c", "200", "--levels", "4", "--seed", "10",
                   "--out", matrix})
                      .code == 0,
              "genpop failed");
    const auto analyze = cli({"analyze", matrix, "--require-exact"});
    v.require(analyze.code == 0, "analyze exit " + std::to_string(analyze.code));
    const auto rows = split_lines(analyze.out);
    v.require(rows.size() == 13, "analyze did not report the full grid");
    for (std::size_t i = 1; i < rows.size(); ++i) v.require(field(rows[i], 3) == "true", "inexact k in row " + std::to_string(i));
    v.require(analyze.seconds < 30.0, "analyze took " + std::to_string(analyze.seconds) + " s");
    const auto simulate = cli({"simulate", matrix, "--trials", "1000", "--seed", "1"});
    v.require(simulate.code == 0, "simulate exit " + std::to_string(simulate.code));
    v.require(simulate.seconds < 30.0, "simulate took " + std::to_string(simulate.seconds) + " s");
    if (v.passed) v.detail << "analyze " << analyze.seconds << " s (all k exact), simulate " << simulate.seconds << " s";
    return v;
}

}  // namespace

int main() {
    const fs::path scratch = fs::temp_directory_path() / "lexdiv_acceptance";
    fs::remove_all(scratch);
    fs::create_directories(scratch / "run");

    struct Criterion {
        int id;
        const char* title;
        double limit_seconds;
        std::function<Verdict()> body;
    };
    const std::vector<Criterion> criteria = {
        {1, "oracle equivalence of lexicase selection", 60, oracle_equivalence},
        {2, "clique form equals set form of similarity", 60, definition_equivalence},
        {3, "runtime bound holds empirically", 300, bound_holds},
        {4, "adversarial lower bound", 0, adversarial_lower_bound},
        {5, "two-cluster counterexample", 0, two_cluster_counterexample},
        {6, "monotonicity and term shape", 0, monotone_terms},
        {7, "drift inequality", 0, drift_inequality},
        {8, "covariance baseline", 0, covariance_baseline},
        {9, "run-directory pipeline (desk-scale substitute)", 0, [&] { return sweep_pipeline(scratch / "run"); }},
        {10, "performance envelope", 0, [&] { return performance(scratch); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = Clock::now();
        Verdict v;
        try {
            v = c.body();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double elapsed = seconds_since(start);
        if (c.limit_seconds > 0 && elapsed >= c.limit_seconds)
            v.require(false, "took " + std::to_string(elapsed) + " s, limit " + std::to_string(c.limit_seconds) + " s");
        failures += !v.passed;
        std::printf("[%s] %2d %s (%.1f s): %s\n", v.passed ? "PASS" : "FAIL", c.id, c.title, elapsed,
                    v.detail.str().c_str());
        std::fflush(stdout);
    }
    fs::remove_all(scratch);
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
