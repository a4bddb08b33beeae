#include "lexdiv/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexdiv/bounds.hpp"
#include "lexdiv/csv_io.hpp"
#include "lexdiv/diversity.hpp"
#include "lexdiv/engine.hpp"
#include "lexdiv/popgen.hpp"
#include "lexdiv/simulate.hpp"
#include "lexdiv/verify.hpp"

namespace lexdiv {

namespace {

namespace fs = std::filesystem;

constexpr const char* kSeedVariable = "LEXDIV_SEED";

struct AnalysisFlags {
    std::string epsilon;
    std::string epsilon_grid = "0.05:0.60:0.05";
    std::optional<double> delta;
    std::uint64_t budget = kDefaultNodeBudget;
    std::string kind;
    bool require_exact = false;

    void attach(CLI::App& cmd) {
        cmd.add_option("--epsilon", epsilon, "Single epsilon instead of a grid");
        cmd.add_option("--epsilon-grid", epsilon_grid, "Grid lo:hi:step")->capture_default_str();
        cmd.add_option("--delta", delta, "Loss tolerance for real-valued matrices");
        cmd.add_option("--budget", budget, "Clique search node budget")->capture_default_str();
        cmd.add_option("--kind", kind, "Loss kind override")->check(CLI::IsMember({"discrete", "real"}));
        cmd.add_flag("--require-exact", require_exact, "Exit 3 if any k is only bracketed");
    }

    std::vector<Epsilon> grid() const {
        if (!epsilon.empty()) return {Epsilon::parse(epsilon)};
        return parse_epsilon_grid(epsilon_grid);
    }

    std::optional<LossKind> loss_kind() const {
        if (kind.empty()) return std::nullopt;
        return parse_loss_kind(kind);
    }
};

ErrorMatrix load_matrix(const std::string& path, std::optional<LossKind> kind) {
    if (!fs::exists(path)) throw InputError(path + ": no such file");
    return read_matrix_csv(path, kind);
}

/// Deduplicated profile plus the delta the distance must use.
std::pair<DedupProfile, double> analysis_profile(const ErrorMatrix& matrix, std::optional<double> delta) {
    if (matrix.kind() == LossKind::real) {
        if (!delta) throw InputError("--delta is required for real-valued losses");
        validate_delta(matrix, *delta);
        return {DedupProfile::identity(matrix), *delta};
    }
    const double d = delta.value_or(0.0);
    validate_delta(matrix, d);
    return {deduplicate(matrix), d};
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InputError(path + ": cannot open for writing");
    file << text;
    if (!file) throw InputError(path + ": write failed");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    const char* env = std::getenv(kSeedVariable);
    if (env == nullptr || *env == '\0') return 0;
    std::uint64_t seed = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, seed);
    if (ec != std::errc() || ptr != end) throw InputError(std::string(kSeedVariable) + " is not an unsigned integer");
    return seed;
}

bool any_inexact(const std::vector<BoundReport>& reports) {
    return std::any_of(reports.begin(), reports.end(), [](const BoundReport& r) { return !r.exact_k; });
}

int cmd_analyze(const std::string& path, const AnalysisFlags& flags, const std::string& format,
                const std::string& out_path, std::ostream& out, std::ostream& err) {
    const ErrorMatrix matrix = load_matrix(path, flags.loss_kind());
    const auto [profile, delta] = analysis_profile(matrix, flags.delta);
    const auto grid = flags.grid();
    const auto reports = sweep(profile, grid, delta, flags.budget);
    emit(format == "json" ? reports_to_json(reports).dump(2) + "\n" : reports_to_csv(reports), out_path, out);
    if (flags.require_exact && any_inexact(reports)) {
        err << "clique search budget exhausted; k is bracketed for at least one epsilon\n";
        return kExitBudget;
    }
    return kExitOk;
}

struct Generation {
    std::uint64_t index;
    fs::path path;
};

std::vector<Generation> list_generations(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InputError(dir.string() + ": not a directory");
    static const std::regex pattern(R"(gen_(\d+)\.csv)");
    std::vector<Generation> gens;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (!entry.is_regular_file() || !std::regex_match(name, m, pattern)) continue;
        std::uint64_t index = 0;
        const std::string digits = m[1].str();
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
        if (ec != std::errc() || ptr != digits.data() + digits.size())
            throw InputError(name + ": generation index out of range");
        gens.push_back({index, entry.path()});
    }
    if (gens.empty()) throw InputError(dir.string() + ": no gen_<index>.csv files");
    std::sort(gens.begin(), gens.end(), [](const Generation& a, const Generation& b) { return a.index < b.index; });
    for (std::size_t i = 1; i < gens.size(); ++i)
        if (gens[i].index == gens[i - 1].index)
            throw InputError(dir.string() + ": generation " + std::to_string(gens[i].index) + " appears twice");
    return gens;
}

int cmd_sweep_run(const std::string& dir, const AnalysisFlags& flags, const std::string& format,
                  const std::string& out_path, std::ostream& out, std::ostream& err) {
    const auto gens = list_generations(dir);
    auto kind = flags.loss_kind();
    if (!kind) kind = read_descriptor(fs::path(dir) / "descriptor.json");
    const auto grid = flags.grid();

    std::ostringstream csv;
    csv << "generation,best_epsilon,k,total,worst_case,ratio\n";
    nlohmann::json rows = nlohmann::json::array();
    std::optional<std::size_t> n_cases;
    bool inexact = false;
    for (const auto& gen : gens) {
        // Kind is resolved per directory, so the per-file sidecar lookup is bypassed.
        const ErrorMatrix matrix = kind ? read_matrix_csv(gen.path, kind) : load_matrix(gen.path.string(), std::nullopt);
        if (n_cases && *n_cases != matrix.n_cases())
            throw InputError(gen.path.string() + ": " + std::to_string(matrix.n_cases()) + " cases, expected " +
                             std::to_string(*n_cases));
        n_cases = matrix.n_cases();
        const auto [profile, delta] = analysis_profile(matrix, flags.delta);
        const auto reports = sweep(profile, grid, delta, flags.budget);
        inexact = inexact || any_inexact(reports);
        const BoundReport best = best_epsilon(reports);
        csv << gen.index << ',' << best.epsilon.to_string() << ',' << best.k << ',' << format_double(best.total) << ','
            << format_double(best.worst_case) << ',' << format_double(best.ratio) << '\n';
        rows.push_back({{"generation", gen.index},
                        {"best_epsilon", best.epsilon.value()},
                        {"best_epsilon_exact", best.epsilon.to_string()},
                        {"k", best.k},
                        {"exact_k", best.exact_k},
                        {"total", best.total},
                        {"worst_case", best.worst_case},
                        {"ratio", best.ratio}});
    }
    emit(format == "json" ? rows.dump(2) + "\n" : csv.str(), out_path, out);
    if (flags.require_exact && inexact) {
        err << "clique search budget exhausted in at least one generation\n";
        return kExitBudget;
    }
    return kExitOk;
}

struct SimulateFlags {
    std::uint64_t trials = 10'000;
    std::optional<std::uint64_t> seed;
    std::string binarize = "mad";
    bool check_bound = false;
    bool drift = false;
    std::uint64_t drift_min_samples = kDefaultDriftMinSamples;
};

int cmd_simulate(const std::string& path, const AnalysisFlags& analysis, const SimulateFlags& flags,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
    if (flags.trials == 0) throw InputError("--trials must be at least 1");
    const ErrorMatrix raw = load_matrix(path, analysis.loss_kind());
    const std::uint64_t seed = resolve_seed(flags.seed);

    // Selection needs discrete losses; real matrices go through static epsilon-lexicase first.
    ErrorMatrix matrix = raw;
    if (raw.kind() == LossKind::real) {
        std::vector<double> thresholds;
        if (flags.binarize == "mad") {
            thresholds = mad_thresholds(raw);
        } else {
            if (!analysis.delta) throw InputError("--binarize delta needs --delta");
            validate_delta(raw, *analysis.delta);
            thresholds.assign(raw.n_cases(), *analysis.delta);
        }
        matrix = static_epsilon_binarize(raw, thresholds);
    }
    const DedupProfile profile = deduplicate(matrix);
    const RunStats stats = estimate_runtime(profile, flags.trials, RngStream(seed));

    nlohmann::json doc = to_json(stats);
    doc["seed"] = seed;
    doc["n_unique"] = profile.n_unique();
    doc["n_original"] = profile.n_original();
    doc["n_cases"] = profile.n_cases();
    if (raw.kind() == LossKind::real) doc["binarize"] = flags.binarize;

    int status = kExitOk;
    const double upper = stats.mean_evaluations + 3.0 * stats.std_error;
    std::vector<BoundReport> reports;
    if (flags.check_bound || flags.drift) reports = sweep(profile, analysis.grid(), 0.0, analysis.budget);

    if (flags.check_bound) {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& r : reports) {
            const bool holds = upper <= r.total;
            checks.push_back({{"epsilon", r.epsilon.value()},
                              {"epsilon_exact", r.epsilon.to_string()},
                              {"k", r.k},
                              {"exact_k", r.exact_k},
                              {"bound", r.total},
                              {"mean_plus_3se", upper},
                              {"holds", holds}});
            if (!holds) {
                err << "bound violated at epsilon " << r.epsilon.to_string() << ": mean + 3 SE = " << upper << " > "
                    << r.total << '\n';
                status = kExitViolation;
            }
        }
        doc["bound_check"] = checks;
    }
    if (flags.drift) {
        nlohmann::json drift = nlohmann::json::array();
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const auto report = drift_check(profile, reports[i].epsilon, reports[i].k, flags.trials,
                                            RngStream(seed, i + 1), flags.drift_min_samples);
            if (!report.passed()) {
                err << "drift inequality fails at " << report.flagged() << " pool sizes for epsilon "
                    << report.epsilon.to_string() << '\n';
                status = kExitViolation;
            }
            drift.push_back(to_json(report));
        }
        doc["drift"] = drift;
    }
    if (analysis.require_exact && any_inexact(reports)) {
        emit(doc.dump(2) + "\n", out_path, out);
        err << "clique search budget exhausted; k is bracketed for at least one epsilon\n";
        return kExitBudget;
    }
    emit(doc.dump(2) + "\n", out_path, out);
    return status;
}

struct GenpopFlags {
    std::string spec_path;
    std::string kind;
    std::size_t n = 0;
    std::size_t c = 0;
    std::size_t levels = 4;
    std::size_t clusters = 2;
    double spread = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> jitter;
};

int cmd_genpop(const GenpopFlags& flags, const std::string& out_path, std::ostream& out) {
    GenSpec spec;
    if (!flags.spec_path.empty()) {
        std::ifstream file(flags.spec_path);
        if (!file) throw InputError(flags.spec_path + ": cannot open");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(file);
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError(flags.spec_path + ": " + e.what());
        }
        spec = genspec_from_json(j);
    } else {
        if (flags.kind.empty()) throw InputError("genpop needs --spec or --kind");
        spec.kind = parse_gen_kind(flags.kind);
        spec.n = flags.n;
        spec.c = flags.c;
        spec.levels = flags.levels;
        spec.clusters = flags.clusters;
        spec.spread = flags.spread;
        spec.seed = flags.seed;
    }
    ErrorMatrix matrix = generate(spec);
    if (flags.jitter) matrix = add_jitter(matrix, *flags.jitter, RngStream(spec.seed, 1));
    emit(write_matrix_csv(matrix), out_path, out);
    return kExitOk;
}

int cmd_verify(const std::string& level, const std::string& fault, std::ostream& out) {
    const auto report = run_verify(level == "full" ? VerifyLevel::full : VerifyLevel::fast,
                                   fault == "elite-filter" ? FilterFault::keep_worst : FilterFault::none, &out);
    const auto passed = std::count_if(report.checks.begin(), report.checks.end(),
                                      [](const CheckResult& c) { return c.passed; });
    out << "verify " << level << ": " << passed << '/' << report.checks.size() << " checks passed\n";
    return report.passed() ? kExitOk : kExitViolation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Lexicase selection runtime and epsilon-cluster similarity toolkit", "lexdiv");
    app.require_subcommand(1);

    std::string input;
    std::string format = "csv";
    std::string out_path;
    AnalysisFlags analysis;

    auto* analyze = app.add_subcommand("analyze", "Similarity and runtime bound over an epsilon grid");
    analyze->add_option("matrix", input, "Error matrix CSV")->required();
    analysis.attach(*analyze);
    analyze->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    analyze->add_option("--out", out_path, "Output file (default stdout)");

    auto* sweep_run = app.add_subcommand("sweep-run", "Best-epsilon bound ratio per generation of a run directory");
    sweep_run->add_option("directory", input, "Directory with gen_<index>.csv files")->required();
    analysis.attach(*sweep_run);
    sweep_run->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sweep_run->add_option("--out", out_path, "Output file (default stdout)");

    SimulateFlags sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo evaluation count of lexicase selection");
    simulate->add_option("matrix", input, "Error matrix CSV")->required();
    analysis.attach(*simulate);
    simulate->add_option("--trials", sim.trials, "Number of selections")->capture_default_str();
    simulate->add_option("--seed", sim.seed, std::string("Master seed (default: $") + kSeedVariable + " or 0)");
    simulate->add_option("--binarize", sim.binarize, "Threshold rule for real losses")
        ->check(CLI::IsMember({"mad", "delta"}))
        ->capture_default_str();
    simulate->add_flag("--check-bound", sim.check_bound, "Exit 1 if mean + 3 SE exceeds the bound");
    simulate->add_flag("--drift", sim.drift, "Tabulate the one-step pool shrinkage");
    simulate->add_option("--drift-min-samples", sim.drift_min_samples, "Observations needed to test a pool size")
        ->capture_default_str();
    simulate->add_option("--out", out_path, "Output file (default stdout)");

    GenpopFlags gen;
    auto* genpop = app.add_subcommand("genpop", "Write a synthetic population as CSV");
    genpop->add_option("--spec", gen.spec_path, "Generator spec JSON file");
    genpop->add_option("--kind", gen.kind, "adversarial, log_binary, two_cluster, random_uniform, clustered");
    genpop->add_option("--n", gen.n, "Individuals");
    genpop->add_option("--c", gen.c, "Cases");
    genpop->add_option("--levels", gen.levels, "Loss levels")->capture_default_str();
    genpop->add_option("--clusters", gen.clusters, "Cluster count")->capture_default_str();
    genpop->add_option("--spread", gen.spread, "Within-cluster spread fraction")->capture_default_str();
    genpop->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    genpop->add_option("--jitter", gen.jitter, "Add uniform [0, delta/4] noise, producing real losses");
    genpop->add_option("--out", out_path, "Output file (default stdout)");

    std::string level = "fast";
    std::string fault = "none";
    auto* verify = app.add_subcommand("verify", "Run the built-in self-check");
    verify->add_option("--level", level)->check(CLI::IsMember({"fast", "full"}))->capture_default_str();
    verify->add_option("--inject-fault", fault, "Negative control")
        ->check(CLI::IsMember({"none", "elite-filter"}))
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInput;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(input, analysis, format, out_path, out, err);
        if (sweep_run->parsed()) return cmd_sweep_run(input, analysis, format, out_path, out, err);
        if (simulate->parsed()) return cmd_simulate(input, analysis, sim, out_path, out, err);
        if (genpop->parsed()) return cmd_genpop(gen, out_path, out);
        if (verify->parsed()) return cmd_verify(level, fault, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace lexdiv
