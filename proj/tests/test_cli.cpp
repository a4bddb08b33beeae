#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lexdiv/cli.hpp"
#include "lexdiv/csv_io.hpp"
#include "lexdiv/diversity.hpp"
#include "lexdiv/popgen.hpp"

using namespace lexdiv;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("lexdiv_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string column(const std::string& line, std::size_t index) {
    std::istringstream in(line);
    std::string cell;
    for (std::size_t i = 0; i <= index; ++i) std::getline(in, cell, ',');
    return cell;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("genpop writes the constructions") {
    auto r = cli({"genpop", "--kind", "adversarial", "--n", "3", "--c", "2"});
    CHECK(r.code == 0);
    CHECK(r.out == "case_0,case_1\n0,0\n1,0\n2,0\n");

    r = cli({"genpop", "--kind", "log_binary", "--n", "4", "--c", "3"});
    CHECK(r.out == "case_0,case_1,case_2\n0,0,0\n0,1,0\n1,0,0\n1,1,0\n");

    CHECK(cli({"genpop", "--kind", "log_binary", "--n", "5", "--c", "3"}).code == 2);
    CHECK(cli({"genpop", "--kind", "bogus", "--n", "5", "--c", "3"}).code == 2);
    CHECK(cli({"genpop"}).code == 2);
}

TEST_CASE("genpop output is byte-stable") {
    const auto dir = scratch("genpop");
    write(dir / "spec.json", R"({"kind":"clustered","n":40,"c":30,"clusters":4,"spread":0.1,"seed":9})");
    for (const char* name : {"a.csv", "b.csv"})
        REQUIRE(cli({"genpop", "--spec", (dir / "spec.json").string(), "--out", (dir / name).string()}).code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(read_matrix_csv(dir / "a.csv") == parse_matrix_csv(slurp(dir / "b.csv")));
    write(dir / "bad.json", R"({"kind":"clustered"})");
    CHECK(cli({"genpop", "--spec", (dir / "bad.json").string()}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("analyze the two-triangle population") {
    const auto dir = scratch("analyze");
    const auto matrix = (dir / "tri.csv").string();
    REQUIRE(cli({"genpop", "--kind", "two_cluster", "--n", "6", "--c", "10", "--out", matrix}).code == 0);

    const auto r = cli({"analyze", matrix});
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 13);
    CHECK(rows[0] == "epsilon,delta,k,exact_k,term_pool,term_cases,total,worst_case,ratio");
    const auto profile = deduplicate(read_matrix_csv(matrix));
    const auto grid = default_epsilon_grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(column(rows[i + 1], 0) == grid[i].to_string());
        CHECK(column(rows[i + 1], 2) == std::to_string(similarity_bruteforce(profile, grid[i], 0.0)));
    }
    CHECK(column(rows[10], 2) == "4");

    const auto single = cli({"analyze", matrix, "--epsilon", "0.25"});
    CHECK(lines(single.out).size() == 2);

    const auto json = cli({"analyze", matrix, "--epsilon", "0.5", "--format", "json"});
    const auto doc = nlohmann::json::parse(json.out);
    CHECK(doc[0]["k"] == 4);

    CHECK(cli({"analyze", matrix, "--out", (dir / "report.csv").string()}).out.empty());
    CHECK(slurp(dir / "report.csv") == r.out);
    fs::remove_all(dir);
}

TEST_CASE("analyze error contract") {
    const auto dir = scratch("errors");
    write(dir / "bad.csv", "1,2,3\n4,5\n");
    auto r = cli({"analyze", (dir / "bad.csv").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("bad.csv:2") != std::string::npos);

    CHECK(cli({"analyze", (dir / "missing.csv").string()}).code == 2);
    CHECK(cli({"analyze"}).code == 2);
    CHECK(cli({"analyze", (dir / "bad.csv").string(), "--format", "xml"}).code == 2);

    write(dir / "real.csv", "0.5,1.5\n0.25,2\n");
    CHECK(cli({"analyze", (dir / "real.csv").string()}).code == 2);
    CHECK(cli({"analyze", (dir / "real.csv").string(), "--delta", "0.1"}).code == 0);
    CHECK(cli({"analyze", (dir / "real.csv").string(), "--delta", "-1"}).code == 2);

    write(dir / "ok.csv", "0,1\n1,0\n");
    CHECK(cli({"analyze", (dir / "ok.csv").string(), "--epsilon", "1.5"}).code == 2);
    CHECK(cli({"analyze", (dir / "ok.csv").string(), "--epsilon-grid", "0.1:0.2"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"analyze", "--help"}).code == 0);
    fs::remove_all(dir);
}

TEST_CASE("require-exact exits 3 when the budget runs out") {
    const auto dir = scratch("budget");
    const auto matrix = (dir / "m.csv").string();
    REQUIRE(cli({"genpop", "--kind", "random_uniform", "--n", "200", "--c", "12", "--levels", "2", "--seed", "3",
                 "--out", matrix})
                .code == 0);
    CHECK(cli({"analyze", matrix, "--budget", "1", "--epsilon", "0.6", "--require-exact"}).code == 3);
    const auto loose = cli({"analyze", matrix, "--budget", "1", "--epsilon", "0.6"});
    CHECK(loose.code == 0);
    CHECK(column(lines(loose.out)[1], 3) == "false");
    fs::remove_all(dir);
}

TEST_CASE("simulate reports run statistics") {
    const auto dir = scratch("simulate");
    const auto adversarial = (dir / "adv.csv").string();
    REQUIRE(cli({"genpop", "--kind", "adversarial", "--n", "4", "--c", "5", "--out", adversarial}).code == 0);
    const auto r = cli({"simulate", adversarial, "--trials", "100000", "--seed", "1"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    const double mean = doc["mean_evaluations"];
    const double se = doc["std_error"];
    CHECK(std::fabs(mean - 12.0) <= 3.0 * se);
    CHECK(doc["seed"] == 1);

    write(dir / "one.csv", "3,4,5\n");
    const auto one = nlohmann::json::parse(cli({"simulate", (dir / "one.csv").string()}).out);
    CHECK(one["mean_evaluations"] == 0.0);

    CHECK(cli({"simulate", adversarial, "--seed", "5"}).out == cli({"simulate", adversarial, "--seed", "5"}).out);
    CHECK(cli({"simulate", adversarial, "--trials", "0"}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("simulate takes the seed from the environment unless given") {
    const auto dir = scratch("seed");
    const auto m = (dir / "m.csv").string();
    REQUIRE(cli({"genpop", "--kind", "random_uniform", "--n", "30", "--c", "10", "--out", m}).code == 0);
    const auto seeded = cli({"simulate", m, "--trials", "500", "--seed", "42"}).out;
    ::setenv("LEXDIV_SEED", "42", 1);
    CHECK(cli({"simulate", m, "--trials", "500"}).out == seeded);
    CHECK(cli({"simulate", m, "--trials", "500", "--seed", "43"}).out != seeded);
    ::setenv("LEXDIV_SEED", "x", 1);
    CHECK(cli({"simulate", m, "--trials", "500"}).code == 2);
    ::unsetenv("LEXDIV_SEED");
    fs::remove_all(dir);
}

TEST_CASE("simulate checks the bound on every fixture kind") {
    const auto dir = scratch("bound");
    const std::vector<std::vector<std::string>> specs = {
        {"--kind", "adversarial", "--n", "20", "--c", "30"},
        {"--kind", "log_binary", "--n", "16", "--c", "30"},
        {"--kind", "two_cluster", "--n", "20", "--c", "40"},
        {"--kind", "random_uniform", "--n", "60", "--c", "40"},
        {"--kind", "clustered", "--n", "60", "--c", "40", "--clusters", "6", "--spread", "0.05"},
    };
    for (const auto& spec : specs) {
        auto args = std::vector<std::string>{"genpop"};
        args.insert(args.end(), spec.begin(), spec.end());
        args.insert(args.end(), {"--out", (dir / "m.csv").string()});
        REQUIRE(cli(args).code == 0);
        const auto r = cli({"simulate", (dir / "m.csv").string(), "--check-bound", "--drift"});
        CAPTURE(spec[1]);
        CHECK(r.code == 0);
        const auto doc = nlohmann::json::parse(r.out);
        CHECK(doc["bound_check"].size() == 12);
        CHECK(doc["drift"].size() == 12);
    }
    fs::remove_all(dir);
}

TEST_CASE("simulate binarizes real-valued losses") {
    const auto dir = scratch("real");
    write(dir / "r.csv", "0.1,0.9,0.5\n0.2,0.1,0.5\n0.9,0.15,0.4\n");
    const auto mad = nlohmann::json::parse(cli({"simulate", (dir / "r.csv").string(), "--trials", "1000"}).out);
    CHECK(mad["binarize"] == "mad");
    CHECK(cli({"simulate", (dir / "r.csv").string(), "--binarize", "delta"}).code == 2);
    CHECK(cli({"simulate", (dir / "r.csv").string(), "--binarize", "delta", "--delta", "0.1"}).code == 0);
    fs::remove_all(dir);
}

TEST_CASE("sweep-run over a run directory") {
    const auto dir = scratch("sweep");
    // Generations drift from tight clusters towards uniform noise.
    const std::vector<std::vector<std::string>> gens = {
        {"--kind", "clustered", "--n", "60", "--c", "40", "--clusters", "2", "--spread", "0.05", "--seed", "1"},
        {"--kind", "clustered", "--n", "60", "--c", "40", "--clusters", "6", "--spread", "0.1", "--seed", "2"},
        {"--kind", "clustered", "--n", "60", "--c", "40", "--clusters", "15", "--spread", "0.2", "--seed", "3"},
        {"--kind", "random_uniform", "--n", "60", "--c", "40", "--seed", "4"},
    };
    const std::vector<std::string> names = {"gen_0.csv", "gen_2.csv", "gen_10.csv", "gen_11.csv"};
    for (std::size_t i = 0; i < gens.size(); ++i) {
        auto args = std::vector<std::string>{"genpop"};
        args.insert(args.end(), gens[i].begin(), gens[i].end());
        args.insert(args.end(), {"--out", (dir / names[i]).string()});
        REQUIRE(cli(args).code == 0);
    }
    write(dir / "notes.txt", "ignored");

    const auto r = cli({"sweep-run", dir.string()});
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "generation,best_epsilon,k,total,worst_case,ratio");
    CHECK(column(rows[1], 0) == "0");
    CHECK(column(rows[2], 0) == "2");
    CHECK(column(rows[3], 0) == "10");
    CHECK(column(rows[4], 0) == "11");

    double previous = 1e300;
    for (std::size_t i = 0; i < names.size(); ++i) {
        // Each row agrees with a standalone analysis of that file.
        const auto single = lines(cli({"analyze", (dir / names[i]).string()}).out);
        double best = 1e300;
        for (std::size_t j = 1; j < single.size(); ++j) best = std::min(best, std::stod(column(single[j], 6)));
        CHECK(std::stod(column(rows[i + 1], 3)) == best);
        const double ratio = std::stod(column(rows[i + 1], 5));
        CHECK(ratio <= previous);
        previous = ratio;
    }

    write(dir / "gen_12.csv", "0,1\n1,0\n");
    CHECK(cli({"sweep-run", dir.string()}).code == 2);
    CHECK(cli({"sweep-run", (dir / "nowhere").string()}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("sweep-run on identical generations gives identical rows") {
    const auto dir = scratch("same");
    for (const char* name : {"gen_0.csv", "gen_1.csv", "gen_2.csv"})
        REQUIRE(cli({"genpop", "--kind", "two_cluster", "--n", "10", "--c", "20", "--out", (dir / name).string()})
                    .code == 0);
    const auto rows = lines(cli({"sweep-run", dir.string()}).out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].substr(1) == rows[2].substr(1));
    CHECK(rows[2].substr(1) == rows[3].substr(1));
    fs::remove_all(dir);
}

TEST_CASE("verify passes and catches an injected fault") {
    const auto good = cli({"verify", "--level", "fast"});
    CHECK(good.code == 0);
    const auto bad = cli({"verify", "--inject-fault", "elite-filter"});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("FAIL lexicase.elite_filter") != std::string::npos);
}
