#include <doctest.h>

#include "lexdiv/bounds.hpp"
#include "lexdiv/popgen.hpp"

using namespace lexdiv;

TEST_CASE("theorem bound arithmetic") {
    CHECK(theorem_bound(1000, 100, Epsilon::parse("0.25"), 5) == 17000.0);
    CHECK(theorem_bound(4, 4, Epsilon::parse("1"), 2) == 32.0);
    CHECK_THROWS_AS(theorem_bound(4, 4, Epsilon::parse("0"), 2), InputError);
    CHECK_THROWS_AS(theorem_bound(4, 4, Epsilon::parse("1.5"), 2), InputError);
    CHECK_THROWS_AS(theorem_bound(4, 4, Epsilon::parse("0.5"), 1), InputError);
}

TEST_CASE("report ratio against the worst case") {
    SimilarityResult s;
    s.epsilon = Epsilon::parse("0.25");
    s.alpha_lower = s.alpha_upper = 4;
    s.k_lower = s.k_upper = 5;
    std::vector<double> zeros(1000 * 100, 0.0);
    for (std::size_t i = 0; i < 1000; ++i) zeros[i * 100] = static_cast<double>(i);
    const auto profile = deduplicate(ErrorMatrix(1000, 100, zeros, LossKind::discrete));
    const auto r = make_bound_report(profile, s);
    CHECK(r.total == 17000.0);
    CHECK(r.term_pool == 16000.0);
    CHECK(r.term_cases == 1000.0);
    CHECK(r.worst_case == 100000.0);
    CHECK(r.ratio == doctest::Approx(0.17));
}

TEST_CASE("two-triangle sweep") {
    const auto p = deduplicate(gen_two_cluster(6, 10));
    const auto grid = default_epsilon_grid();
    const auto reports = sweep(p, grid, 0.0);
    REQUIRE(reports.size() == 12);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& e = grid[i];
        CHECK(reports[i].epsilon == e);
        CHECK(reports[i].exact_k);
        CHECK(reports[i].k == similarity_bruteforce(p, e, 0.0));
        CHECK(reports[i].total == reports[i].term_pool + reports[i].term_cases);
        CHECK(reports[i].ratio > 0.0);
        if (i > 0) {
            CHECK(reports[i].term_pool < reports[i - 1].term_pool);
            CHECK(reports[i].term_cases >= reports[i - 1].term_cases);
        }
    }
    CHECK(reports[0].k == 2);
    CHECK(reports[9].k == 4);

    // Exhaustive minimum over the grid.
    const auto best = best_epsilon(reports);
    for (const auto& r : reports) CHECK(best.total <= r.total);
    CHECK(best.epsilon == Epsilon::parse("0.6"));
}

TEST_CASE("singleton profile") {
    const auto p = deduplicate(ErrorMatrix(1, 7, std::vector<double>(7, 1.0), LossKind::discrete));
    for (const auto& r : sweep(p, default_epsilon_grid(), 0.0)) {
        CHECK(r.k == 2);
        CHECK(r.total == doctest::Approx(4.0 / r.epsilon.value() + 4.0 * 7));
    }
}

TEST_CASE("best epsilon") {
    const auto p = deduplicate(gen_two_cluster(6, 10));
    const auto one = sweep(p, std::vector<Epsilon>{Epsilon::parse("0.3")}, 0.0);
    CHECK(best_epsilon(one).epsilon == Epsilon::parse("0.3"));
    CHECK_THROWS_AS(best_epsilon(std::vector<BoundReport>{}), InputError);

    // Every pair differs everywhere, so k stays 2 and the largest epsilon wins.
    const auto distinct = deduplicate(ErrorMatrix(3, 2, {0, 0, 1, 1, 2, 2}, LossKind::discrete));
    const auto reports = sweep(distinct, default_epsilon_grid(), 0.0);
    for (const auto& r : reports) CHECK(r.k == 2);
    CHECK(best_epsilon(reports).epsilon == Epsilon::parse("0.6"));
    CHECK(best_epsilon(reports).total == doctest::Approx(4.0 * 3 / 0.6 + 4.0 * 2));
}

TEST_CASE("ties go to the smaller epsilon") {
    BoundReport a;
    a.epsilon = Epsilon::parse("0.2");
    a.total = 10.0;
    BoundReport b = a;
    b.epsilon = Epsilon::parse("0.4");
    CHECK(best_epsilon(std::vector<BoundReport>{b, a}).epsilon == Epsilon::parse("0.2"));
}

TEST_CASE("report serialisation") {
    const auto p = deduplicate(gen_two_cluster(6, 10));
    const auto reports = sweep(p, std::vector<Epsilon>{Epsilon::parse("0.5")}, 0.0);
    CHECK(reports_to_csv(reports) ==
          "epsilon,delta,k,exact_k,term_pool,term_cases,total,worst_case,ratio\n"
          "0.5,0,4,true,48,80,128,60,2.1333333333333333\n");
    const auto j = reports_to_json(reports);
    REQUIRE(j.size() == 1);
    CHECK(j[0]["k"] == 4);
    CHECK(j[0]["epsilon_exact"] == "0.5");
    CHECK(j[0]["total"] == 128.0);
}
