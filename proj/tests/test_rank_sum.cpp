#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "sbt/errors.hpp"
#include "sbt/rank_sum.hpp"

using namespace sbt;

// References: scipy.stats.mannwhitneyu, two-sided, asymptotic, continuity corrected.
TEST_CASE("separated samples") {
    const std::vector<double> a{408, 380, 420, 395, 410, 401, 430, 388, 399, 415};
    const std::vector<double> b{194, 170, 184, 201, 210, 188, 199, 176, 205, 190};
    const auto r = rank_sum_test(a, b);
    CHECK(r.u == 100.0);
    CHECK(r.p_value == doctest::Approx(0.00018267179110955002).epsilon(1e-12));
    CHECK(r.z > 0.0);
    const auto flipped = rank_sum_test(b, a);
    CHECK(flipped.u == 0.0);
    CHECK(flipped.p_value == doctest::Approx(r.p_value).epsilon(1e-12));
}

TEST_CASE("ties use average ranks") {
    const std::vector<double> a{1, 2, 2, 3, 3, 3, 4};
    const std::vector<double> b{2, 3, 4, 4, 5, 5};
    const auto r = rank_sum_test(a, b);
    CHECK(r.u == 8.5);
    CHECK(r.p_value == doctest::Approx(0.07826242947714618).epsilon(1e-12));
}

TEST_CASE("unequal sizes") {
    const std::vector<double> a{1.5, 2.5, 0.5};
    const std::vector<double> b{1, 2, 3, 4};
    const auto r = rank_sum_test(a, b);
    CHECK(r.u == 3.0);
    CHECK(r.p_value == doctest::Approx(0.376759117811582).epsilon(1e-12));
}

TEST_CASE("degenerate inputs") {
    const std::vector<double> same{2, 2, 2};
    CHECK(rank_sum_test(same, same).p_value == 1.0);
    CHECK_THROWS_AS(rank_sum_test(std::vector<double>{}, same), ConfigError);
}

TEST_CASE("median") {
    CHECK(median(std::vector<double>{3, 1, 2}) == 2.0);
    CHECK(median(std::vector<double>{4, 1, 3, 2}) == 2.5);
    CHECK(median(std::vector<double>{7}) == 7.0);
    CHECK_THROWS_AS(median(std::vector<double>{}), ConfigError);
}
