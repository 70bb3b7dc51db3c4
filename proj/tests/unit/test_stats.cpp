#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "glauber/stats.hpp"

using namespace glauber;
using doctest::Approx;

TEST_CASE("normal quantiles") {
    CHECK(normal_quantile_two_sided(0.99) == Approx(2.5758293).epsilon(1e-6));
    CHECK(normal_quantile_two_sided(0.95) == Approx(1.9599640).epsilon(1e-6));
    CHECK_THROWS_AS(normal_quantile_two_sided(1.0), std::invalid_argument);
}

TEST_CASE("Wilson interval") {
    Interval ci = wilson_interval(50, 100, 0.95);
    CHECK(ci.lo == Approx(0.4038).epsilon(1e-3));
    CHECK(ci.hi == Approx(0.5962).epsilon(1e-3));
    Interval z = wilson_interval(0, 10);
    CHECK(z.lo == Approx(0.0).epsilon(1e-15));
    CHECK(z.hi > 0.0);
    Interval one = wilson_interval(10, 10);
    CHECK(one.hi == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(wilson_interval(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(wilson_interval(3, 2), std::invalid_argument);
}

TEST_CASE("proportion from indicators") {
    std::vector<char> v{1, 0, 1, 1};
    Proportion p = estimate_proportion(v);
    CHECK(p.successes == 3);
    CHECK(p.trials == 4);
    CHECK(p.estimate == Approx(0.75));
    CHECK(p.ci.lo <= 0.75);
    CHECK(p.ci.hi >= 0.75);
}

TEST_CASE("TV lower bound from a statistic") {
    std::vector<char> a(1000, 0), b(1000, 0);
    for (std::size_t i = 0; i < 1000; i += 3) a[i] = b[i] = 1;
    auto same = tv_lower_bound_from_statistic(a, b);
    CHECK(same.L == 0.0);
    CHECK(same.ci.lo <= 0.0);

    std::vector<char> ones(1000, 1), zeros(1000, 0);
    auto apart = tv_lower_bound_from_statistic(ones, zeros);
    CHECK(apart.L == Approx(1.0));
    CHECK(apart.ci.hi - apart.ci.lo < 0.02);

    auto exact = tv_lower_bound_from_statistic(ones, 0.25);
    CHECK(exact.L == Approx(0.75));
    CHECK(exact.p2 == 0.25);

    std::vector<char> none;
    CHECK_THROWS_AS(tv_lower_bound_from_statistic(none, b), std::invalid_argument);
    CHECK_THROWS_AS(tv_lower_bound_from_statistic(none, 0.5), std::invalid_argument);
}

TEST_CASE("Poisson upper tail") {
    CHECK(poisson_upper_tail(1, 1.0) == Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(poisson_upper_tail(3, 1.0) == Approx(1.0 - std::exp(-1.0) * 2.5).epsilon(1e-12));
    CHECK(poisson_upper_tail(0, 2.0) == Approx(1.0));
    CHECK(poisson_upper_tail(4, 0.0) == 0.0);
    // Deep tail stays accurate (no cancellation).
    const double t = 0.01;
    double direct = 0.0, term = std::exp(-t);
    for (int k = 1; k <= 30; ++k) {
        term *= t / k;
        if (k >= 6) direct += term;
    }
    CHECK(poisson_upper_tail(6, t) == Approx(direct).epsilon(1e-9));
}
