#pragma once

#include <cstddef>
#include <span>

namespace glauber {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Two-sided standard normal quantile for the given coverage (0.99 -> 2.5758).
double normal_quantile_two_sided(double confidence);

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double confidence = 0.99);

struct Proportion {
    std::size_t successes = 0;
    std::size_t trials = 0;
    double estimate = 0.0;
    Interval ci;
};

Proportion estimate_proportion(std::size_t successes, std::size_t trials, double confidence = 0.99);
Proportion estimate_proportion(std::span<const char> indicators, double confidence = 0.99);

struct TVLowerBound {
    /// |p1 - p2|, a lower bound on the total-variation distance.
    double L = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    /// Conservative: each arm at (1 + confidence)/2, so both hold jointly with
    /// probability >= confidence.
    Interval ci;
};

TVLowerBound tv_lower_bound_from_statistic(std::span<const char> samples_a,
                                           std::span<const char> samples_b,
                                           double confidence = 0.99);
/// Reference probability known exactly; only the first arm is uncertain.
TVLowerBound tv_lower_bound_from_statistic(std::span<const char> samples_a, double reference_p,
                                           double confidence = 0.99);
TVLowerBound tv_lower_bound_from_counts(std::size_t succ_a, std::size_t n_a, std::size_t succ_b,
                                        std::size_t n_b, double confidence = 0.99);

/// Pr(Poisson(t) >= r).
double poisson_upper_tail(unsigned r, double t);

}  // namespace glauber
