#include "glauber/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace glauber {

double normal_quantile_two_sided(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("confidence must lie in (0, 1)");
    boost::math::normal_distribution<double> std_normal;
    return boost::math::quantile(std_normal, 0.5 + 0.5 * confidence);
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double confidence) {
    if (trials == 0) throw std::invalid_argument("wilson interval needs at least one trial");
    if (successes > trials) throw std::invalid_argument("successes exceed trials");
    const double z = normal_quantile_two_sided(confidence);
    const double n = double(trials);
    const double p = double(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (successes == 0) ci.lo = 0.0;
    if (successes == trials) ci.hi = 1.0;
    return ci;
}

Proportion estimate_proportion(std::size_t successes, std::size_t trials, double confidence) {
    Proportion out;
    out.successes = successes;
    out.trials = trials;
    out.ci = wilson_interval(successes, trials, confidence);
    out.estimate = double(successes) / double(trials);
    return out;
}

Proportion estimate_proportion(std::span<const char> indicators, double confidence) {
    std::size_t s = 0;
    for (char c : indicators) s += c != 0;
    return estimate_proportion(s, indicators.size(), confidence);
}

namespace {

Interval abs_difference(Interval a, Interval b) {
    const double d_lo = a.lo - b.hi;
    const double d_hi = a.hi - b.lo;
    Interval out;
    if (d_lo > 0) out.lo = d_lo;
    else if (d_hi < 0) out.lo = -d_hi;
    else out.lo = 0.0;
    out.hi = std::min(1.0, std::max(std::abs(d_lo), std::abs(d_hi)));
    return out;
}

}  // namespace

TVLowerBound tv_lower_bound_from_counts(std::size_t succ_a, std::size_t n_a, std::size_t succ_b,
                                        std::size_t n_b, double confidence) {
    if (n_a == 0 || n_b == 0) throw std::invalid_argument("tv lower bound needs nonzero replicas");
    const double per_arm = 0.5 * (1.0 + confidence);
    TVLowerBound out;
    out.p1 = double(succ_a) / double(n_a);
    out.p2 = double(succ_b) / double(n_b);
    out.L = std::abs(out.p1 - out.p2);
    out.ci = abs_difference(wilson_interval(succ_a, n_a, per_arm), wilson_interval(succ_b, n_b, per_arm));
    return out;
}

TVLowerBound tv_lower_bound_from_statistic(std::span<const char> samples_a,
                                           std::span<const char> samples_b, double confidence) {
    std::size_t a = 0, b = 0;
    for (char c : samples_a) a += c != 0;
    for (char c : samples_b) b += c != 0;
    return tv_lower_bound_from_counts(a, samples_a.size(), b, samples_b.size(), confidence);
}

TVLowerBound tv_lower_bound_from_statistic(std::span<const char> samples_a, double reference_p,
                                           double confidence) {
    if (samples_a.empty()) throw std::invalid_argument("tv lower bound needs nonzero replicas");
    if (!(reference_p >= 0.0 && reference_p <= 1.0))
        throw std::invalid_argument("reference probability must lie in [0, 1]");
    std::size_t a = 0;
    for (char c : samples_a) a += c != 0;
    TVLowerBound out;
    out.p1 = double(a) / double(samples_a.size());
    out.p2 = reference_p;
    out.L = std::abs(out.p1 - out.p2);
    out.ci = abs_difference(wilson_interval(a, samples_a.size(), confidence), {reference_p, reference_p});
    return out;
}

double poisson_upper_tail(unsigned r, double t) {
    if (r == 0) return 1.0;
    if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
    if (t == 0.0) return 0.0;
    return boost::math::gamma_p(double(r), t);
}

}  // namespace glauber
