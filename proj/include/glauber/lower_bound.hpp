#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glauber/coupling.hpp"
#include "glauber/dynamics.hpp"
#include "glauber/stats.hpp"

namespace glauber {

struct LowerBoundParams {
    std::size_t n = 0;
    std::size_t delta = 0;
    int R = 0;
    double T = 0.0;
    double eps = 0.0;
    /// ceil(n / Delta^{2R}) and ceil(n / Delta^{3R}).
    std::size_t target_centers = 0;
    std::size_t case1_min_centers = 0;
};

/// R = ceil(ln n/(4 ln Delta)), T = ln n/(8 e Delta ln Delta), eps = 1/(4 e^{2T}).
/// Requires Delta >= 2.
LowerBoundParams lower_bound_params(std::size_t n, std::size_t delta);

/// Threshold: mu - eps above 1/2, mu + eps below, 1/2 at 1/2.
double mu_hat(double mu, double eps);
/// mu + (1 - mu) exp(-T/(1 - mu)).
double center_occupancy_bound(double mu, double t);

enum class PlanCase { case1, case2 };

/// Conditioned law of one ball B_{R-1}(v) given the spins outside it.
struct BallTable {
    Vertex center = 0;
    std::vector<Vertex> sites;
    std::vector<Configuration> states;
    /// Normalized weights.
    std::vector<double> weights;
    /// Position of the center inside `sites`.
    std::size_t center_pos = 0;
    SpinMask feasible_center_spins = 0;
};

struct LowerBoundPlan {
    LowerBoundParams params;
    PlanCase plan_case = PlanCase::case1;
    std::vector<Vertex> centers;
    std::vector<SpinMask> q_sets;
    /// Full configuration whose restriction to U is sigma_U.
    Configuration base;
    /// Sites at distance >= R from the centers.
    VertexSet u;
    std::vector<BallTable> balls;
    std::vector<double> mu_v;
    double mu = 0.0;
    double mu_hat = 0.0;
    /// True once X_0 is required to avoid Q_v at every center.
    bool flipped = false;
    bool oriented = false;
    /// Case 2: a site whose radius-R ball is frozen under sigma_U.
    std::optional<Vertex> witness;
    std::string note;
};

struct PlanOptions {
    /// Degree bound used in the formulas; 0 means the graph's max degree.
    std::size_t delta = 0;
    std::optional<int> r_override;
    std::size_t ball_cap = 100'000;
    /// Replace the greedy sigma_U by one obtained from 20 heat-bath sweeps
    /// started at the greedy configuration.
    bool sample_sigma_u = false;
    std::uint64_t sigma_seed = 0;
};

/// Centers are taken greedily in id order among sites at distance >= 2R from
/// those already chosen and with >= 2 feasible spins in their ball given the
/// lexicographically least feasible configuration outside it. Case 2 is
/// reported when too few centers exist and a frozen witness is found.
LowerBoundPlan plan_lower_bound(const SpinSystem& sys, const PlanOptions& opts = {});

/// X_0: sigma_U outside the balls; each ball drawn exactly from its table,
/// restricted to center spin in Q_v (outside Q_v when the plan is flipped).
Configuration sample_conditioned_initial(const LowerBoundPlan& plan, const SpinSystem& sys,
                                         RngStream& rng);

/// f(X): fraction of centers v with X(v) in Q_v.
double center_fraction(const LowerBoundPlan& plan, const Configuration& x);

struct DistinguisherOptions {
    std::size_t replicas = 1000;
    std::uint64_t seed = 1;
    bool run_y_chain = true;
    /// Stationary reference draws when no exact route exists; 0 = replicas.
    std::size_t reference_samples = 0;
    /// Burn-in and thinning for the reference, in multiples of n events.
    double burn_in_factor = 0.0;  // 0: 50 ln n
    double thinning_factor = 20.0;
    std::size_t exact_cap = 100'000;
};

struct DistinguisherReport {
    std::size_t n = 0;
    std::size_t delta = 0;
    int R = 0;
    double T = 0.0;
    double eps = 0.0;
    double mu = 0.0;
    double mu_hat = 0.0;
    std::size_t centers = 0;
    bool flipped = false;
    Proportion x_arm;
    double phat_pi = 0.0;
    bool pi_exact = false;
    std::size_t pi_samples = 0;
    TVLowerBound tv;
    // Y-chain (ball-restricted dynamics).
    bool y_ran = false;
    double mean_f_y = 0.0;
    double occupancy_bound = 0.0;
    /// Mean fraction of centers where the coupled X and Y chains differ at T.
    double center_disagreement = 0.0;
    /// Largest |z| of pairwise covariances of per-center Y indicators.
    double max_cov_z = 0.0;
    std::string reference_method;
};

/// Orients the plan if needed, then estimates Pr(f(X_T) >= mu_hat) and the
/// stationary Pr(f >= mu_hat). Case-1 plans only.
DistinguisherReport run_distinguisher(LowerBoundPlan& plan, const Dynamics& dyn,
                                      const DistinguisherOptions& opts);

struct FrozenDistinguisherReport {
    int R = 0;
    int r = 0;
    double T = 0.0;
    double t_cap = 0.0;
    std::size_t delta = 0;
    double bound = 0.0;
    Proportion x_arm;
    Proportion y_arm;
    TVLowerBound tv;
};

/// 1 - 2 exp(-R/(3 ln Delta)).
double frozen_distinguisher_bound(int big_r, std::size_t delta);
/// R/(5 e^2 Delta ln Delta).
double frozen_time_cap(int big_r, std::size_t delta);

/// Statistic: agreement with X_0 on B_r(v), r = floor(R/(3 ln Delta)).
/// X replicas use streams (seed, k); Y replicas (seed, kSecondArmStreamBase + k).
FrozenDistinguisherReport frozen_distinguisher(const Dynamics& dyn, Vertex v, int big_r,
                                               const Configuration& x0, const Configuration& y0,
                                               double t, std::size_t replicas, std::uint64_t seed,
                                               std::size_t delta = 0);

}  // namespace glauber
