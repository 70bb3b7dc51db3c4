#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glauber/dynamics.hpp"
#include "glauber/stats.hpp"

namespace glauber {

/// Maximal coupling driven by one uniform u in [0,1). Probability of equal
/// outputs is sum_s min(p_s, q_s); given disagreement, both sides are drawn from
/// the normalized positive parts of p - q and q - p by quantile at the same
/// rescaled uniform.
std::pair<Spin, Spin> couple_update(std::span<const double> p, std::span<const double> q, double u);
std::pair<Spin, Spin> couple_update(std::span<const double> p, std::span<const double> q,
                                    RngStream& rng);

/// Exact joint law of the coupler, obtained by evaluating it on every interval
/// between its breakpoints. joint[a][b] = Pr(outputs = (a, b)).
std::vector<std::vector<double>> coupling_joint_table(std::span<const double> p,
                                                      std::span<const double> q);

/// Two configurations with their disagreement set kept in sync.
class CoupledPair {
public:
    CoupledPair(Configuration x, Configuration y);

    const Configuration& x() const { return x_; }
    const Configuration& y() const { return y_; }
    std::size_t disagreement_count() const { return count_; }
    bool disagrees_at(Vertex v) const { return x_[std::size_t(v)] != y_[std::size_t(v)]; }
    VertexSet disagreements() const;

    void set(Vertex v, Spin sx, Spin sy);
    Configuration& x_scratch() { return x_; }
    Configuration& y_scratch() { return y_; }

private:
    Configuration x_;
    Configuration y_;
    std::size_t count_ = 0;
};

struct CoupledEvent {
    double time = 0.0;
    Vertex site = -1;
    Spin x_before = 0, y_before = 0, x_after = 0, y_after = 0;
};

struct CouplingRun {
    CoupledPair pair;
    /// (event time, |disagreements|) recorded whenever the count changes.
    std::vector<std::pair<double, std::size_t>> history;
    std::vector<CoupledEvent> log;
    std::size_t events = 0;
};

/// Both chains share clock rings, site draws, laziness coins and one uniform per
/// update. The dynamics must agree on graph size, spin count, selector and laziness.
CouplingRun run_greedy_coupling(const Dynamics& dyn_x, const Dynamics& dyn_y, CoupledPair pair0,
                                double t, RngStream& rng, bool keep_log = false);

struct PathAudit {
    bool containment_ok = true;
    bool paths_ok = true;
    std::size_t checked = 0;
    std::string detail;
};

/// Replays a logged run: the infection set starts at `sources` (initial
/// disagreements and sites where the rules differ) and grows by updates
/// adjacent to it. Checks disagreements stay inside it, then rebuilds for each
/// final disagreement in `targets` an increasing-time path of updated sites of
/// length >= distance(sources, target).
PathAudit audit_disagreement_paths(const Graph& g, const VertexSet& sources,
                                   const VertexSet& targets, const CoupledPair& pair0,
                                   const CouplingRun& run);

/// 1 - min(|dA|, |dA'|) (e t Delta / d)^d.
double percolation_bound(std::size_t boundary_min, double t, std::size_t delta, int d);
/// 1 - (e t / (R - r))^(R - r) Delta^R.
double ball_percolation_bound(double t, std::size_t delta, int big_r, int small_r);

struct BallForm {
    Vertex center = 0;
    int r = 0;
    int big_r = 1;
};

struct PercolationPlan {
    DynamicsPtr dyn_x;
    DynamicsPtr dyn_y;
    VertexSet a;
    VertexSet a_prime;
    double t = 0.0;
    std::size_t replicas = 0;
    Configuration x0;
    Configuration y0;
    /// Set when A' = B_r(v) and A = V \ B_{R-1}(v); enables the ball-form bound.
    std::optional<BallForm> ball;
    /// Degree bound used in the formulas; 0 means the graph's max degree.
    std::size_t delta = 0;
};

struct PercolationReport {
    std::size_t replicas = 0;
    /// Empirical Pr(X_t != Y_t somewhere on A').
    Proportion disagreement;
    /// Lower bounds on agreement, verbatim formulas (may be vacuous).
    double bound_eq5 = 0.0;
    bool eq5_vacuous = false;
    std::optional<double> bound_eq6;
    bool eq6_vacuous = false;
    int d = 0;
    double t = 0.0;
    std::size_t delta = 0;
    std::size_t boundary_a = 0;
    std::size_t boundary_a_prime = 0;
};

/// Replica k uses stream (seed, k).
PercolationReport percolation_experiment(const PercolationPlan& plan, std::uint64_t seed);

/// Ball-form plan: A' = B_r(v), A = V \ B_{R-1}(v). x0 given; y0 differs from x0
/// exactly where `y0` says.
PercolationPlan ball_percolation_plan(DynamicsPtr dyn, Vertex center, int r, int big_r, double t,
                                      std::size_t replicas, Configuration x0, Configuration y0);

struct PoissonPathResult {
    /// Pr(Poisson(t) >= r).
    double p = 0.0;
    /// (e t / r)^r.
    double bound = 0.0;
};

PoissonPathResult poisson_path_prob(unsigned r, double t);
/// Direct simulation: r independent rate-1 clocks on [0, t]; success when
/// clock i rings at some t_i with 0 < t_1 < ... < t_r < t.
Proportion poisson_path_monte_carlo(unsigned r, double t, std::size_t trials, RngStream& rng);

struct FrozenPersistenceReport {
    std::size_t replicas = 0;
    /// Pr(X_t = X_0 on A').
    Proportion persistence;
    double persistence_bound = 0.0;
    /// Pr(X_t frozen on V \ A and X_t != X_0 on A').
    Proportion joint;
    double joint_bound = 0.0;
    int d = 0;
    std::size_t delta = 0;
};

FrozenPersistenceReport frozen_persistence_experiment(const Dynamics& dyn, const Configuration& sigma0,
                                                      const VertexSet& a, const VertexSet& a_prime,
                                                      double t, std::size_t replicas,
                                                      std::uint64_t seed);

}  // namespace glauber
