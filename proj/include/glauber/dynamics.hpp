#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "glauber/graph.hpp"
#include "glauber/rng.hpp"
#include "glauber/spin_system.hpp"

namespace glauber {

/// Single-site update rule kappa_{sigma,v}(sigma(v), .).
class UpdateKernel {
public:
    virtual ~UpdateKernel() = default;

    virtual std::string kind() const = 0;
    virtual std::string describe() const { return kind(); }

    /// Writes kappa_{sigma,v}(sigma(v), s') for every s' into out (size q).
    /// `scratch` holds sigma and is restored before returning.
    virtual void evaluate(Configuration& scratch, Vertex v, std::span<double> out) const = 0;

    const SpinSystem& system() const { return *system_; }
    const SystemPtr& system_ptr() const { return system_; }

protected:
    explicit UpdateKernel(SystemPtr sys);

private:
    SystemPtr system_;
};

using KernelPtr = std::shared_ptr<const UpdateKernel>;

/// kappa(s, s') = pi_{sigma,v}(s').
KernelPtr heat_bath_kernel(SystemPtr sys);
/// kappa(s, s') = min(pi(s')/pi(s), 1)/q for s' != s; infeasible proposals are rejected.
KernelPtr metropolis_kernel(SystemPtr sys);
/// Moves to each other spin with probability flip_prob/(q-1). Unconstrained systems only.
KernelPtr flip_kernel(SystemPtr sys, double flip_prob);
/// On a cycle with spins {0,1}: flip v when its two neighbors differ, else keep it.
KernelPtr cycle_block_rule_kernel(SystemPtr sys);

using KernelFunction = std::function<void(const Configuration&, Vertex, std::span<double>)>;
/// Arbitrary user rule; rows are checked when an exact chain is built.
KernelPtr custom_kernel(SystemPtr sys, KernelFunction fn, std::string name = "custom");
/// `base` inside `active`, point mass on the current spin elsewhere.
KernelPtr restricted_kernel(KernelPtr base, VertexSet active);

/// Site-selection weights; normalized when drawing in discrete time, used as
/// per-site rates in continuous time.
class SiteSelector {
public:
    static SiteSelector uniform(std::size_t n);
    explicit SiteSelector(std::vector<double> weights);

    std::size_t size() const { return weights_.size(); }
    bool is_uniform() const { return uniform_; }
    double weight(Vertex v) const { return weights_[std::size_t(v)]; }
    const std::vector<double>& weights() const { return weights_; }
    double total_weight() const { return total_; }
    double probability(Vertex v) const { return weights_[std::size_t(v)] / total_; }

    Vertex draw(RngStream& rng) const;

private:
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    double total_ = 0.0;
    bool uniform_ = true;
};

class Dynamics {
public:
    Dynamics(KernelPtr kernel, SiteSelector selector, double laziness = 0.0);
    /// Uniform selector.
    explicit Dynamics(KernelPtr kernel, double laziness = 0.0);

    const SpinSystem& system() const { return kernel_->system(); }
    const SystemPtr& system_ptr() const { return kernel_->system_ptr(); }
    const Graph& graph() const { return system().graph(); }
    const UpdateKernel& kernel() const { return *kernel_; }
    const KernelPtr& kernel_ptr() const { return kernel_; }
    const SiteSelector& selector() const { return selector_; }
    double laziness() const { return laziness_; }
    /// Rate of the single Poisson clock (= n for the uniform selector).
    double clock_rate() const { return selector_.total_weight(); }

    std::string describe() const;

private:
    KernelPtr kernel_;
    SiteSelector selector_;
    double laziness_;
};

using DynamicsPtr = std::shared_ptr<const Dynamics>;

/// Spin whose cumulative interval under p contains u in [0,1).
Spin sample_spin(std::span<const double> p, double u);

/// One discrete step in place: site draw, laziness coin, then one uniform for
/// the new spin. Returns the updated site (or -1 for a lazy step); `before`
/// receives the old spin at that site.
Vertex apply_step(const Dynamics& dyn, Configuration& sigma, RngStream& rng,
                  Spin* before = nullptr);
Configuration step_discrete(const Dynamics& dyn, const Configuration& sigma, RngStream& rng);

struct Event {
    double time = 0.0;
    /// -1 when the laziness coin suppressed the update.
    Vertex site = -1;
    Spin before = 0;
    Spin after = 0;
};

/// Continuous time t under the single clock of rate clock_rate().
Configuration run_continuous(const Dynamics& dyn, const Configuration& sigma0, double t,
                             RngStream& rng, std::vector<Event>* log = nullptr);
/// Same, in place; returns the number of clock rings.
std::size_t advance_continuous(const Dynamics& dyn, Configuration& sigma, double t, RngStream& rng,
                               std::vector<Event>* log = nullptr);

class ExactChain;

struct DetailedBalanceReport {
    double max_relative_violation = 0.0;
    bool pass = false;
    /// Offending triple (state index, site, new spin) at the maximum.
    std::size_t state = 0;
    Vertex site = -1;
    Spin new_spin = 0;
    std::string detail;
};

/// pi(sigma) kappa_{sigma,v}(s,s') = pi(sigma') kappa_{sigma',v}(s',s) over all triples.
DetailedBalanceReport check_detailed_balance(const Dynamics& dyn, const ExactChain& chain,
                                             double tolerance = 1e-10);

struct ErgodicityReport {
    bool irreducible = false;
    bool aperiodic = false;
    std::size_t classes = 0;
    std::size_t period = 0;
};

ErgodicityReport check_ergodicity(const ExactChain& chain);

}  // namespace glauber
