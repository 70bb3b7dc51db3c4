#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "glauber/graph.hpp"

namespace glauber {

/// Spin index 0..q-1. Hard-core uses 0 = unoccupied, 1 = occupied; Ising maps
/// index 0 to -1 and index 1 to +1.
using Spin = std::uint8_t;
inline constexpr Spin kUnassigned = 0xFF;
inline constexpr int kMaxSpins = 64;

using Configuration = std::vector<Spin>;
/// Bit s set means spin s is allowed at the site.
using SpinMask = std::uint64_t;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class CapExceeded : public std::runtime_error {
public:
    CapExceeded(const std::string& what, std::size_t counted)
        : std::runtime_error(what), counted_(counted) {}
    /// Number of objects counted before giving up (a lower bound on the true size).
    std::size_t counted() const { return counted_; }

private:
    std::size_t counted_;
};

class EmptyFeasibleSet : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SystemKind { ising, hardcore, coloring, cycle_block, product_coin, custom, embedding };

std::string to_string(SystemKind kind);

struct IsingParams {
    double beta = 0.0;
    double field = 0.0;
};

struct HardCoreParams {
    double lambda = 1.0;
};

struct ColoringParams {
    int q = 3;
};

struct ProductCoinParams {
    int q = 2;
    /// Used by the flip kernel: probability that a selected spin flips.
    double flip_prob = 0.5;
};

class SpinSystem;
using SystemPtr = std::shared_ptr<const SpinSystem>;

/// A spin system restricted to a region with every other site fixed.
struct ConditionedSystem {
    SystemPtr system;
    /// local id -> id in the parent graph, increasing.
    std::vector<Vertex> local_to_global;

    Configuration embed(const Configuration& local, const Configuration& outside) const;
    Configuration extract(const Configuration& global) const;
};

/// Spin space, feasibility and unnormalized weight on a fixed graph.
class SpinSystem {
public:
    SpinSystem(GraphPtr graph, int q);
    virtual ~SpinSystem() = default;

    SpinSystem(const SpinSystem&) = delete;
    SpinSystem& operator=(const SpinSystem&) = delete;

    const Graph& graph() const { return *graph_; }
    const GraphPtr& graph_ptr() const { return graph_; }
    int num_spins() const { return q_; }
    std::size_t site_count() const { return graph_->vertex_count(); }

    virtual SystemKind kind() const = 0;
    virtual std::string describe() const = 0;

    /// Log of the unnormalized stationary weight; -inf exactly when infeasible.
    virtual double log_weight(const Configuration& sigma) const = 0;
    bool is_feasible(const Configuration& sigma) const;

    /// True when the weight is a product of site and edge factors, so the
    /// conditional at v depends only on v's neighbors.
    virtual bool is_local() const { return false; }

    /// Local systems only: log of every factor touching v when sigma(v) = s,
    /// ignoring unassigned neighbors. -inf when s violates a constraint.
    virtual double site_log_weight(const Configuration& sigma, Vertex v, Spin s) const;

    /// Whether the assigned sites 0..last (plus any pre-assigned later sites)
    /// can still be part of a feasible configuration as far as this system can
    /// tell cheaply. Must be exact once every site is assigned.
    virtual bool prefix_feasible(const Configuration& partial, Vertex last) const;

    /// All feasible configurations, lexicographic order. Throws CapExceeded.
    virtual std::vector<Configuration> enumerate(std::size_t cap) const;

    /// Restricts to the region; outside sites keep their spins in `fixed`.
    /// Markov random fields only.
    virtual SystemPtr restricted(GraphPtr induced, const std::vector<Vertex>& local_to_global,
                                 const Configuration& fixed) const;

    /// Upper bound on the brute-force search space used by non-local systems.
    static constexpr std::size_t kBruteForceLimit = std::size_t{1} << 26;

protected:
    void require_size(const Configuration& sigma) const;

private:
    GraphPtr graph_;
    int q_;
};

SystemPtr make_ising(GraphPtr g, IsingParams p, std::vector<double> extra_field = {});
SystemPtr make_hardcore(GraphPtr g, HardCoreParams p, std::vector<SpinMask> allowed = {});
SystemPtr make_coloring(GraphPtr g, ColoringParams p, std::vector<SpinMask> allowed = {});
/// Cycle of n sites, spins {0,1}; feasible iff the 0-sites form one contiguous
/// arc of length 1..n-1. Uniform weight. Not a Markov random field.
SystemPtr make_cycle_block(GraphPtr g);
SystemPtr make_product_coin(GraphPtr g, ProductCoinParams p = {});
/// User-supplied log-weight oracle (-inf for infeasible). Treated as non-local.
SystemPtr make_custom(GraphPtr g, int q, std::function<double(const Configuration&)> log_weight,
                      std::string name = "custom");

const IsingParams* ising_params(const SpinSystem& sys);
const HardCoreParams* hardcore_params(const SpinSystem& sys);
const ProductCoinParams* product_coin_params(const SpinSystem& sys);

/// pi_{sigma,v}: spin distribution at v with the rest of sigma fixed.
std::vector<double> conditional_at(const SpinSystem& sys, const Configuration& sigma, Vertex v);
/// Allocation-free variant. `scratch` must equal sigma; it is restored on return.
void conditional_into(const SpinSystem& sys, Configuration& scratch, Vertex v,
                      std::span<double> out);

/// Sites whose conditional is a point mass on their current spin.
VertexSet frozen_sites(const SpinSystem& sys, const Configuration& sigma);
bool is_frozen_at(const SpinSystem& sys, Configuration& scratch, Vertex v);

inline constexpr std::size_t kDefaultEnumerationCap = 2'000'000;

std::vector<Configuration> enumerate_feasible(const SpinSystem& sys,
                                              std::size_t cap = kDefaultEnumerationCap);

/// Counts |Omega| up to cap; returns cap + 1 when the cap is exceeded.
std::size_t count_feasible(const SpinSystem& sys, std::size_t cap);

enum class SearchStatus { found, infeasible, budget_exhausted };

struct SearchResult {
    SearchStatus status = SearchStatus::infeasible;
    Configuration config;
    std::size_t nodes = 0;
};

/// Lexicographically-least feasible configuration agreeing with `forced`
/// (entries other than kUnassigned are pinned). Depth-first, lowest spin first.
SearchResult find_feasible(const SpinSystem& sys, const Configuration& forced,
                           std::size_t node_budget = 50'000'000);

struct NonredundancyReport {
    std::vector<bool> per_site;
    bool pass = false;
    /// "enumeration" or "witness-search".
    std::string method;
};

/// Each site must take at least two distinct spins across Omega.
NonredundancyReport check_nonredundancy(const SpinSystem& sys,
                                        std::size_t cap = kDefaultEnumerationCap);

/// Fixes every site outside `region` to its spin in `fixed` and returns the
/// induced system on the region.
ConditionedSystem condition_on(const SpinSystem& sys, const VertexSet& region,
                               const Configuration& fixed);

/// Ising spin value for a spin index: 0 -> -1, 1 -> +1.
inline int ising_value(Spin s) { return s == 0 ? -1 : 1; }

std::string format_configuration(const Configuration& sigma);

}  // namespace glauber
