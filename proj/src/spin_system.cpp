#include "glauber/spin_system.hpp"

#include <bit>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace glauber {

std::string to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::ising: return "ising";
        case SystemKind::hardcore: return "hardcore";
        case SystemKind::coloring: return "coloring";
        case SystemKind::cycle_block: return "cycle_block";
        case SystemKind::product_coin: return "product_coin";
        case SystemKind::custom: return "custom";
        case SystemKind::embedding: return "embedding";
    }
    return "unknown";
}

Configuration ConditionedSystem::embed(const Configuration& local,
                                       const Configuration& outside) const {
    Configuration out = outside;
    for (std::size_t i = 0; i < local_to_global.size(); ++i)
        out[std::size_t(local_to_global[i])] = local[i];
    return out;
}

Configuration ConditionedSystem::extract(const Configuration& global) const {
    Configuration out(local_to_global.size());
    for (std::size_t i = 0; i < local_to_global.size(); ++i)
        out[i] = global[std::size_t(local_to_global[i])];
    return out;
}

SpinSystem::SpinSystem(GraphPtr graph, int q) : graph_(std::move(graph)), q_(q) {
    if (!graph_) throw std::invalid_argument("spin system requires a graph");
    if (q < 1 || q > kMaxSpins)
        throw std::invalid_argument("spin count must be in 1.." + std::to_string(kMaxSpins));
}

void SpinSystem::require_size(const Configuration& sigma) const {
    if (sigma.size() != site_count())
        throw std::invalid_argument("configuration length " + std::to_string(sigma.size()) +
                                    " does not match vertex count " +
                                    std::to_string(site_count()));
}

bool SpinSystem::is_feasible(const Configuration& sigma) const {
    if (sigma.size() != site_count()) return false;
    for (Spin s : sigma)
        if (s >= q_) return false;
    return log_weight(sigma) > kNegInf;
}

double SpinSystem::site_log_weight(const Configuration&, Vertex, Spin) const {
    throw std::logic_error(describe() + " has no local factorization");
}

bool SpinSystem::prefix_feasible(const Configuration& partial, Vertex last) const {
    if (is_local()) return site_log_weight(partial, last, partial[std::size_t(last)]) > kNegInf;
    if (std::size_t(last) + 1 < site_count()) return true;
    return log_weight(partial) > kNegInf;
}

namespace {

// Depth-first search in vertex-id order. Sites pinned in `forced` only take
// their pinned spin. Calls visit(config) for each feasible leaf; visit returns
// false to stop.
template <class Visit>
SearchStatus backtrack(const SpinSystem& sys, const Configuration& forced, std::size_t node_budget,
                       std::size_t& nodes, Visit&& visit) {
    const auto n = sys.site_count();
    const int q = sys.num_spins();
    Configuration cur = forced;
    std::vector<int> next_try(n, 0);
    std::size_t pos = 0;
    bool any = false;
    // Position-local state: next_try[pos] is the next spin to attempt.
    while (true) {
        if (pos == n) {
            any = true;
            if (!visit(static_cast<const Configuration&>(cur))) return SearchStatus::found;
            if (n == 0) return SearchStatus::found;
            --pos;
            continue;
        }
        const bool pinned = forced[pos] != kUnassigned;
        int s = next_try[pos];
        bool advanced = false;
        while (s < q) {
            const Spin spin = pinned ? forced[pos] : Spin(s);
            cur[pos] = spin;
            ++nodes;
            if (nodes > node_budget) return SearchStatus::budget_exhausted;
            const bool ok = sys.prefix_feasible(cur, Vertex(pos));
            s = pinned ? q : s + 1;
            if (ok) {
                next_try[pos] = s;
                advanced = true;
                break;
            }
        }
        if (advanced) {
            ++pos;
            if (pos < n) next_try[pos] = 0;
            continue;
        }
        cur[pos] = forced[pos];
        next_try[pos] = 0;
        if (pos == 0) break;
        --pos;
    }
    return any ? SearchStatus::found : SearchStatus::infeasible;
}

void guard_brute_force(const SpinSystem& sys) {
    if (sys.is_local()) return;
    if (sys.kind() == SystemKind::cycle_block) return;  // prefix pruning is effective
    double space = std::pow(double(sys.num_spins()), double(sys.site_count()));
    if (space > double(SpinSystem::kBruteForceLimit))
        throw CapExceeded("brute-force space " + std::to_string(space) + " of " + sys.describe() +
                              " exceeds limit",
                          0);
}

}  // namespace

std::vector<Configuration> SpinSystem::enumerate(std::size_t cap) const {
    guard_brute_force(*this);
    std::vector<Configuration> out;
    std::size_t nodes = 0;
    Configuration forced(site_count(), kUnassigned);
    bool exceeded = false;
    backtrack(*this, forced, std::numeric_limits<std::size_t>::max(), nodes,
              [&](const Configuration& c) {
                  if (out.size() >= cap) {
                      exceeded = true;
                      return false;
                  }
                  out.push_back(c);
                  return true;
              });
    if (exceeded)
        throw CapExceeded("state space exceeds cap " + std::to_string(cap), out.size() + 1);
    return out;
}

SystemPtr SpinSystem::restricted(GraphPtr, const std::vector<Vertex>&, const Configuration&) const {
    throw std::invalid_argument("conditioning on a region requires a Markov random field; " +
                                describe() + " is not supported");
}

namespace {

GraphPtr induced_subgraph(const Graph& g, const std::vector<Vertex>& sites) {
    std::vector<int> local(g.vertex_count(), -1);
    for (std::size_t i = 0; i < sites.size(); ++i) local[std::size_t(sites[i])] = int(i);
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        for (Vertex w : g.neighbors(sites[i])) {
            int j = local[std::size_t(w)];
            if (j > int(i)) edges.emplace_back(Vertex(i), Vertex(j));
        }
    }
    return edge_list_graph(sites.size(), edges);
}

bool mask_allows(const std::vector<SpinMask>& allowed, Vertex v, Spin s) {
    return allowed.empty() || ((allowed[std::size_t(v)] >> s) & 1u);
}

std::vector<SpinMask> check_mask(std::vector<SpinMask> allowed, std::size_t n) {
    if (!allowed.empty() && allowed.size() != n)
        throw std::invalid_argument("allowed-spin mask length must equal vertex count");
    return allowed;
}

class IsingSystem final : public SpinSystem {
public:
    IsingSystem(GraphPtr g, IsingParams p, std::vector<double> extra)
        : SpinSystem(std::move(g), 2), p_(p), extra_(std::move(extra)) {
        if (!std::isfinite(p.beta) || !std::isfinite(p.field))
            throw std::invalid_argument("ising parameters must be finite");
        if (!extra_.empty() && extra_.size() != site_count())
            throw std::invalid_argument("ising extra field length must equal vertex count");
    }

    SystemKind kind() const override { return SystemKind::ising; }
    std::string describe() const override {
        std::ostringstream os;
        os << "ising(beta=" << p_.beta << ",h=" << p_.field << ") on " << graph().description();
        return os.str();
    }
    bool is_local() const override { return true; }
    const IsingParams& params() const { return p_; }

    double field_at(Vertex v) const {
        return p_.field + (extra_.empty() ? 0.0 : extra_[std::size_t(v)]);
    }

    double log_weight(const Configuration& sigma) const override {
        require_size(sigma);
        double energy = 0.0;
        for (std::size_t u = 0; u < site_count(); ++u) {
            if (sigma[u] > 1) return kNegInf;
            const int su = ising_value(sigma[u]);
            energy += field_at(Vertex(u)) * su;
            for (Vertex w : graph().neighbors(Vertex(u)))
                if (Vertex(u) < w) energy += su * ising_value(sigma[std::size_t(w)]);
        }
        return p_.beta * energy;
    }

    double site_log_weight(const Configuration& sigma, Vertex v, Spin s) const override {
        double local = field_at(v);
        for (Vertex w : graph().neighbors(v)) {
            Spin sw = sigma[std::size_t(w)];
            if (sw != kUnassigned) local += ising_value(sw);
        }
        return p_.beta * ising_value(s) * local;
    }

    SystemPtr restricted(GraphPtr induced, const std::vector<Vertex>& l2g,
                         const Configuration& fixed) const override {
        std::vector<char> inside(site_count(), 0);
        for (Vertex v : l2g) inside[std::size_t(v)] = 1;
        std::vector<double> extra(l2g.size(), 0.0);
        for (std::size_t i = 0; i < l2g.size(); ++i) {
            const Vertex v = l2g[i];
            double x = extra_.empty() ? 0.0 : extra_[std::size_t(v)];
            for (Vertex w : graph().neighbors(v))
                if (!inside[std::size_t(w)]) x += ising_value(fixed[std::size_t(w)]);
            extra[i] = x;
        }
        return std::make_shared<IsingSystem>(std::move(induced), p_, std::move(extra));
    }

private:
    IsingParams p_;
    std::vector<double> extra_;
};

class HardCoreSystem final : public SpinSystem {
public:
    HardCoreSystem(GraphPtr g, HardCoreParams p, std::vector<SpinMask> allowed)
        : SpinSystem(std::move(g), 2), p_(p), allowed_(check_mask(std::move(allowed), site_count())) {
        if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
            throw std::invalid_argument("hard-core activity lambda must be positive");
        log_lambda_ = std::log(p.lambda);
    }

    SystemKind kind() const override { return SystemKind::hardcore; }
    std::string describe() const override {
        std::ostringstream os;
        os << "hardcore(lambda=" << p_.lambda << ") on " << graph().description();
        return os.str();
    }
    bool is_local() const override { return true; }
    const HardCoreParams& params() const { return p_; }

    double log_weight(const Configuration& sigma) const override {
        require_size(sigma);
        double lw = 0.0;
        for (std::size_t u = 0; u < site_count(); ++u) {
            if (sigma[u] > 1 || !mask_allows(allowed_, Vertex(u), sigma[u])) return kNegInf;
            if (sigma[u] == 1) {
                for (Vertex w : graph().neighbors(Vertex(u)))
                    if (sigma[std::size_t(w)] == 1) return kNegInf;
                lw += log_lambda_;
            }
        }
        return lw;
    }

    double site_log_weight(const Configuration& sigma, Vertex v, Spin s) const override {
        if (!mask_allows(allowed_, v, s)) return kNegInf;
        if (s == 0) return 0.0;
        for (Vertex w : graph().neighbors(v))
            if (sigma[std::size_t(w)] == 1) return kNegInf;
        return log_lambda_;
    }

    SystemPtr restricted(GraphPtr induced, const std::vector<Vertex>& l2g,
                         const Configuration& fixed) const override {
        std::vector<char> inside(site_count(), 0);
        for (Vertex v : l2g) inside[std::size_t(v)] = 1;
        std::vector<SpinMask> mask(l2g.size(), 0b11);
        for (std::size_t i = 0; i < l2g.size(); ++i) {
            const Vertex v = l2g[i];
            if (!allowed_.empty()) mask[i] &= allowed_[std::size_t(v)];
            for (Vertex w : graph().neighbors(v))
                if (!inside[std::size_t(w)] && fixed[std::size_t(w)] == 1) mask[i] &= 0b01;
        }
        return std::make_shared<HardCoreSystem>(std::move(induced), p_, std::move(mask));
    }

private:
    HardCoreParams p_;
    std::vector<SpinMask> allowed_;
    double log_lambda_ = 0.0;
};

class ColoringSystem final : public SpinSystem {
public:
    ColoringSystem(GraphPtr g, ColoringParams p, std::vector<SpinMask> allowed)
        : SpinSystem(std::move(g), p.q), p_(p), allowed_(check_mask(std::move(allowed), site_count())) {
        if (p.q < 2) throw std::invalid_argument("coloring requires q >= 2");
    }

    SystemKind kind() const override { return SystemKind::coloring; }
    std::string describe() const override {
        return "coloring(q=" + std::to_string(p_.q) + ") on " + graph().description();
    }
    bool is_local() const override { return true; }

    double log_weight(const Configuration& sigma) const override {
        require_size(sigma);
        for (std::size_t u = 0; u < site_count(); ++u) {
            if (sigma[u] >= p_.q || !mask_allows(allowed_, Vertex(u), sigma[u])) return kNegInf;
            for (Vertex w : graph().neighbors(Vertex(u)))
                if (sigma[std::size_t(w)] == sigma[u]) return kNegInf;
        }
        return 0.0;
    }

    double site_log_weight(const Configuration& sigma, Vertex v, Spin s) const override {
        if (!mask_allows(allowed_, v, s)) return kNegInf;
        for (Vertex w : graph().neighbors(v))
            if (sigma[std::size_t(w)] == s) return kNegInf;
        return 0.0;
    }

    SystemPtr restricted(GraphPtr induced, const std::vector<Vertex>& l2g,
                         const Configuration& fixed) const override {
        std::vector<char> inside(site_count(), 0);
        for (Vertex v : l2g) inside[std::size_t(v)] = 1;
        const SpinMask full = p_.q == 64 ? ~SpinMask{0} : ((SpinMask{1} << p_.q) - 1);
        std::vector<SpinMask> mask(l2g.size(), full);
        for (std::size_t i = 0; i < l2g.size(); ++i) {
            const Vertex v = l2g[i];
            if (!allowed_.empty()) mask[i] &= allowed_[std::size_t(v)];
            for (Vertex w : graph().neighbors(v))
                if (!inside[std::size_t(w)]) mask[i] &= ~(SpinMask{1} << fixed[std::size_t(w)]);
        }
        return std::make_shared<ColoringSystem>(std::move(induced), p_, std::move(mask));
    }

private:
    ColoringParams p_;
    std::vector<SpinMask> allowed_;
};

class CycleBlockSystem final : public SpinSystem {
public:
    explicit CycleBlockSystem(GraphPtr g) : SpinSystem(std::move(g), 2) {
        const auto n = site_count();
        bool is_cycle = n >= 3 && graph().edge_count() == n;
        for (std::size_t v = 0; is_cycle && v < n; ++v) {
            is_cycle = graph().degree(Vertex(v)) == 2 &&
                       graph().adjacent(Vertex(v), Vertex((v + 1) % n));
        }
        if (!is_cycle)
            throw std::invalid_argument("cycle_block requires the cycle 0-1-...-(n-1)-0");
    }

    SystemKind kind() const override { return SystemKind::cycle_block; }
    std::string describe() const override { return "cycle_block on " + graph().description(); }

    double log_weight(const Configuration& sigma) const override {
        require_size(sigma);
        const auto n = site_count();
        std::size_t zeros = 0;
        std::size_t changes = 0;
        for (std::size_t v = 0; v < n; ++v) {
            if (sigma[v] > 1) return kNegInf;
            zeros += sigma[v] == 0;
            changes += sigma[v] != sigma[(v + 1) % n];
        }
        // One contiguous block of zeros on the cycle <=> exactly two boundaries.
        return (zeros >= 1 && zeros <= n - 1 && changes == 2) ? 0.0 : kNegInf;
    }

    bool prefix_feasible(const Configuration& partial, Vertex last) const override {
        if (std::size_t(last) + 1 == site_count()) return log_weight(partial) > kNegInf;
        // A linear prefix of a valid arrangement changes value at most twice.
        std::size_t changes = 0;
        for (Vertex v = 1; v <= last; ++v) changes += partial[std::size_t(v)] != partial[std::size_t(v - 1)];
        return changes <= 2;
    }
};

class ProductCoinSystem final : public SpinSystem {
public:
    ProductCoinSystem(GraphPtr g, ProductCoinParams p) : SpinSystem(std::move(g), p.q), p_(p) {
        if (p.q < 2) throw std::invalid_argument("product_coin requires q >= 2");
        if (!(p.flip_prob > 0.0 && p.flip_prob <= 1.0))
            throw std::invalid_argument("flip_prob must lie in (0, 1]");
    }

    SystemKind kind() const override { return SystemKind::product_coin; }
    std::string describe() const override {
        return "product_coin(q=" + std::to_string(p_.q) + ") on " + graph().description();
    }
    bool is_local() const override { return true; }
    const ProductCoinParams& params() const { return p_; }

    double log_weight(const Configuration& sigma) const override {
        require_size(sigma);
        for (Spin s : sigma)
            if (s >= p_.q) return kNegInf;
        return 0.0;
    }
    double site_log_weight(const Configuration&, Vertex, Spin) const override { return 0.0; }

    SystemPtr restricted(GraphPtr induced, const std::vector<Vertex>&,
                         const Configuration&) const override {
        return std::make_shared<ProductCoinSystem>(std::move(induced), p_);
    }

private:
    ProductCoinParams p_;
};

class CustomSystem final : public SpinSystem {
public:
    CustomSystem(GraphPtr g, int q, std::function<double(const Configuration&)> lw, std::string name)
        : SpinSystem(std::move(g), q), lw_(std::move(lw)), name_(std::move(name)) {
        if (!lw_) throw std::invalid_argument("custom system requires a weight oracle");
    }
    SystemKind kind() const override { return SystemKind::custom; }
    std::string describe() const override { return name_ + " on " + graph().description(); }
    double log_weight(const Configuration& sigma) const override {
        require_size(sigma);
        return lw_(sigma);
    }

private:
    std::function<double(const Configuration&)> lw_;
    std::string name_;
};

SystemPtr require_nonempty(SystemPtr sys) {
    const Configuration forced(sys->site_count(), kUnassigned);
    auto res = find_feasible(*sys, forced);
    if (res.status == SearchStatus::infeasible)
        throw EmptyFeasibleSet("empty feasible set: " + sys->describe());
    return sys;
}

}  // namespace

SystemPtr make_ising(GraphPtr g, IsingParams p, std::vector<double> extra_field) {
    return std::make_shared<IsingSystem>(std::move(g), p, std::move(extra_field));
}

SystemPtr make_hardcore(GraphPtr g, HardCoreParams p, std::vector<SpinMask> allowed) {
    return require_nonempty(std::make_shared<HardCoreSystem>(std::move(g), p, std::move(allowed)));
}

SystemPtr make_coloring(GraphPtr g, ColoringParams p, std::vector<SpinMask> allowed) {
    return require_nonempty(std::make_shared<ColoringSystem>(std::move(g), p, std::move(allowed)));
}

SystemPtr make_cycle_block(GraphPtr g) { return std::make_shared<CycleBlockSystem>(std::move(g)); }

SystemPtr make_product_coin(GraphPtr g, ProductCoinParams p) {
    return std::make_shared<ProductCoinSystem>(std::move(g), p);
}

SystemPtr make_custom(GraphPtr g, int q, std::function<double(const Configuration&)> log_weight,
                      std::string name) {
    return require_nonempty(
        std::make_shared<CustomSystem>(std::move(g), q, std::move(log_weight), std::move(name)));
}

const IsingParams* ising_params(const SpinSystem& sys) {
    auto* p = dynamic_cast<const IsingSystem*>(&sys);
    return p ? &p->params() : nullptr;
}
const HardCoreParams* hardcore_params(const SpinSystem& sys) {
    auto* p = dynamic_cast<const HardCoreSystem*>(&sys);
    return p ? &p->params() : nullptr;
}
const ProductCoinParams* product_coin_params(const SpinSystem& sys) {
    auto* p = dynamic_cast<const ProductCoinSystem*>(&sys);
    return p ? &p->params() : nullptr;
}

void conditional_into(const SpinSystem& sys, Configuration& scratch, Vertex v,
                      std::span<double> out) {
    const int q = sys.num_spins();
    const Spin current = scratch[std::size_t(v)];
    double best = kNegInf;
    for (int s = 0; s < q; ++s) {
        double lw;
        if (sys.is_local()) {
            lw = sys.site_log_weight(scratch, v, Spin(s));
        } else {
            scratch[std::size_t(v)] = Spin(s);
            lw = sys.log_weight(scratch);
        }
        out[std::size_t(s)] = lw;
        best = std::max(best, lw);
    }
    scratch[std::size_t(v)] = current;
    if (best == kNegInf)
        throw std::invalid_argument("conditional_at: no feasible spin at site " + std::to_string(v));
    double total = 0.0;
    for (int s = 0; s < q; ++s) {
        const double w = out[std::size_t(s)] == kNegInf ? 0.0 : std::exp(out[std::size_t(s)] - best);
        out[std::size_t(s)] = w;
        total += w;
    }
    for (int s = 0; s < q; ++s) out[std::size_t(s)] /= total;
}

std::vector<double> conditional_at(const SpinSystem& sys, const Configuration& sigma, Vertex v) {
    if (!sys.graph().valid(v)) throw std::invalid_argument("invalid vertex " + std::to_string(v));
    if (!sys.is_feasible(sigma))
        throw std::invalid_argument("conditional_at requires a feasible configuration");
    Configuration scratch = sigma;
    std::vector<double> out(std::size_t(sys.num_spins()));
    conditional_into(sys, scratch, v, out);
    return out;
}

bool is_frozen_at(const SpinSystem& sys, Configuration& scratch, Vertex v) {
    const Spin current = scratch[std::size_t(v)];
    bool frozen = true;
    for (int s = 0; s < sys.num_spins() && frozen; ++s) {
        if (Spin(s) == current) continue;
        double lw;
        if (sys.is_local()) {
            lw = sys.site_log_weight(scratch, v, Spin(s));
        } else {
            scratch[std::size_t(v)] = Spin(s);
            lw = sys.log_weight(scratch);
            scratch[std::size_t(v)] = current;
        }
        if (lw > kNegInf) frozen = false;
    }
    return frozen;
}

VertexSet frozen_sites(const SpinSystem& sys, const Configuration& sigma) {
    if (!sys.is_feasible(sigma))
        throw std::invalid_argument("frozen_sites requires a feasible configuration");
    Configuration scratch = sigma;
    std::vector<Vertex> out;
    for (std::size_t v = 0; v < sys.site_count(); ++v)
        if (is_frozen_at(sys, scratch, Vertex(v))) out.push_back(Vertex(v));
    return VertexSet(std::move(out));
}

std::vector<Configuration> enumerate_feasible(const SpinSystem& sys, std::size_t cap) {
    return sys.enumerate(cap);
}

std::size_t count_feasible(const SpinSystem& sys, std::size_t cap) {
    try {
        guard_brute_force(sys);
        std::size_t count = 0;
        std::size_t nodes = 0;
        Configuration forced(sys.site_count(), kUnassigned);
        backtrack(sys, forced, std::numeric_limits<std::size_t>::max(), nodes,
                  [&](const Configuration&) { return ++count <= cap; });
        return std::min(count, cap + 1);
    } catch (const CapExceeded&) {
        return cap + 1;
    }
}

SearchResult find_feasible(const SpinSystem& sys, const Configuration& forced,
                           std::size_t node_budget) {
    if (forced.size() != sys.site_count())
        throw std::invalid_argument("forced assignment length must equal vertex count");
    SearchResult result;
    result.status = backtrack(sys, forced, node_budget, result.nodes, [&](const Configuration& c) {
        result.config = c;
        return false;
    });
    if (result.status != SearchStatus::found) result.config.clear();
    return result;
}

NonredundancyReport check_nonredundancy(const SpinSystem& sys, std::size_t cap) {
    NonredundancyReport report;
    const auto n = sys.site_count();
    const int q = sys.num_spins();
    try {
        auto states = enumerate_feasible(sys, cap);
        if (states.empty()) throw EmptyFeasibleSet("empty feasible set: " + sys.describe());
        std::vector<SpinMask> seen(n, 0);
        for (const auto& s : states)
            for (std::size_t v = 0; v < n; ++v) seen[v] |= SpinMask{1} << s[v];
        report.method = "enumeration";
        for (std::size_t v = 0; v < n; ++v) report.per_site.push_back(std::popcount(seen[v]) >= 2);
    } catch (const CapExceeded&) {
        report.method = "witness-search";
        report.per_site.assign(n, false);
        for (std::size_t v = 0; v < n; ++v) {
            int witnesses = 0;
            for (int s = 0; s < q && witnesses < 2; ++s) {
                Configuration forced(n, kUnassigned);
                forced[v] = Spin(s);
                auto res = find_feasible(sys, forced, 1'000'000);
                if (res.status == SearchStatus::budget_exhausted)
                    throw CapExceeded("nonredundancy undecidable within search budget at site " +
                                          std::to_string(v),
                                      res.nodes);
                witnesses += res.status == SearchStatus::found;
            }
            report.per_site[v] = witnesses >= 2;
        }
    }
    report.pass = std::all_of(report.per_site.begin(), report.per_site.end(), [](bool b) { return b; });
    return report;
}

ConditionedSystem condition_on(const SpinSystem& sys, const VertexSet& region,
                               const Configuration& fixed) {
    if (region.empty()) throw std::invalid_argument("conditioning region must be nonempty");
    if (fixed.size() != sys.site_count())
        throw std::invalid_argument("fixed configuration length must equal vertex count");
    for (Vertex v : region)
        if (!sys.graph().valid(v)) throw std::invalid_argument("invalid vertex " + std::to_string(v));
    std::vector<Vertex> sites = region.members();
    for (std::size_t v = 0; v < sys.site_count(); ++v) {
        if (!region.contains(Vertex(v)) && fixed[v] >= sys.num_spins())
            throw std::invalid_argument("fixed spin missing at site " + std::to_string(v));
    }
    ConditionedSystem out;
    out.system = sys.restricted(induced_subgraph(sys.graph(), sites), sites, fixed);
    out.local_to_global = std::move(sites);
    return out;
}

std::string format_configuration(const Configuration& sigma) {
    std::string out;
    bool wide = false;
    for (Spin s : sigma) wide |= s >= 10;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (wide && i) out += '.';
        if (sigma[i] == kUnassigned) out += '?';
        else out += std::to_string(int(sigma[i]));
    }
    return out;
}

}  // namespace glauber
