#include "glauber/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "glauber/exact.hpp"

namespace glauber {

UpdateKernel::UpdateKernel(SystemPtr sys) : system_(std::move(sys)) {
    if (!system_) throw std::invalid_argument("kernel requires a spin system");
}

namespace {

class HeatBathKernel final : public UpdateKernel {
public:
    explicit HeatBathKernel(SystemPtr sys) : UpdateKernel(std::move(sys)) {}
    std::string kind() const override { return "heat_bath"; }
    void evaluate(Configuration& scratch, Vertex v, std::span<double> out) const override {
        conditional_into(system(), scratch, v, out);
    }
};

class MetropolisKernel final : public UpdateKernel {
public:
    explicit MetropolisKernel(SystemPtr sys) : UpdateKernel(std::move(sys)) {}
    std::string kind() const override { return "metropolis"; }
    void evaluate(Configuration& scratch, Vertex v, std::span<double> out) const override {
        const int q = system().num_spins();
        conditional_into(system(), scratch, v, out);
        const Spin s = scratch[std::size_t(v)];
        const double here = out[s];
        if (!(here > 0.0))
            throw std::invalid_argument("metropolis kernel evaluated at an infeasible configuration");
        double stay = 1.0;
        for (int t = 0; t < q; ++t) {
            if (t == s) continue;
            const double p = std::min(out[std::size_t(t)] / here, 1.0) / q;
            out[std::size_t(t)] = p;
            stay -= p;
        }
        out[s] = stay;
    }
};

class FlipKernel final : public UpdateKernel {
public:
    FlipKernel(SystemPtr sys, double p) : UpdateKernel(std::move(sys)), p_(p) {
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("flip probability must lie in (0, 1]");
        if (system().kind() != SystemKind::product_coin)
            throw std::invalid_argument("flip kernel requires an unconstrained product system");
    }
    std::string kind() const override { return "flip"; }
    std::string describe() const override {
        std::ostringstream os;
        os << "flip(p=" << p_ << ")";
        return os.str();
    }
    void evaluate(Configuration& scratch, Vertex v, std::span<double> out) const override {
        const int q = system().num_spins();
        std::fill(out.begin(), out.end(), p_ / (q - 1));
        out[scratch[std::size_t(v)]] = 1.0 - p_;
    }

private:
    double p_;
};

class CycleBlockRuleKernel final : public UpdateKernel {
public:
    explicit CycleBlockRuleKernel(SystemPtr sys) : UpdateKernel(std::move(sys)) {
        if (system().num_spins() != 2) throw std::invalid_argument("cycle_block_rule needs spins {0,1}");
        for (std::size_t v = 0; v < system().site_count(); ++v)
            if (system().graph().degree(Vertex(v)) != 2)
                throw std::invalid_argument("cycle_block_rule requires a cycle");
    }
    std::string kind() const override { return "cycle_block_rule"; }
    void evaluate(Configuration& scratch, Vertex v, std::span<double> out) const override {
        const auto& nb = system().graph().neighbors(v);
        const Spin s = scratch[std::size_t(v)];
        const bool differ = scratch[std::size_t(nb[0])] != scratch[std::size_t(nb[1])];
        out[0] = out[1] = 0.0;
        out[differ ? 1 - s : s] = 1.0;
    }
};

class CustomKernel final : public UpdateKernel {
public:
    CustomKernel(SystemPtr sys, KernelFunction fn, std::string name)
        : UpdateKernel(std::move(sys)), fn_(std::move(fn)), name_(std::move(name)) {
        if (!fn_) throw std::invalid_argument("custom kernel requires a function");
    }
    std::string kind() const override { return name_; }
    void evaluate(Configuration& scratch, Vertex v, std::span<double> out) const override {
        fn_(scratch, v, out);
    }

private:
    KernelFunction fn_;
    std::string name_;
};

class RestrictedKernel final : public UpdateKernel {
public:
    RestrictedKernel(KernelPtr base, VertexSet active)
        : UpdateKernel(base->system_ptr()), base_(std::move(base)), active_(system().site_count(), 0) {
        for (Vertex v : active) {
            if (!system().graph().valid(v)) throw std::invalid_argument("invalid vertex in active set");
            active_[std::size_t(v)] = 1;
        }
    }
    std::string kind() const override { return "restricted(" + base_->kind() + ")"; }
    void evaluate(Configuration& scratch, Vertex v, std::span<double> out) const override {
        if (active_[std::size_t(v)]) {
            base_->evaluate(scratch, v, out);
            return;
        }
        std::fill(out.begin(), out.end(), 0.0);
        out[scratch[std::size_t(v)]] = 1.0;
    }

private:
    KernelPtr base_;
    std::vector<char> active_;
};

}  // namespace

KernelPtr heat_bath_kernel(SystemPtr sys) { return std::make_shared<HeatBathKernel>(std::move(sys)); }
KernelPtr metropolis_kernel(SystemPtr sys) {
    return std::make_shared<MetropolisKernel>(std::move(sys));
}
KernelPtr flip_kernel(SystemPtr sys, double flip_prob) {
    return std::make_shared<FlipKernel>(std::move(sys), flip_prob);
}
KernelPtr cycle_block_rule_kernel(SystemPtr sys) {
    return std::make_shared<CycleBlockRuleKernel>(std::move(sys));
}
KernelPtr custom_kernel(SystemPtr sys, KernelFunction fn, std::string name) {
    return std::make_shared<CustomKernel>(std::move(sys), std::move(fn), std::move(name));
}
KernelPtr restricted_kernel(KernelPtr base, VertexSet active) {
    if (!base) throw std::invalid_argument("restricted kernel requires a base kernel");
    return std::make_shared<RestrictedKernel>(std::move(base), std::move(active));
}

SiteSelector SiteSelector::uniform(std::size_t n) {
    return SiteSelector(std::vector<double>(n, 1.0));
}

SiteSelector::SiteSelector(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("site selector needs at least one site");
    cumulative_.reserve(weights_.size());
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("site weights must be positive and finite");
        total_ += w;
        cumulative_.push_back(total_);
        uniform_ = uniform_ && w == weights_.front();
    }
}

Vertex SiteSelector::draw(RngStream& rng) const {
    if (uniform_) return Vertex(rng.below(weights_.size()));
    const double u = rng.uniform() * total_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return Vertex(it - cumulative_.begin());
}

Dynamics::Dynamics(KernelPtr kernel, SiteSelector selector, double laziness)
    : kernel_(std::move(kernel)), selector_(std::move(selector)), laziness_(laziness) {
    if (!kernel_) throw std::invalid_argument("dynamics requires a kernel");
    if (selector_.size() != kernel_->system().site_count())
        throw std::invalid_argument("selector size must equal vertex count");
    if (!(laziness >= 0.0 && laziness < 1.0)) throw std::invalid_argument("laziness must lie in [0, 1)");
}

Dynamics::Dynamics(KernelPtr kernel, double laziness)
    : Dynamics(kernel, SiteSelector::uniform(kernel ? kernel->system().site_count() : 1), laziness) {}

std::string Dynamics::describe() const {
    std::ostringstream os;
    os << kernel_->describe() << " on " << system().describe();
    if (laziness_ > 0) os << " lazy=" << laziness_;
    if (!selector_.is_uniform()) os << " nonuniform-selector";
    return os.str();
}

Spin sample_spin(std::span<const double> p, double u) {
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        if (p[s] <= 0.0) continue;
        acc += p[s];
        last = s;
        if (u < acc) return Spin(s);
    }
    return Spin(last);
}

Vertex apply_step(const Dynamics& dyn, Configuration& sigma, RngStream& rng, Spin* before) {
    const Vertex v = dyn.selector().draw(rng);
    if (dyn.laziness() > 0.0 && rng.uniform() < dyn.laziness()) return -1;
    if (before) *before = sigma[std::size_t(v)];
    std::array<double, kMaxSpins> buf;
    std::span<double> p(buf.data(), std::size_t(dyn.system().num_spins()));
    dyn.kernel().evaluate(sigma, v, p);
    sigma[std::size_t(v)] = sample_spin(p, rng.uniform());
    return v;
}

Configuration step_discrete(const Dynamics& dyn, const Configuration& sigma, RngStream& rng) {
    if (!dyn.system().is_feasible(sigma))
        throw std::invalid_argument("step_discrete requires a feasible configuration");
    Configuration out = sigma;
    apply_step(dyn, out, rng);
    return out;
}

std::size_t advance_continuous(const Dynamics& dyn, Configuration& sigma, double t, RngStream& rng,
                               std::vector<Event>* log) {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
    const double rate = dyn.clock_rate();
    double now = 0.0;
    std::size_t rings = 0;
    while (true) {
        now += rng.exponential(rate);
        if (now > t) break;
        ++rings;
        if (log) {
            Event e{now, -1, 0, 0};
            e.site = apply_step(dyn, sigma, rng, &e.before);
            if (e.site >= 0) e.after = sigma[std::size_t(e.site)];
            log->push_back(e);
        } else {
            apply_step(dyn, sigma, rng);
        }
    }
    return rings;
}

Configuration run_continuous(const Dynamics& dyn, const Configuration& sigma0, double t,
                             RngStream& rng, std::vector<Event>* log) {
    if (!dyn.system().is_feasible(sigma0))
        throw std::invalid_argument("run_continuous requires a feasible configuration");
    Configuration sigma = sigma0;
    advance_continuous(dyn, sigma, t, rng, log);
    return sigma;
}

DetailedBalanceReport check_detailed_balance(const Dynamics& dyn, const ExactChain& chain,
                                             double tolerance) {
    DetailedBalanceReport rep;
    const int q = dyn.system().num_spins();
    const auto n = dyn.system().site_count();
    std::vector<double> ki(static_cast<std::size_t>(q)), kj(static_cast<std::size_t>(q));
    for (std::size_t i = 0; i < chain.size(); ++i) {
        Configuration sigma = chain.state(i);
        for (std::size_t v = 0; v < n; ++v) {
            dyn.kernel().evaluate(sigma, Vertex(v), ki);
            const Spin s = sigma[v];
            for (int t = 0; t < q; ++t) {
                if (t == s) continue;
                sigma[v] = Spin(t);
                const auto j = chain.index_of(sigma);
                double lhs = chain.stationary()[i] * ki[std::size_t(t)];
                double rhs = 0.0;
                if (j) {
                    dyn.kernel().evaluate(sigma, Vertex(v), kj);
                    rhs = chain.stationary()[*j] * kj[s];
                }
                sigma[v] = s;
                const double scale = std::max(lhs, rhs);
                const double viol = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
                if (viol > rep.max_relative_violation) {
                    rep.max_relative_violation = viol;
                    rep.state = i;
                    rep.site = Vertex(v);
                    rep.new_spin = Spin(t);
                }
            }
        }
    }
    rep.pass = rep.max_relative_violation < tolerance;
    if (!rep.pass) {
        std::ostringstream os;
        os << "violation " << rep.max_relative_violation << " at state "
           << format_configuration(chain.state(rep.state)) << " site " << rep.site << " -> spin "
           << int(rep.new_spin);
        rep.detail = os.str();
    }
    return rep;
}

ErgodicityReport check_ergodicity(const ExactChain& chain) {
    ErgodicityReport rep;
    const auto m = chain.size();
    // Strongly connected components (iterative Tarjan).
    std::vector<int> index(m, -1), low(m, 0), comp(m, -1);
    std::vector<char> on_stack(m, 0);
    std::vector<std::size_t> stack, call, edge_pos;
    int counter = 0;
    std::size_t ncomp = 0;
    for (std::size_t root = 0; root < m; ++root) {
        if (index[root] >= 0) continue;
        call.push_back(root);
        edge_pos.push_back(chain.row_begin(root));
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            const std::size_t u = call.back();
            std::size_t& pos = edge_pos.back();
            if (pos < chain.row_end(u)) {
                const std::size_t w = chain.col(pos++);
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back(w);
                    edge_pos.push_back(chain.row_begin(w));
                } else if (on_stack[w]) {
                    low[u] = std::min(low[u], index[w]);
                }
                continue;
            }
            if (low[u] == index[u]) {
                while (true) {
                    const std::size_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = int(ncomp);
                    if (w == u) break;
                }
                ++ncomp;
            }
            call.pop_back();
            edge_pos.pop_back();
            if (!call.empty()) low[call.back()] = std::min(low[call.back()], low[u]);
        }
    }
    rep.classes = ncomp;
    rep.irreducible = ncomp == 1;
    // Period of the class containing state 0: gcd of level(u) + 1 - level(w) over edges.
    std::vector<long> level(m, -1);
    std::vector<std::size_t> queue{0};
    level[0] = 0;
    long g = 0;
    for (std::size_t k = 0; k < queue.size(); ++k) {
        const std::size_t u = queue[k];
        for (std::size_t p = chain.row_begin(u); p < chain.row_end(u); ++p) {
            const std::size_t w = chain.col(p);
            if (comp[w] != comp[0]) continue;
            if (level[w] < 0) {
                level[w] = level[u] + 1;
                queue.push_back(w);
            } else {
                g = std::gcd(g, std::labs(level[u] + 1 - level[w]));
            }
        }
    }
    rep.period = std::size_t(g);
    rep.aperiodic = g == 1;
    return rep;
}

}  // namespace glauber
