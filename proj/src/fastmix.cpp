#include "glauber/fastmix.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace glauber {

namespace {

constexpr double kStochasticTol = 1e-12;

std::string pair_text(Vertex u, Vertex v) {
    return "(" + std::to_string(u) + ", " + std::to_string(v) + ")";
}

class EmbeddingSystem final : public SpinSystem {
public:
    EmbeddingSystem(GraphPtr square, GraphPtr base, WalkMatrix a, std::vector<double> pi0)
        : SpinSystem(std::move(square), 3), base_(std::move(base)), a_(std::move(a)),
          pi0_(std::move(pi0)) {}

    SystemKind kind() const override { return SystemKind::embedding; }
    std::string describe() const override { return "embedding(" + base_->description() + ")"; }

    double log_weight(const Configuration& sigma) const override {
        require_size(sigma);
        auto s = decode(sigma);
        if (!s) return kNegInf;
        return std::log(weight(*s));
    }

    std::vector<Configuration> enumerate(std::size_t cap) const override {
        std::vector<Configuration> out;
        const std::size_t n = site_count();
        auto push = [&](Configuration c) {
            if (out.size() >= cap) throw CapExceeded("state space exceeds cap", out.size());
            out.push_back(std::move(c));
        };
        for (std::size_t v = 0; v < n; ++v) {
            Configuration c(n, 0);
            c[v] = 1;
            push(c);
            if (a_.coeff(Vertex(v), Vertex(v)) > 0.0) {
                c[v] = 2;
                push(c);
            }
        }
        for (auto [u, w] : base_->edges()) {
            Configuration c(n, 0);
            c[std::size_t(u)] = c[std::size_t(w)] = 1;
            push(std::move(c));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::optional<EmbeddingState> decode(const Configuration& sigma) const {
        std::vector<Vertex> ones;
        Vertex two = -1;
        for (std::size_t v = 0; v < sigma.size(); ++v) {
            if (sigma[v] == 0) continue;
            if (sigma[v] == 1) {
                ones.push_back(Vertex(v));
                if (ones.size() > 2) return std::nullopt;
            } else if (sigma[v] == 2 && two < 0) {
                two = Vertex(v);
            } else {
                return std::nullopt;
            }
        }
        if (two >= 0) {
            if (!ones.empty() || a_.coeff(two, two) <= 0.0) return std::nullopt;
            return EmbeddingState{EmbeddingStateKind::loop, two, two};
        }
        if (ones.size() == 1) return EmbeddingState{EmbeddingStateKind::vertex, ones[0], ones[0]};
        if (ones.size() == 2 && base_->adjacent(ones[0], ones[1]))
            return EmbeddingState{EmbeddingStateKind::edge, ones[0], ones[1]};
        return std::nullopt;
    }

    double weight(const EmbeddingState& s) const {
        switch (s.kind) {
        case EmbeddingStateKind::vertex: return 0.5 * pi0_[std::size_t(s.u)];
        case EmbeddingStateKind::loop: return 0.5 * pi0_[std::size_t(s.u)] * a_.coeff(s.u, s.u);
        case EmbeddingStateKind::edge: return pi0_[std::size_t(s.u)] * a_.coeff(s.u, s.w);
        }
        return 0.0;
    }

    const Graph& base() const { return *base_; }
    const WalkMatrix& walk() const { return a_; }

private:
    GraphPtr base_;
    WalkMatrix a_;
    std::vector<double> pi0_;
};

class EmbeddingKernel final : public UpdateKernel {
public:
    explicit EmbeddingKernel(std::shared_ptr<const EmbeddingSystem> sys)
        : UpdateKernel(sys), emb_(std::move(sys)) {}

    std::string kind() const override { return "embedding"; }

    void evaluate(Configuration& sigma, Vertex v, std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
        const Graph& g0 = emb_->base();
        const WalkMatrix& a = emb_->walk();
        const Spin s = sigma[std::size_t(v)];
        if (s == 0) {
            for (Vertex w : g0.neighbors(v)) {
                if (sigma[std::size_t(w)] != 1) continue;
                bool isolated = true;
                for (Vertex z : g0.neighbors(w))
                    if (sigma[std::size_t(z)] != 0) {
                        isolated = false;
                        break;
                    }
                if (!isolated) continue;
                const double p = a.coeff(w, v);
                out[1] = p;
                out[0] = 1.0 - p;
                return;
            }
            out[0] = 1.0;
        } else if (s == 1) {
            for (Vertex w : g0.neighbors(v))
                if (sigma[std::size_t(w)] == 1) {
                    out[0] = out[1] = 0.5;
                    return;
                }
            const double p = a.coeff(v, v);
            out[2] = p;
            out[1] = 1.0 - p;
        } else {
            out[1] = 1.0;
        }
    }

private:
    std::shared_ptr<const EmbeddingSystem> emb_;
};

}  // namespace

BiasedTreeWalk biased_tree_walk(std::size_t branching, std::size_t height, double up_prob) {
    if (branching < 2) throw std::invalid_argument("biased tree walk requires branching >= 2");
    if (height < 1) throw std::invalid_argument("biased tree walk requires height >= 1");
    if (!(up_prob > 0.0 && up_prob < 1.0))
        throw std::invalid_argument("up probability must lie in (0, 1)");
    BiasedTreeWalk out;
    out.tree = tree_graph(branching, height);
    out.branching = branching;
    out.height = height;
    const std::size_t n = out.tree->vertex_count();
    const std::size_t first_leaf = (n - 1) / branching + ((n - 1) % branching ? 1 : 0);
    std::vector<Eigen::Triplet<double>> trip;
    const double child = (1.0 - up_prob) / double(branching);
    for (std::size_t v = 0; v < n; ++v) {
        const bool root = v == 0;
        const bool leaf = v >= first_leaf;
        double stay = 1.0;
        if (!root) {
            trip.emplace_back(int(v), int((v - 1) / branching), up_prob);
            stay -= up_prob;
        }
        if (!leaf) {
            for (std::size_t c = 1; c <= branching; ++c)
                trip.emplace_back(int(v), int(v * branching + c), child);
            stay -= 1.0 - up_prob;
        }
        if (stay > kStochasticTol) trip.emplace_back(int(v), int(v), stay);
    }
    out.walk.resize(int(n), int(n));
    out.walk.setFromTriplets(trip.begin(), trip.end());
    out.walk.makeCompressed();
    reversible_stationary(*out.tree, out.walk);
    return out;
}

std::vector<double> reversible_stationary(const Graph& g0, const WalkMatrix& a) {
    const std::size_t n = g0.vertex_count();
    if (std::size_t(a.rows()) != n || std::size_t(a.cols()) != n)
        throw std::invalid_argument("walk matrix size does not match the graph");
    for (int u = 0; u < a.outerSize(); ++u) {
        double sum = 0.0;
        for (WalkMatrix::InnerIterator it(a, u); it; ++it) {
            const Vertex v = Vertex(it.col());
            if (it.value() < 0.0)
                throw std::invalid_argument("negative walk entry at " + pair_text(u, v));
            if (it.value() > 0.0 && v != u && !g0.adjacent(u, v))
                throw std::invalid_argument("walk support off the graph at " + pair_text(u, v));
            sum += it.value();
        }
        if (std::abs(sum - 1.0) > 1e-10)
            throw std::invalid_argument("walk row " + std::to_string(u) + " sums to " +
                                        std::to_string(sum));
    }
    // Propagate pi along a BFS tree, then check every edge.
    std::vector<double> pi(n, -1.0);
    pi[0] = 1.0;
    std::queue<Vertex> q;
    q.push(0);
    while (!q.empty()) {
        Vertex u = q.front();
        q.pop();
        for (Vertex w : g0.neighbors(u)) {
            if (pi[std::size_t(w)] >= 0.0) continue;
            const double fwd = a.coeff(u, w), back = a.coeff(w, u);
            if (fwd <= 0.0 || back <= 0.0)
                throw std::invalid_argument("walk not reversible: one-way edge " + pair_text(u, w));
            pi[std::size_t(w)] = pi[std::size_t(u)] * fwd / back;
            q.push(w);
        }
    }
    double z = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        if (pi[v] < 0.0) throw std::invalid_argument("walk graph is disconnected");
        z += pi[v];
    }
    for (auto& p : pi) p /= z;
    for (auto [u, w] : g0.edges()) {
        const double lhs = pi[std::size_t(u)] * a.coeff(u, w);
        const double rhs = pi[std::size_t(w)] * a.coeff(w, u);
        if (std::abs(lhs - rhs) > 1e-12 * std::max(lhs, rhs))
            throw std::invalid_argument("walk not reversible at pair " + pair_text(u, w));
    }
    return pi;
}

ExactChain walk_chain(const WalkMatrix& a, const std::vector<double>& pi0) {
    const std::size_t n = std::size_t(a.rows());
    if (n > 65536) throw std::invalid_argument("walk chain limited to 65536 vertices");
    std::vector<Configuration> states(n);
    std::vector<std::size_t> rows{0};
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
    for (std::size_t v = 0; v < n; ++v) {
        states[v] = {Spin(v >> 8), Spin(v & 0xFF)};
        for (WalkMatrix::InnerIterator it(a, int(v)); it; ++it) {
            cols.push_back(std::uint32_t(it.col()));
            vals.push_back(it.value());
        }
        rows.push_back(cols.size());
    }
    return ExactChain(std::move(states), std::move(rows), std::move(cols), std::move(vals), pi0, 1.0);
}

Configuration EmbeddingDynamics::encode(const EmbeddingState& s) const {
    Configuration c(base->vertex_count(), 0);
    if (s.kind == EmbeddingStateKind::loop) {
        c[std::size_t(s.u)] = 2;
    } else {
        c[std::size_t(s.u)] = 1;
        c[std::size_t(s.w)] = 1;
    }
    return c;
}

EmbeddingState EmbeddingDynamics::decode(const Configuration& sigma) const {
    auto s = static_cast<const EmbeddingSystem&>(*system).decode(sigma);
    if (!s) throw std::invalid_argument("not an embedding state: " + format_configuration(sigma));
    return *s;
}

double EmbeddingDynamics::target_weight(const EmbeddingState& s) const {
    return static_cast<const EmbeddingSystem&>(*system).weight(s);
}

EmbeddingDynamics build_embedding_dynamics(GraphPtr g0, WalkMatrix a,
                                           std::optional<SiteSelector> selector) {
    if (!g0) throw std::invalid_argument("embedding requires a base graph");
    EmbeddingDynamics out;
    out.pi0 = reversible_stationary(*g0, a);
    out.base = g0;
    out.square = graph_square(g0);
    out.walk = a;
    auto sys = std::make_shared<const EmbeddingSystem>(out.square, g0, std::move(a), out.pi0);
    out.system = sys;
    KernelPtr kernel = std::make_shared<const EmbeddingKernel>(sys);
    const std::size_t n = g0->vertex_count();
    SiteSelector sel = selector ? *selector : SiteSelector::uniform(n);
    if (sel.size() != n) throw std::invalid_argument("selector size does not match the graph");
    out.dynamics = std::make_shared<const Dynamics>(kernel, std::move(sel));
    out.configurations = sys->enumerate(std::size_t(-1));
    out.labels.reserve(out.configurations.size());
    for (const auto& c : out.configurations) out.labels.push_back(*sys->decode(c));
    return out;
}

EmbeddingAudit audit_embedding(const EmbeddingDynamics& emb, const ExactChain& chain) {
    EmbeddingAudit rep;
    const std::size_t n = emb.base->vertex_count();
    std::size_t loops = 0;
    for (std::size_t v = 0; v < n; ++v) loops += emb.walk.coeff(int(v), int(v)) > 0.0;
    rep.expected_states = n + emb.base->edge_count() + loops;

    rep.bijection_ok = chain.size() == rep.expected_states &&
                       emb.configurations.size() == rep.expected_states;
    for (std::size_t i = 0; rep.bijection_ok && i < chain.size(); ++i)
        rep.bijection_ok = chain.state(i) == emb.configurations[i];

    rep.sum_preserved = true;
    const UpdateKernel& k = emb.dynamics->kernel();
    std::vector<double> row(3);
    for (std::size_t i = 0; i < chain.size() && rep.sum_preserved; ++i) {
        Configuration sigma = chain.state(i);
        int total = 0;
        for (Spin s : sigma) total += s;
        for (std::size_t v = 0; v < n && rep.sum_preserved; ++v) {
            k.evaluate(sigma, Vertex(v), row);
            for (int s = 0; s < 3; ++s) {
                if (row[std::size_t(s)] <= 0.0) continue;
                const int after = total - sigma[v] + s;
                if (after != 1 && after != 2) rep.sum_preserved = false;
            }
        }
    }

    std::vector<double> target(chain.size());
    double z = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) z += target[i] = emb.target_weight(emb.labels[i]);
    std::vector<std::size_t> vertex_index(n, 0);
    for (std::size_t i = 0; i < chain.size(); ++i) {
        target[i] /= z;
        rep.max_stationary_error =
            std::max(rep.max_stationary_error, std::abs(target[i] - chain.stationary()[i]));
        rep.max_success_error =
            std::max(rep.max_success_error, std::abs(1.0 - chain.entry(i, i) - 1.0 / double(n)));
        if (emb.labels[i].kind == EmbeddingStateKind::vertex)
            vertex_index[std::size_t(emb.labels[i].u)] = i;
    }
    auto moved = chain.step(target);
    for (std::size_t i = 0; i < chain.size(); ++i)
        rep.max_stationary_error = std::max(rep.max_stationary_error, std::abs(moved[i] - target[i]));

    // Two jumps of the embedded jump chain, vertex state to vertex state.
    auto jump = [&](std::size_t i, auto&& visit) {
        const double leave = 1.0 - chain.entry(i, i);
        for (std::size_t p = chain.row_begin(i); p < chain.row_end(i); ++p)
            if (chain.col(p) != i && chain.value(p) > 0.0) visit(chain.col(p), chain.value(p) / leave);
    };
    std::vector<double> acc(chain.size());
    for (std::size_t u = 0; u < n; ++u) {
        std::fill(acc.begin(), acc.end(), 0.0);
        jump(vertex_index[u], [&](std::size_t j, double pj) {
            jump(j, [&](std::size_t k2, double pk) { acc[k2] += pj * pk; });
        });
        for (std::size_t w = 0; w < n; ++w) {
            const double expect = 0.5 * ((u == w ? 1.0 : 0.0) + emb.walk.coeff(int(u), int(w)));
            rep.max_skeleton_error =
                std::max(rep.max_skeleton_error, std::abs(acc[vertex_index[w]] - expect));
        }
    }
    return rep;
}

DynamicsPtr kn_hardcore_dynamics(std::size_t n) {
    if (n < 2) throw std::invalid_argument("K_n hard-core requires n >= 2");
    auto sys = make_hardcore(complete_graph(n), HardCoreParams{1.0 / double(n)});
    return std::make_shared<const Dynamics>(metropolis_kernel(sys));
}

MixingResult kn_hardcore_lumped_mixing(std::size_t n) {
    if (n < 2) throw std::invalid_argument("K_n hard-core requires n >= 2");
    const double nn = double(n);
    const double e_to_s = 1.0 / (2.0 * nn * nn);
    const double e_to_o = (nn - 1.0) / (2.0 * nn * nn);
    const double back = 1.0 / (2.0 * nn);
    const double pi[3] = {0.5, 1.0 / (2.0 * nn), (nn - 1.0) / (2.0 * nn)};
    MixingResult res;
    res.method = "exact-worst-start";
    res.tau = 0;
    for (std::size_t start = 0; start < 2; ++start) {
        double mu[3] = {start == 0 ? 1.0 : 0.0, start == 1 ? 1.0 : 0.0, 0.0};
        std::size_t t = 0;
        auto tv = [&] {
            return 0.5 * (std::abs(mu[0] - pi[0]) + std::abs(mu[1] - pi[1]) + std::abs(mu[2] - pi[2]));
        };
        while (tv() > kMixingThreshold) {
            const double e = mu[0] * (1.0 - e_to_s - e_to_o) + (mu[1] + mu[2]) * back;
            const double s = mu[0] * e_to_s + mu[1] * (1.0 - back);
            const double o = mu[0] * e_to_o + mu[2] * (1.0 - back);
            mu[0] = e;
            mu[1] = s;
            mu[2] = o;
            if (++t > 1'000'000'000) throw std::runtime_error("lumped K_n chain did not mix");
        }
        if (double(t) > res.tau) {
            res.tau = double(t);
            res.worst_start = start;
        }
    }
    return res;
}

std::vector<std::size_t> tree_heights(const Graph& tree) {
    const std::size_t n = tree.vertex_count();
    if (tree.edge_count() + 1 != n) throw std::invalid_argument("selector requires a tree");
    Vertex root = 0;
    std::vector<int> depth = bfs_distances(tree, std::span<const Vertex>(&root, 1));
    int h = 0;
    for (int d : depth) {
        if (d < 0) throw std::invalid_argument("selector requires a connected tree");
        h = std::max(h, d);
    }
    std::vector<std::size_t> out(n);
    for (std::size_t v = 0; v < n; ++v) {
        const bool leaf = v != 0 && tree.degree(Vertex(v)) == 1;
        if (leaf && depth[v] != h) throw std::invalid_argument("selector requires a complete tree");
        out[v] = std::size_t(h - depth[v]);
    }
    return out;
}

SiteSelector nonuniform_tree_selector(const Graph& tree) {
    auto heights = tree_heights(tree);
    if (tree.vertex_count() < 2) throw std::invalid_argument("selector requires at least one edge");
    const double b = double(tree.degree(0));
    std::vector<double> w(heights.size());
    for (std::size_t v = 0; v < w.size(); ++v) w[v] = std::pow(b, double(heights[v]) / 2.0);
    return SiteSelector(std::move(w));
}

double nonuniform_selector_constant(std::size_t d, std::size_t h) {
    if (d < 3) throw std::invalid_argument("selector constant requires d >= 3");
    const double b = double(d - 1);
    return (1.0 - std::pow(b, -0.5)) / (1.0 - std::pow(b, -(double(h) + 1.0) / 2.0));
}

}  // namespace glauber
