#include "glauber/coupling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace glauber {

namespace {

// Inverse CDF of the weights w at u in [0, sum w).
Spin quantile(std::span<const double> w, double u) {
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t s = 0; s < w.size(); ++s) {
        if (w[s] <= 0.0) continue;
        acc += w[s];
        last = s;
        if (u < acc) return Spin(s);
    }
    return Spin(last);
}

}  // namespace

std::pair<Spin, Spin> couple_update(std::span<const double> p, std::span<const double> q, double u) {
    if (p.size() != q.size() || p.empty())
        throw std::invalid_argument("couple_update: distributions must share a nonempty spin set");
    std::array<double, kMaxSpins> common{}, px{}, qy{};
    double m = 0.0, mp = 0.0, mq = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        common[s] = std::min(p[s], q[s]);
        px[s] = std::max(p[s] - q[s], 0.0);
        qy[s] = std::max(q[s] - p[s], 0.0);
        m += common[s];
        mp += px[s];
        mq += qy[s];
    }
    const std::size_t k = p.size();
    if (u < m || mp <= 0.0 || mq <= 0.0) {
        const double uu = std::min(u, m * (1.0 - 1e-16));
        const Spin s = quantile(std::span<const double>(common.data(), k), uu);
        return {s, s};
    }
    // Residual: same rescaled uniform into both positive parts.
    const double v = (u - m) / (1.0 - m);
    return {quantile(std::span<const double>(px.data(), k), v * mp),
            quantile(std::span<const double>(qy.data(), k), v * mq)};
}

std::pair<Spin, Spin> couple_update(std::span<const double> p, std::span<const double> q,
                                    RngStream& rng) {
    return couple_update(p, q, rng.uniform());
}

std::vector<std::vector<double>> coupling_joint_table(std::span<const double> p,
                                                      std::span<const double> q) {
    const std::size_t k = p.size();
    std::vector<double> cuts{0.0, 1.0};
    double m = 0.0, mp = 0.0, mq = 0.0;
    for (std::size_t s = 0; s < k; ++s) m += std::min(p[s], q[s]);
    double acc = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
        acc += std::min(p[s], q[s]);
        cuts.push_back(acc);
        mp += std::max(p[s] - q[s], 0.0);
        mq += std::max(q[s] - p[s], 0.0);
    }
    double ax = 0.0, ay = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
        ax += std::max(p[s] - q[s], 0.0);
        ay += std::max(q[s] - p[s], 0.0);
        if (mp > 0) cuts.push_back(m + (1.0 - m) * ax / mp);
        if (mq > 0) cuts.push_back(m + (1.0 - m) * ay / mq);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::vector<double>> joint(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0.0) continue;
        auto [a, b] = couple_update(p, q, 0.5 * (cuts[i] + cuts[i + 1]));
        joint[a][b] += len;
    }
    return joint;
}

CoupledPair::CoupledPair(Configuration x, Configuration y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size()) throw std::invalid_argument("coupled configurations differ in length");
    for (std::size_t i = 0; i < x_.size(); ++i) count_ += x_[i] != y_[i];
}

VertexSet CoupledPair::disagreements() const {
    std::vector<Vertex> out;
    for (std::size_t i = 0; i < x_.size(); ++i)
        if (x_[i] != y_[i]) out.push_back(Vertex(i));
    return VertexSet(std::move(out));
}

void CoupledPair::set(Vertex v, Spin sx, Spin sy) {
    const auto i = std::size_t(v);
    count_ -= x_[i] != y_[i];
    x_[i] = sx;
    y_[i] = sy;
    count_ += sx != sy;
}

namespace {

void require_compatible(const Dynamics& a, const Dynamics& b) {
    if (a.system().site_count() != b.system().site_count() ||
        a.system().num_spins() != b.system().num_spins())
        throw std::invalid_argument("coupled dynamics must share graph size and spin space");
    if (a.selector().weights() != b.selector().weights() || a.laziness() != b.laziness())
        throw std::invalid_argument("coupled dynamics must share site selector and laziness");
}

}  // namespace

CouplingRun run_greedy_coupling(const Dynamics& dyn_x, const Dynamics& dyn_y, CoupledPair pair0,
                                double t, RngStream& rng, bool keep_log) {
    require_compatible(dyn_x, dyn_y);
    if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
    if (!dyn_x.system().is_feasible(pair0.x()) || !dyn_y.system().is_feasible(pair0.y()))
        throw std::invalid_argument("coupled run requires feasible initial configurations");
    CouplingRun run{std::move(pair0), {}, {}, 0};
    const int q = dyn_x.system().num_spins();
    std::array<double, kMaxSpins> bx, by;
    std::span<double> px(bx.data(), std::size_t(q)), py(by.data(), std::size_t(q));
    const double rate = dyn_x.clock_rate();
    run.history.emplace_back(0.0, run.pair.disagreement_count());
    double now = 0.0;
    while (true) {
        now += rng.exponential(rate);
        if (now > t) break;
        ++run.events;
        const Vertex v = dyn_x.selector().draw(rng);
        if (dyn_x.laziness() > 0.0 && rng.uniform() < dyn_x.laziness()) continue;
        const double u = rng.uniform();
        auto& x = run.pair.x_scratch();
        auto& y = run.pair.y_scratch();
        const Spin xb = x[std::size_t(v)], yb = y[std::size_t(v)];
        dyn_x.kernel().evaluate(x, v, px);
        dyn_y.kernel().evaluate(y, v, py);
        const auto [sx, sy] = couple_update(px, py, u);
        const std::size_t before = run.pair.disagreement_count();
        run.pair.set(v, sx, sy);
        if (run.pair.disagreement_count() != before)
            run.history.emplace_back(now, run.pair.disagreement_count());
        if (keep_log) run.log.push_back({now, v, xb, yb, sx, sy});
    }
    return run;
}

PathAudit audit_disagreement_paths(const Graph& g, const VertexSet& sources,
                                   const VertexSet& targets, const CoupledPair& pair0,
                                   const CouplingRun& run) {
    PathAudit audit;
    const auto n = g.vertex_count();
    if (n > 1000) throw std::invalid_argument("path audit is limited to graphs with <= 1000 vertices");
    std::vector<char> infected(n, 0);
    std::vector<Vertex> pred(n, -1);
    std::vector<double> when(n, 0.0);
    for (Vertex v : sources) infected[std::size_t(v)] = 1;
    for (Vertex v : pair0.disagreements()) {
        if (!infected[std::size_t(v)]) {
            audit.containment_ok = false;
            audit.detail = "initial disagreement outside sources at " + std::to_string(v);
            return audit;
        }
    }
    CoupledPair replay = pair0;
    for (const auto& e : run.log) {
        const auto i = std::size_t(e.site);
        if (!infected[i]) {
            for (Vertex w : g.neighbors(e.site)) {
                if (infected[std::size_t(w)]) {
                    infected[i] = 1;
                    pred[i] = w;
                    when[i] = e.time;
                    break;
                }
            }
        }
        replay.set(e.site, e.x_after, e.y_after);
        if (replay.disagrees_at(e.site) && !infected[i]) {
            audit.containment_ok = false;
            std::ostringstream os;
            os << "disagreement at " << e.site << " (t=" << e.time << ") outside infection set";
            audit.detail = os.str();
            return audit;
        }
    }
    if (replay.x() != run.pair.x() || replay.y() != run.pair.y()) {
        audit.containment_ok = false;
        audit.detail = "log replay does not reproduce the final pair";
        return audit;
    }
    const auto dist = bfs_distances(g, sources.members());
    for (Vertex v : targets) {
        if (!run.pair.disagrees_at(v)) continue;
        ++audit.checked;
        std::size_t length = 0;
        double last = std::numeric_limits<double>::infinity();
        Vertex cur = v;
        while (pred[std::size_t(cur)] >= 0) {
            const Vertex p = pred[std::size_t(cur)];
            if (!(when[std::size_t(cur)] < last) || !g.adjacent(cur, p)) {
                audit.paths_ok = false;
                audit.detail = "non-increasing or non-adjacent path step at " + std::to_string(cur);
                return audit;
            }
            last = when[std::size_t(cur)];
            ++length;
            cur = p;
        }
        const int need = dist[std::size_t(v)];
        if (!sources.contains(cur) || (need >= 0 && length < std::size_t(need))) {
            audit.paths_ok = false;
            std::ostringstream os;
            os << "path to " << v << " has " << length << " updated sites, distance " << need;
            audit.detail = os.str();
            return audit;
        }
    }
    return audit;
}

double percolation_bound(std::size_t boundary_min, double t, std::size_t delta, int d) {
    if (d <= 0) throw std::invalid_argument("distance d must be positive");
    return 1.0 - double(boundary_min) *
                     std::pow(std::numbers::e * t * double(delta) / double(d), double(d));
}

double ball_percolation_bound(double t, std::size_t delta, int big_r, int small_r) {
    if (big_r <= small_r) throw std::invalid_argument("ball form requires R > r");
    const double k = double(big_r - small_r);
    return 1.0 - std::pow(std::numbers::e * t / k, k) * std::pow(double(delta), double(big_r));
}

namespace {

bool vacuous(double agreement_bound) { return agreement_bound <= 0.0 || agreement_bound >= 1.0; }

}  // namespace

PercolationReport percolation_experiment(const PercolationPlan& plan, std::uint64_t seed) {
    if (!plan.dyn_x || !plan.dyn_y) throw std::invalid_argument("percolation plan needs dynamics");
    if (plan.replicas == 0) throw std::invalid_argument("percolation plan needs replicas");
    if (plan.a.empty() || plan.a_prime.empty()) throw std::invalid_argument("A and A' must be nonempty");
    const Graph& g = plan.dyn_x->graph();
    const auto d = distance(g, plan.a, plan.a_prime);
    if (!d || *d <= 0) throw std::invalid_argument("A and A' must be at positive distance");
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (!plan.a.contains(Vertex(v)) && plan.x0[v] != plan.y0[v])
            throw std::invalid_argument("initial pair must agree outside A (site " + std::to_string(v) + ")");
    PercolationReport rep;
    rep.replicas = plan.replicas;
    rep.d = *d;
    rep.t = plan.t;
    rep.delta = plan.delta ? plan.delta : g.max_degree();
    rep.boundary_a = boundary(g, plan.a, BoundaryMode::internal).size();
    rep.boundary_a_prime = boundary(g, plan.a_prime, BoundaryMode::internal).size();
    // A set with no internal boundary touches nothing outside; count its members instead.
    if (rep.boundary_a == 0) rep.boundary_a = plan.a.size();
    if (rep.boundary_a_prime == 0) rep.boundary_a_prime = plan.a_prime.size();
    rep.bound_eq5 = percolation_bound(std::min(rep.boundary_a, rep.boundary_a_prime), plan.t, rep.delta, rep.d);
    rep.eq5_vacuous = vacuous(rep.bound_eq5);
    if (plan.ball) {
        rep.bound_eq6 = ball_percolation_bound(plan.t, rep.delta, plan.ball->big_r, plan.ball->r);
        rep.eq6_vacuous = vacuous(*rep.bound_eq6);
    }
    std::size_t count = 0;
    for (std::size_t k = 0; k < plan.replicas; ++k) {
        RngStream rng(seed, k);
        auto run = run_greedy_coupling(*plan.dyn_x, *plan.dyn_y, CoupledPair(plan.x0, plan.y0), plan.t, rng);
        bool differ = false;
        for (Vertex v : plan.a_prime) differ = differ || run.pair.disagrees_at(v);
        count += differ;
    }
    rep.disagreement = estimate_proportion(count, plan.replicas);
    return rep;
}

PercolationPlan ball_percolation_plan(DynamicsPtr dyn, Vertex center, int r, int big_r, double t,
                                      std::size_t replicas, Configuration x0, Configuration y0) {
    if (!dyn) throw std::invalid_argument("ball plan needs dynamics");
    if (r < 0 || big_r <= r) throw std::invalid_argument("ball plan requires 0 <= r < R");
    const Graph& g = dyn->graph();
    PercolationPlan plan;
    plan.dyn_x = dyn;
    plan.dyn_y = dyn;
    plan.a_prime = ball(g, center, r);
    plan.a = set_difference(all_vertices(g), ball(g, center, big_r - 1));
    plan.t = t;
    plan.replicas = replicas;
    plan.x0 = std::move(x0);
    plan.y0 = std::move(y0);
    plan.ball = BallForm{center, r, big_r};
    return plan;
}

PoissonPathResult poisson_path_prob(unsigned r, double t) {
    if (r < 1) throw std::invalid_argument("poisson_path_prob requires r >= 1");
    if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
    return {poisson_upper_tail(r, t), std::pow(std::numbers::e * t / double(r), double(r))};
}

Proportion poisson_path_monte_carlo(unsigned r, double t, std::size_t trials, RngStream& rng) {
    if (r < 1 || trials == 0) throw std::invalid_argument("monte carlo needs r >= 1 and trials > 0");
    std::size_t hits = 0;
    std::vector<std::vector<double>> rings(r);
    for (std::size_t k = 0; k < trials; ++k) {
        for (auto& c : rings) {
            c.clear();
            for (double s = rng.exponential(1.0); s < t; s += rng.exponential(1.0)) c.push_back(s);
        }
        // Greedy: earliest admissible ring of each clock in turn.
        double last = 0.0;
        bool ok = true;
        for (const auto& c : rings) {
            auto it = std::upper_bound(c.begin(), c.end(), last);
            if (it == c.end()) {
                ok = false;
                break;
            }
            last = *it;
        }
        hits += ok;
    }
    return estimate_proportion(hits, trials);
}

FrozenPersistenceReport frozen_persistence_experiment(const Dynamics& dyn, const Configuration& sigma0,
                                                      const VertexSet& a, const VertexSet& a_prime,
                                                      double t, std::size_t replicas,
                                                      std::uint64_t seed) {
    const SpinSystem& sys = dyn.system();
    const Graph& g = sys.graph();
    if (replicas == 0) throw std::invalid_argument("frozen persistence needs replicas");
    if (a.empty() || a_prime.empty()) throw std::invalid_argument("A and A' must be nonempty");
    const auto frozen = frozen_sites(sys, sigma0);
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        if (!a.contains(Vertex(v)) && !frozen.contains(Vertex(v)))
            throw std::invalid_argument("initial configuration is not frozen at site " + std::to_string(v) +
                                        " outside A");
    const auto d = distance(g, a, a_prime);
    if (!d || *d <= 0) throw std::invalid_argument("A and A' must be at positive distance");
    FrozenPersistenceReport rep;
    rep.replicas = replicas;
    rep.d = *d;
    rep.delta = g.max_degree();
    std::size_t ba = boundary(g, a, BoundaryMode::internal).size();
    std::size_t bap = boundary(g, a_prime, BoundaryMode::internal).size();
    if (ba == 0) ba = a.size();
    if (bap == 0) bap = a_prime.size();
    rep.persistence_bound = percolation_bound(std::min(ba, bap), t, rep.delta, rep.d);
    rep.joint_bound = 1.0 - rep.persistence_bound;
    const auto outside = set_difference(all_vertices(g), a);
    std::size_t kept = 0, joint = 0;
    for (std::size_t k = 0; k < replicas; ++k) {
        RngStream rng(seed, k);
        Configuration x = sigma0;
        advance_continuous(dyn, x, t, rng);
        bool same = true;
        for (Vertex v : a_prime) same = same && x[std::size_t(v)] == sigma0[std::size_t(v)];
        kept += same;
        if (!same) {
            bool all_frozen = true;
            for (Vertex v : outside)
                if (!is_frozen_at(sys, x, v)) {
                    all_frozen = false;
                    break;
                }
            joint += all_frozen;
        }
    }
    rep.persistence = estimate_proportion(kept, replicas);
    rep.joint = estimate_proportion(joint, replicas);
    return rep;
}

}  // namespace glauber
