#include "glauber/lower_bound.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "glauber/exact.hpp"

namespace glauber {

namespace {

constexpr double kE = std::numbers::e;

std::size_t resolve_delta(const Graph& g, std::size_t delta) {
    std::size_t d = delta == 0 ? g.max_degree() : delta;
    if (d < 2) throw std::invalid_argument("lower-bound construction requires Delta >= 2 (got " +
                                           std::to_string(d) + ")");
    return d;
}

// Ceil that ignores rounding noise on exact integers.
int robust_ceil(double x) { return int(std::ceil(x - 1e-9)); }

std::size_t ceil_ratio(double n, double denom) {
    return std::size_t(std::max(1.0, std::ceil(n / denom - 1e-12)));
}

BallTable build_ball_table(const SpinSystem& sys, Vertex center, int radius,
                           const Configuration& base, std::size_t cap) {
    BallTable t;
    t.center = center;
    VertexSet region = ball(sys.graph(), center, radius);
    ConditionedSystem cs = condition_on(sys, region, base);
    t.sites = cs.local_to_global;
    t.center_pos = std::size_t(std::lower_bound(t.sites.begin(), t.sites.end(), center) -
                               t.sites.begin());
    t.states = cs.system->enumerate(cap);
    if (t.states.empty()) throw EmptyFeasibleSet("ball around site " + std::to_string(center) +
                                                 " has no feasible extension");
    std::vector<double> lw(t.states.size());
    double mx = kNegInf;
    for (std::size_t i = 0; i < t.states.size(); ++i) {
        lw[i] = cs.system->log_weight(t.states[i]);
        mx = std::max(mx, lw[i]);
    }
    double z = 0.0;
    t.weights.resize(lw.size());
    for (std::size_t i = 0; i < lw.size(); ++i) z += t.weights[i] = std::exp(lw[i] - mx);
    for (auto& w : t.weights) w /= z;
    for (const auto& s : t.states) t.feasible_center_spins |= SpinMask{1} << s[t.center_pos];
    return t;
}

bool in_mask(SpinMask m, Spin s) { return (m >> s) & 1u; }

// Pr(sum of independent Bernoulli(p_i) >= k).
double poisson_binomial_tail(const std::vector<double>& p, std::size_t k) {
    std::vector<double> dist(p.size() + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j-- > 0;) {
            dist[j + 1] += dist[j] * p[i];
            dist[j] *= 1.0 - p[i];
        }
    double tail = 0.0;
    for (std::size_t j = k; j < dist.size(); ++j) tail += dist[j];
    return std::min(1.0, tail);
}

std::size_t threshold_count(const LowerBoundPlan& plan) {
    double c = double(plan.centers.size());
    return std::size_t(std::max(0.0, std::ceil(plan.mu_hat * c - 1e-9)));
}

std::size_t count_in_q(const LowerBoundPlan& plan, const Configuration& x) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < plan.centers.size(); ++i)
        if (in_mask(plan.q_sets[i], x[std::size_t(plan.centers[i])])) ++k;
    return k;
}

}  // namespace

LowerBoundParams lower_bound_params(std::size_t n, std::size_t delta) {
    if (delta < 2) throw std::invalid_argument("lower-bound construction requires Delta >= 2");
    if (n < 2) throw std::invalid_argument("lower-bound construction requires n >= 2");
    LowerBoundParams p;
    p.n = n;
    p.delta = delta;
    const double ln_n = std::log(double(n));
    const double ln_d = std::log(double(delta));
    p.R = std::max(1, robust_ceil(ln_n / (4.0 * ln_d)));
    p.T = ln_n / (8.0 * kE * double(delta) * ln_d);
    p.eps = 1.0 / (4.0 * std::exp(2.0 * p.T));
    p.target_centers = ceil_ratio(double(n), std::pow(double(delta), 2.0 * p.R));
    p.case1_min_centers = ceil_ratio(double(n), std::pow(double(delta), 3.0 * p.R));
    return p;
}

double mu_hat(double mu, double eps) {
    if (mu > 0.5) return mu - eps;
    if (mu < 0.5) return mu + eps;
    return 0.5;
}

double center_occupancy_bound(double mu, double t) { return cmd_occupancy_bound(mu, t); }

LowerBoundPlan plan_lower_bound(const SpinSystem& sys, const PlanOptions& opts) {
    const Graph& g = sys.graph();
    const std::size_t n = g.vertex_count();
    LowerBoundPlan plan;
    plan.params = lower_bound_params(n, resolve_delta(g, opts.delta));
    if (opts.r_override) {
        if (*opts.r_override < 1) throw std::invalid_argument("R must be >= 1");
        plan.params.R = *opts.r_override;
    }
    const int R = plan.params.R;
    if (!sys.is_local())
        throw std::invalid_argument("lower-bound plan requires a Markov random field; " +
                                    sys.describe() + " is not supported");

    SearchResult base = find_feasible(sys, Configuration(n, kUnassigned));
    if (base.status != SearchStatus::found)
        throw std::runtime_error("no feasible configuration found for the lower-bound plan");
    plan.base = std::move(base.config);
    if (opts.sample_sigma_u) {
        RngStream rng(opts.sigma_seed, kAuxStreamBase);
        std::vector<double> p(std::size_t(sys.num_spins()));
        for (int sweep = 0; sweep < 20; ++sweep)
            for (std::size_t v = 0; v < n; ++v) {
                conditional_into(sys, plan.base, Vertex(v), p);
                plan.base[v] = sample_spin(p, rng.uniform());
            }
    }

    // Greedy centers: dist_to_c[u] < 2R blocks u.
    std::vector<int> dist_to_c(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
        if (dist_to_c[v] >= 0 && dist_to_c[v] < 2 * R) continue;
        BallTable bt = build_ball_table(sys, Vertex(v), R - 1, plan.base, opts.ball_cap);
        if (std::popcount(bt.feasible_center_spins) < 2) continue;
        plan.centers.push_back(Vertex(v));
        plan.q_sets.push_back(bt.feasible_center_spins & (~bt.feasible_center_spins + 1));
        plan.balls.push_back(std::move(bt));
        // Bounded BFS update from the new center.
        std::vector<Vertex> frontier{Vertex(v)};
        std::vector<int> local(n, -1);
        local[v] = 0;
        for (int d = 0; d < 2 * R - 1 && !frontier.empty(); ++d) {
            std::vector<Vertex> next;
            for (Vertex a : frontier)
                for (Vertex b : g.neighbors(a))
                    if (local[std::size_t(b)] < 0) {
                        local[std::size_t(b)] = d + 1;
                        next.push_back(b);
                    }
            frontier.swap(next);
        }
        for (std::size_t u = 0; u < n; ++u)
            if (local[u] >= 0 && (dist_to_c[u] < 0 || local[u] < dist_to_c[u]))
                dist_to_c[u] = local[u];
    }

    std::vector<int> dc = bfs_distances(g, plan.centers);
    std::vector<Vertex> u_sites;
    for (std::size_t u = 0; u < n; ++u)
        if (dc[u] < 0 || dc[u] >= R) u_sites.push_back(Vertex(u));
    plan.u = VertexSet(std::move(u_sites));

    if (!plan.centers.empty() && plan.centers.size() >= plan.params.case1_min_centers) {
        plan.plan_case = PlanCase::case1;
        for (const auto& bt : plan.balls) {
            double m = 0.0;
            SpinMask q = plan.q_sets[plan.mu_v.size()];
            for (std::size_t i = 0; i < bt.states.size(); ++i)
                if (in_mask(q, bt.states[i][bt.center_pos])) m += bt.weights[i];
            plan.mu_v.push_back(m);
        }
        plan.mu = std::accumulate(plan.mu_v.begin(), plan.mu_v.end(), 0.0) /
                  double(plan.mu_v.size());
        plan.mu_hat = glauber::mu_hat(plan.mu, plan.params.eps);
        if (plan.centers.size() < plan.params.target_centers)
            plan.note = "center count below ceil(n/Delta^{2R})";
        return plan;
    }

    // Case 2: a site far from every center whose R-ball is frozen.
    Configuration scratch = plan.base;
    for (std::size_t v = 0; v < n; ++v) {
        if (dc[v] >= 0 && dc[v] < 3 * R) continue;
        bool ok = true;
        for (Vertex w : ball(g, Vertex(v), R))
            if (!is_frozen_at(sys, scratch, w)) {
                ok = false;
                break;
            }
        if (ok) {
            plan.plan_case = PlanCase::case2;
            plan.witness = Vertex(v);
            plan.note = "too few centers; frozen witness found";
            return plan;
        }
    }
    throw std::runtime_error("lower-bound plan: " + std::to_string(plan.centers.size()) +
                             " centers (< " + std::to_string(plan.params.case1_min_centers) +
                             ") and no frozen witness");
}

Configuration sample_conditioned_initial(const LowerBoundPlan& plan, const SpinSystem& sys,
                                         RngStream& rng) {
    if (plan.plan_case != PlanCase::case1)
        throw std::invalid_argument("conditioned initial state needs a Case-1 plan");
    if (plan.base.size() != sys.site_count())
        throw std::invalid_argument("plan and system sizes differ");
    Configuration x = plan.base;
    for (std::size_t b = 0; b < plan.balls.size(); ++b) {
        const BallTable& bt = plan.balls[b];
        const SpinMask q = plan.q_sets[b];
        auto admissible = [&](std::size_t i) {
            return in_mask(q, bt.states[i][bt.center_pos]) != plan.flipped;
        };
        double z = 0.0;
        for (std::size_t i = 0; i < bt.states.size(); ++i)
            if (admissible(i)) z += bt.weights[i];
        if (z <= 0.0) throw std::runtime_error("ball has no admissible state");
        double u = rng.uniform() * z;
        std::size_t pick = bt.states.size();
        for (std::size_t i = 0; i < bt.states.size(); ++i) {
            if (!admissible(i)) continue;
            pick = i;
            u -= bt.weights[i];
            if (u < 0.0) break;
        }
        const Configuration& s = bt.states[pick];
        for (std::size_t j = 0; j < bt.sites.size(); ++j) x[std::size_t(bt.sites[j])] = s[j];
    }
    return x;
}

double center_fraction(const LowerBoundPlan& plan, const Configuration& x) {
    if (plan.centers.empty()) return 0.0;
    return double(count_in_q(plan, x)) / double(plan.centers.size());
}

DistinguisherReport run_distinguisher(LowerBoundPlan& plan, const Dynamics& dyn,
                                      const DistinguisherOptions& opts) {
    if (plan.plan_case != PlanCase::case1 || plan.centers.empty())
        throw std::invalid_argument("distinguisher needs a Case-1 plan");
    if (opts.replicas == 0) throw std::invalid_argument("replicas must be positive");
    const SpinSystem& sys = dyn.system();
    const std::size_t n = sys.site_count();
    if (plan.base.size() != n) throw std::invalid_argument("plan and dynamics sizes differ");

    DistinguisherReport rep;
    rep.n = n;
    rep.delta = plan.params.delta;
    rep.R = plan.params.R;
    rep.T = plan.params.T;
    rep.eps = plan.params.eps;
    rep.mu = plan.mu;
    rep.mu_hat = plan.mu_hat;
    rep.centers = plan.centers.size();
    const std::size_t kthr = threshold_count(plan);

    // Stationary reference for the event {f >= mu_hat}.
    std::vector<char> ref_samples;
    if (sys.kind() == SystemKind::product_coin) {
        std::vector<double> p;
        for (SpinMask q : plan.q_sets) p.push_back(double(std::popcount(q)) / sys.num_spins());
        rep.phat_pi = poisson_binomial_tail(p, kthr);
        rep.pi_exact = true;
        rep.reference_method = "exact-product";
    } else if (count_feasible(sys, opts.exact_cap) <= opts.exact_cap) {
        auto states = enumerate_feasible(sys, opts.exact_cap);
        std::vector<double> lw(states.size());
        double mx = kNegInf;
        for (std::size_t i = 0; i < states.size(); ++i) mx = std::max(mx, lw[i] = sys.log_weight(states[i]));
        double z = 0.0, hit = 0.0;
        for (std::size_t i = 0; i < states.size(); ++i) {
            double w = std::exp(lw[i] - mx);
            z += w;
            if (count_in_q(plan, states[i]) >= kthr) hit += w;
        }
        rep.phat_pi = hit / z;
        rep.pi_exact = true;
        rep.reference_method = "exact-enumeration";
    } else {
        const std::size_t m = opts.reference_samples ? opts.reference_samples : opts.replicas;
        const double burn = opts.burn_in_factor > 0 ? opts.burn_in_factor
                                                    : 50.0 * std::log(double(n));
        RngStream rng(opts.seed, kReferenceStreamBase);
        Configuration x = plan.base;
        const double rate = dyn.clock_rate();
        // Per-site time units: n events ~ time n/rate.
        advance_continuous(dyn, x, burn * double(n) / rate, rng);
        ref_samples.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            advance_continuous(dyn, x, opts.thinning_factor * double(n) / rate, rng);
            ref_samples[i] = count_in_q(plan, x) >= kthr;
        }
        rep.pi_samples = m;
        rep.phat_pi = double(std::count(ref_samples.begin(), ref_samples.end(), 1)) / double(m);
        rep.reference_method = "long-run";
    }

    if (!plan.oriented) {
        plan.flipped = rep.phat_pi > 0.5;
        plan.oriented = true;
    }
    rep.flipped = plan.flipped;

    // Y-chain: the same kernel restricted to the union of balls.
    std::vector<Vertex> ball_sites;
    for (const auto& bt : plan.balls) ball_sites.insert(ball_sites.end(), bt.sites.begin(), bt.sites.end());
    std::sort(ball_sites.begin(), ball_sites.end());
    const Dynamics dyn_y(restricted_kernel(dyn.kernel_ptr(), VertexSet(ball_sites)), dyn.selector(),
                         dyn.laziness());

    const std::size_t c = plan.centers.size();
    const std::size_t cov_c = std::min<std::size_t>(c, 32);
    std::vector<double> y_mean(cov_c, 0.0);
    std::vector<double> y_joint(cov_c * cov_c, 0.0);
    double sum_fy = 0.0, sum_dis = 0.0;

    std::vector<char> x_samples(opts.replicas);
    for (std::size_t k = 0; k < opts.replicas; ++k) {
        RngStream rng(opts.seed, k);
        Configuration x0 = sample_conditioned_initial(plan, sys, rng);
        if (opts.run_y_chain) {
            CouplingRun run = run_greedy_coupling(dyn, dyn_y, CoupledPair(x0, x0), plan.params.T, rng);
            const Configuration& xt = run.pair.x();
            const Configuration& yt = run.pair.y();
            x_samples[k] = count_in_q(plan, xt) >= kthr;
            std::size_t dis = 0, in_start = 0;
            std::vector<char> ind(cov_c);
            for (std::size_t i = 0; i < c; ++i) {
                const auto v = std::size_t(plan.centers[i]);
                if (xt[v] != yt[v]) ++dis;
                bool s = in_mask(plan.q_sets[i], yt[v]) != plan.flipped;
                in_start += s;
                if (i < cov_c) ind[i] = s;
            }
            sum_dis += double(dis) / double(c);
            sum_fy += double(in_start) / double(c);
            for (std::size_t i = 0; i < cov_c; ++i) {
                y_mean[i] += ind[i];
                if (!ind[i]) continue;
                for (std::size_t j = i + 1; j < cov_c; ++j) y_joint[i * cov_c + j] += ind[j];
            }
        } else {
            advance_continuous(dyn, x0, plan.params.T, rng);
            x_samples[k] = count_in_q(plan, x0) >= kthr;
        }
    }

    rep.x_arm = estimate_proportion(std::span<const char>(x_samples));
    if (rep.pi_exact)
        rep.tv = tv_lower_bound_from_statistic(x_samples, rep.phat_pi);
    else
        rep.tv = tv_lower_bound_from_statistic(x_samples, ref_samples);

    if (opts.run_y_chain) {
        const double m = double(opts.replicas);
        rep.y_ran = true;
        rep.mean_f_y = sum_fy / m;
        rep.center_disagreement = sum_dis / m;
        const double mu_start = plan.flipped ? 1.0 - plan.mu : plan.mu;
        rep.occupancy_bound = center_occupancy_bound(mu_start, plan.params.T);
        for (std::size_t i = 0; i < cov_c; ++i) {
            const double pi_ = y_mean[i] / m;
            for (std::size_t j = i + 1; j < cov_c; ++j) {
                const double pj = y_mean[j] / m;
                const double cov = y_joint[i * cov_c + j] / m - pi_ * pj;
                const double var = pi_ * (1 - pi_) * pj * (1 - pj);
                if (var <= 0.0) continue;
                rep.max_cov_z = std::max(rep.max_cov_z, std::abs(cov) / std::sqrt(var / m));
            }
        }
    }
    return rep;
}

double frozen_distinguisher_bound(int big_r, std::size_t delta) {
    return 1.0 - 2.0 * std::exp(-double(big_r) / (3.0 * std::log(double(delta))));
}

double frozen_time_cap(int big_r, std::size_t delta) {
    return double(big_r) / (5.0 * kE * kE * double(delta) * std::log(double(delta)));
}

FrozenDistinguisherReport frozen_distinguisher(const Dynamics& dyn, Vertex v, int big_r,
                                               const Configuration& x0, const Configuration& y0,
                                               double t, std::size_t replicas, std::uint64_t seed,
                                               std::size_t delta) {
    const SpinSystem& sys = dyn.system();
    const Graph& g = sys.graph();
    FrozenDistinguisherReport rep;
    rep.delta = resolve_delta(g, delta);
    if (!g.valid(v)) throw std::invalid_argument("site " + std::to_string(v) + " out of range");
    if (big_r < 4) throw std::invalid_argument("R must be >= 4");
    if (replicas == 0) throw std::invalid_argument("replicas must be positive");
    if (x0.size() != g.vertex_count() || y0.size() != g.vertex_count())
        throw std::invalid_argument("configuration size mismatch");
    if (!sys.is_feasible(x0)) throw std::invalid_argument("X0 is infeasible");
    if (!sys.is_feasible(y0)) throw std::invalid_argument("Y0 is infeasible");
    if (x0[std::size_t(v)] == y0[std::size_t(v)])
        throw std::invalid_argument("Y0 must differ from X0 at site " + std::to_string(v));
    Configuration scratch = x0;
    const VertexSet big_ball = ball(g, v, big_r);
    for (Vertex w : big_ball)
        if (!is_frozen_at(sys, scratch, w))
            throw std::invalid_argument("X0 is not frozen at site " + std::to_string(w) +
                                        " inside B_R(" + std::to_string(v) + ")");
    rep.R = big_r;
    rep.T = t;
    rep.t_cap = frozen_time_cap(big_r, rep.delta);
    if (t < 0.0 || t > rep.t_cap * (1 + 1e-12))
        throw std::invalid_argument("T = " + std::to_string(t) + " outside [0, " +
                                    std::to_string(rep.t_cap) + "]");
    rep.r = int(std::floor(double(big_r) / (3.0 * std::log(double(rep.delta)))));
    rep.bound = frozen_distinguisher_bound(big_r, rep.delta);
    const VertexSet small_ball = ball(g, v, rep.r);

    auto agrees = [&](const Configuration& x) {
        for (Vertex w : small_ball)
            if (x[std::size_t(w)] != x0[std::size_t(w)]) return false;
        return true;
    };
    std::vector<char> xs(replicas), ys(replicas);
    for (std::size_t k = 0; k < replicas; ++k) {
        RngStream rx(seed, k);
        Configuration x = x0;
        advance_continuous(dyn, x, t, rx);
        xs[k] = agrees(x);
        RngStream ry(seed, kSecondArmStreamBase + k);
        Configuration y = y0;
        advance_continuous(dyn, y, t, ry);
        ys[k] = agrees(y);
    }
    rep.x_arm = estimate_proportion(std::span<const char>(xs));
    rep.y_arm = estimate_proportion(std::span<const char>(ys));
    rep.tv = tv_lower_bound_from_statistic(xs, ys);
    return rep;
}

}  // namespace glauber
