#include "glauber/exact.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace glauber {

namespace {

std::string key_of(const Configuration& sigma) {
    return std::string(reinterpret_cast<const char*>(sigma.data()), sigma.size());
}

}  // namespace

ExactChain::ExactChain(std::vector<Configuration> states, std::vector<std::size_t> row_start,
                       std::vector<std::uint32_t> cols, std::vector<double> values,
                       std::vector<double> stationary, double clock_rate)
    : states_(std::move(states)),
      row_start_(std::move(row_start)),
      cols_(std::move(cols)),
      values_(std::move(values)),
      stationary_(std::move(stationary)),
      clock_rate_(clock_rate) {
    const auto m = states_.size();
    if (m == 0) throw std::invalid_argument("exact chain needs at least one state");
    if (row_start_.size() != m + 1 || stationary_.size() != m || cols_.size() != values_.size())
        throw std::invalid_argument("inconsistent exact chain arrays");
    if (!(clock_rate_ > 0.0)) throw std::invalid_argument("clock rate must be positive");
    index_.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!index_.emplace(key_of(states_[i]), i).second)
            throw std::invalid_argument("duplicate state in exact chain");
        if (!(stationary_[i] > 0.0))
            throw std::invalid_argument("stationary vector must be strictly positive");
    }
    for (std::size_t i = 0; i < m; ++i) {
        double sum = 0.0;
        for (std::size_t p = row_begin(i); p < row_end(i); ++p) sum += values_[p];
        max_row_error_ = std::max(max_row_error_, std::abs(sum - 1.0));
    }
    auto pi_p = step(stationary_);
    for (std::size_t i = 0; i < m; ++i)
        stationary_residual_ = std::max(stationary_residual_, std::abs(pi_p[i] - stationary_[i]));
    auto erg = check_ergodicity(*this);
    irreducible_ = erg.irreducible;
    aperiodic_ = erg.aperiodic;
    if (!stationary_ok()) {
        std::ostringstream os;
        os << "stationary residual " << stationary_residual_ << " exceeds 1e-10";
        warning_ = os.str();
    }
    if (!irreducible_) {
        if (!warning_.empty()) warning_ += "; ";
        warning_ += "chain is not irreducible (" + std::to_string(erg.classes) +
                    " communicating classes); restrict to a start's class for mixing analysis";
    }
}

std::optional<std::size_t> ExactChain::index_of(const Configuration& sigma) const {
    auto it = index_.find(key_of(sigma));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double ExactChain::entry(std::size_t i, std::size_t j) const {
    auto first = cols_.begin() + std::ptrdiff_t(row_begin(i));
    auto last = cols_.begin() + std::ptrdiff_t(row_end(i));
    auto it = std::lower_bound(first, last, std::uint32_t(j));
    if (it == last || *it != j) return 0.0;
    return values_[std::size_t(it - cols_.begin())];
}

Eigen::MatrixXd ExactChain::dense() const {
    const auto m = size();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(Eigen::Index(m), Eigen::Index(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = row_begin(i); k < row_end(i); ++k)
            p(Eigen::Index(i), Eigen::Index(cols_[k])) += values_[k];
    return p;
}

void ExactChain::step_into(std::span<const double> mu, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
        const double w = mu[i];
        if (w == 0.0) continue;
        for (std::size_t k = row_begin(i); k < row_end(i); ++k) out[cols_[k]] += w * values_[k];
    }
}

std::vector<double> ExactChain::step(std::span<const double> mu) const {
    std::vector<double> out(size());
    step_into(mu, out);
    return out;
}

ExactChain build_exact_chain(const Dynamics& dyn, std::size_t cap) {
    const SpinSystem& sys = dyn.system();
    auto states = sys.enumerate(cap);
    if (states.empty()) throw EmptyFeasibleSet("empty feasible set: " + sys.describe());
    const auto m = states.size();
    const auto n = sys.site_count();
    const int q = sys.num_spins();
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(m);
    for (std::size_t i = 0; i < m; ++i) index.emplace(key_of(states[i]), i);

    std::vector<std::size_t> row_start{0};
    std::vector<std::uint32_t> cols;
    std::vector<double> values;
    std::vector<std::pair<std::uint32_t, double>> row;
    std::array<double, kMaxSpins> buf;
    std::span<double> k(buf.data(), std::size_t(q));
    const double rho = dyn.laziness();
    for (std::size_t i = 0; i < m; ++i) {
        Configuration sigma = states[i];
        row.clear();
        double diag = rho;
        for (std::size_t v = 0; v < n; ++v) {
            const double pv = (1.0 - rho) * dyn.selector().probability(Vertex(v));
            dyn.kernel().evaluate(sigma, Vertex(v), k);
            double sum = 0.0;
            for (int s = 0; s < q; ++s) {
                if (k[std::size_t(s)] < -1e-15 || !std::isfinite(k[std::size_t(s)]))
                    throw std::logic_error("kernel produced an invalid probability at site " +
                                           std::to_string(v));
                sum += k[std::size_t(s)];
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw std::logic_error("kernel row at site " + std::to_string(v) + " sums to " +
                                       std::to_string(sum));
            const Spin cur = sigma[v];
            for (int s = 0; s < q; ++s) {
                const double w = k[std::size_t(s)];
                if (w <= 0.0) continue;
                if (s == cur) {
                    diag += pv * w;
                    continue;
                }
                sigma[v] = Spin(s);
                auto it = index.find(key_of(sigma));
                sigma[v] = cur;
                if (it == index.end())
                    throw std::logic_error("kernel moves to an infeasible configuration from " +
                                           format_configuration(sigma) + " at site " +
                                           std::to_string(v));
                row.emplace_back(std::uint32_t(it->second), pv * w);
            }
        }
        row.emplace_back(std::uint32_t(i), diag);
        std::sort(row.begin(), row.end());
        for (std::size_t a = 0; a < row.size();) {
            std::size_t b = a;
            double w = 0.0;
            while (b < row.size() && row[b].first == row[a].first) w += row[b++].second;
            if (w > 0.0) {
                cols.push_back(row[a].first);
                values.push_back(w);
            }
            a = b;
        }
        row_start.push_back(cols.size());
    }

    std::vector<double> pi(m);
    double best = kNegInf;
    for (std::size_t i = 0; i < m; ++i) {
        pi[i] = sys.log_weight(states[i]);
        best = std::max(best, pi[i]);
    }
    double z = 0.0;
    for (auto& x : pi) {
        x = std::exp(x - best);
        z += x;
    }
    for (auto& x : pi) x /= z;
    return ExactChain(std::move(states), std::move(row_start), std::move(cols), std::move(values),
                      std::move(pi), dyn.clock_rate());
}

ExactChain restrict_to_class(const ExactChain& chain, std::size_t start) {
    if (start >= chain.size()) throw std::invalid_argument("start index out of range");
    const auto m = chain.size();
    std::vector<char> fwd(m, 0);
    std::vector<std::size_t> queue{start};
    fwd[start] = 1;
    for (std::size_t h = 0; h < queue.size(); ++h)
        for (std::size_t p = chain.row_begin(queue[h]); p < chain.row_end(queue[h]); ++p)
            if (!fwd[chain.col(p)]) {
                fwd[chain.col(p)] = 1;
                queue.push_back(chain.col(p));
            }
    // Backward reachability on the reversed graph.
    std::vector<std::vector<std::size_t>> rev(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = chain.row_begin(i); p < chain.row_end(i); ++p) rev[chain.col(p)].push_back(i);
    std::vector<char> bwd(m, 0);
    queue.assign(1, start);
    bwd[start] = 1;
    for (std::size_t h = 0; h < queue.size(); ++h)
        for (std::size_t w : rev[queue[h]])
            if (!bwd[w]) {
                bwd[w] = 1;
                queue.push_back(w);
            }
    std::vector<long> remap(m, -1);
    std::vector<Configuration> states;
    for (std::size_t i = 0; i < m; ++i)
        if (fwd[i] && bwd[i]) {
            remap[i] = long(states.size());
            states.push_back(chain.state(i));
        }
    std::vector<std::size_t> row_start{0};
    std::vector<std::uint32_t> cols;
    std::vector<double> values;
    std::vector<double> pi;
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (remap[i] < 0) continue;
        double lost = 0.0;
        for (std::size_t p = chain.row_begin(i); p < chain.row_end(i); ++p) {
            if (remap[chain.col(p)] < 0) {
                lost += chain.value(p);
                continue;
            }
            cols.push_back(std::uint32_t(remap[chain.col(p)]));
            values.push_back(chain.value(p));
        }
        if (lost > 1e-12)
            throw std::invalid_argument("communicating class of the start is not closed");
        row_start.push_back(cols.size());
        pi.push_back(chain.stationary()[i]);
        z += chain.stationary()[i];
    }
    for (auto& x : pi) x /= z;
    return ExactChain(std::move(states), std::move(row_start), std::move(cols), std::move(values),
                      std::move(pi), chain.clock_rate());
}

SpectralDecomposition spectral(const ExactChain& chain) {
    const auto m = Eigen::Index(chain.size());
    if (chain.size() > 6000)
        throw CapExceeded("dense spectral decomposition limited to 6000 states", chain.size());
    SpectralDecomposition out;
    out.sqrt_pi.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) out.sqrt_pi(i) = std::sqrt(chain.stationary()[std::size_t(i)]);
    Eigen::MatrixXd s = chain.dense();
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) s(i, j) *= out.sqrt_pi(i) / out.sqrt_pi(j);
    Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    // Descending eigenvalues.
    out.eigenvalues = solver.eigenvalues().reverse();
    out.basis = solver.eigenvectors().rowwise().reverse();
    // The top eigenspace may be degenerate for reducible chains; pin column 0 to sqrt(pi).
    Eigen::Index top = 1;
    while (top < m && out.eigenvalues(top) > 1.0 - 1e-9) ++top;
    Eigen::MatrixXd block(m, top + 1);
    block.col(0) = out.sqrt_pi;
    block.rightCols(top) = out.basis.leftCols(top);
    for (Eigen::Index c = 0; c <= top; ++c) {
        for (Eigen::Index p = 0; p < c; ++p) block.col(c) -= block.col(p).dot(block.col(c)) * block.col(p);
        const double nrm = block.col(c).norm();
        if (nrm > 1e-8) block.col(c) /= nrm;
        else block.col(c).setZero();
    }
    Eigen::Index filled = 0;
    for (Eigen::Index c = 0; c <= top && filled < top; ++c)
        if (block.col(c).squaredNorm() > 0.5) out.basis.col(filled++) = block.col(c);
    out.rates = chain.clock_rate() * (Eigen::VectorXd::Ones(m) - out.eigenvalues);
    return out;
}

std::string to_string(TimeKind kind) { return kind == TimeKind::discrete ? "discrete" : "continuous"; }

std::vector<double> evolve_discrete(const ExactChain& chain, std::span<const double> nu,
                                    std::size_t steps) {
    std::vector<double> a(nu.begin(), nu.end()), b(chain.size());
    for (std::size_t s = 0; s < steps; ++s) {
        chain.step_into(a, b);
        a.swap(b);
    }
    return a;
}

std::vector<double> evolve_continuous(const SpectralDecomposition& spec, std::span<const double> nu,
                                      double t) {
    const auto m = spec.sqrt_pi.size();
    Eigen::VectorXd x(m);
    for (Eigen::Index i = 0; i < m; ++i) x(i) = nu[std::size_t(i)] / spec.sqrt_pi(i);
    Eigen::VectorXd c = spec.basis.transpose() * x;
    for (Eigen::Index k = 0; k < m; ++k) c(k) *= std::exp(-spec.rates(k) * t);
    Eigen::VectorXd y = spec.basis * c;
    std::vector<double> out(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) out[std::size_t(i)] = y(i) * spec.sqrt_pi(i);
    return out;
}

std::vector<double> evolve_poisson_mixture(const ExactChain& chain, std::span<const double> nu,
                                           double t, double tail) {
    const double lam = chain.clock_rate() * t;
    std::vector<double> cur(nu.begin(), nu.end()), next(chain.size()), out(chain.size(), 0.0);
    if (lam == 0.0) return cur;
    for (std::size_t s = 0;; ++s) {
        const double logp = -lam + double(s) * std::log(lam) - std::lgamma(double(s) + 1.0);
        const double p = std::exp(logp);
        if (p > 0.0)
            for (std::size_t i = 0; i < cur.size(); ++i) out[i] += p * cur[i];
        // Past the mode the remaining terms are dominated by a geometric series.
        const double r = lam / double(s + 1);
        if (r < 1.0 && p * r / (1.0 - r) < tail) break;
        chain.step_into(cur, next);
        cur.swap(next);
    }
    return out;
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("tv_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return std::min(1.0, 0.5 * s);
}

std::vector<double> point_mass(const ExactChain& chain, std::size_t i) {
    std::vector<double> nu(chain.size(), 0.0);
    nu.at(i) = 1.0;
    return nu;
}

TVCurve tv_curve(const ExactChain& chain, const Configuration& sigma0, std::span<const double> times,
                 TimeKind kind) {
    auto start = chain.index_of(sigma0);
    if (!start) throw std::invalid_argument("tv_curve: start configuration is not a state");
    TVCurve curve;
    curve.kind = kind;
    const auto nu = point_mass(chain, *start);
    if (kind == TimeKind::discrete) {
        std::vector<std::pair<std::size_t, std::size_t>> order;
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (!(times[k] >= 0.0)) throw std::invalid_argument("times must be nonnegative");
            order.emplace_back(std::size_t(std::llround(times[k])), k);
        }
        std::sort(order.begin(), order.end());
        std::vector<double> tv(times.size());
        std::vector<double> cur = nu, next(chain.size());
        std::size_t at = 0;
        for (auto [steps, k] : order) {
            for (; at < steps; ++at) {
                chain.step_into(cur, next);
                cur.swap(next);
            }
            tv[k] = tv_distance(cur, chain.stationary());
        }
        for (std::size_t k = 0; k < times.size(); ++k)
            curve.samples.emplace_back(double(std::llround(times[k])), tv[k]);
        return curve;
    }
    const auto spec = spectral(chain);
    for (double t : times) {
        if (!(t >= 0.0)) throw std::invalid_argument("times must be nonnegative");
        auto law = evolve_continuous(spec, nu, t);
        auto mix = evolve_poisson_mixture(chain, nu, t);
        for (std::size_t i = 0; i < law.size(); ++i)
            curve.cross_check_gap = std::max(curve.cross_check_gap, std::abs(law[i] - mix[i]));
        curve.samples.emplace_back(t, tv_distance(law, chain.stationary()));
    }
    if (curve.cross_check_gap > 1e-9)
        throw std::logic_error("spectral and Poisson-mixture laws disagree by " +
                               std::to_string(curve.cross_check_gap));
    return curve;
}

double discrete_tv(const ExactChain& chain, std::size_t start, std::size_t steps) {
    return tv_distance(evolve_discrete(chain, point_mass(chain, start), steps), chain.stationary());
}

namespace {

std::vector<std::size_t> resolve_starts(const ExactChain& chain,
                                        std::span<const std::size_t> candidates, bool& lower_bound) {
    std::vector<std::size_t> starts;
    if (!candidates.empty()) {
        for (auto s : candidates) {
            if (s >= chain.size()) throw std::invalid_argument("candidate start out of range");
            starts.push_back(s);
        }
        lower_bound = starts.size() < chain.size();
        return starts;
    }
    if (chain.size() > 5000)
        throw std::invalid_argument("more than 5000 states: candidate starts are required");
    starts.resize(chain.size());
    std::iota(starts.begin(), starts.end(), std::size_t{0});
    lower_bound = false;
    return starts;
}

// Worst TV over the starts at continuous time t.
double worst_continuous_tv(const SpectralDecomposition& spec, const ExactChain& chain,
                           const std::vector<std::size_t>& starts, double t, std::size_t* arg) {
    const auto m = spec.sqrt_pi.size();
    Eigen::VectorXd decay(m);
    for (Eigen::Index k = 0; k < m; ++k) decay(k) = std::exp(-spec.rates(k) * t);
    double worst = -1.0;
    Eigen::MatrixXd rows(Eigen::Index(starts.size()), m);
    for (std::size_t r = 0; r < starts.size(); ++r)
        rows.row(Eigen::Index(r)) = spec.basis.row(Eigen::Index(starts[r])).cwiseProduct(decay.transpose());
    Eigen::MatrixXd laws = rows * spec.basis.transpose();
    for (std::size_t r = 0; r < starts.size(); ++r) {
        const double si = spec.sqrt_pi(Eigen::Index(starts[r]));
        double s = 0.0;
        for (Eigen::Index j = 0; j < m; ++j)
            s += std::abs(laws(Eigen::Index(r), j) * spec.sqrt_pi(j) / si - chain.stationary()[std::size_t(j)]);
        const double tv = std::min(1.0, 0.5 * s);
        if (tv > worst) {
            worst = tv;
            if (arg) *arg = starts[r];
        }
    }
    return worst;
}

}  // namespace

MixingResult mixing_time(const ExactChain& chain, TimeKind kind,
                         std::span<const std::size_t> candidate_starts, std::size_t max_steps) {
    MixingResult res;
    const auto starts = resolve_starts(chain, candidate_starts, res.lower_bound);
    res.method = res.lower_bound ? "exact-candidate-start" : "exact-worst-start";
    if (kind == TimeKind::discrete) {
        if (!chain.ergodic())
            throw std::invalid_argument("mixing time requires an ergodic chain (" +
                                        std::string(chain.irreducible() ? "periodic" : "reducible") +
                                        ")");
        std::vector<double> cur(chain.size()), next(chain.size());
        std::size_t worst = 0;
        for (auto s : starts) {
            std::fill(cur.begin(), cur.end(), 0.0);
            cur[s] = 1.0;
            std::size_t t = 0;
            while (tv_distance(cur, chain.stationary()) > kMixingThreshold) {
                if (t >= max_steps)
                    throw std::runtime_error("mixing time exceeds step guard " + std::to_string(max_steps));
                chain.step_into(cur, next);
                cur.swap(next);
                ++t;
            }
            if (s == starts.front() || t > worst) {
                worst = t;
                res.worst_start = s;
            }
        }
        res.tau = double(worst);
        return res;
    }
    if (!chain.irreducible()) throw std::invalid_argument("mixing time requires an irreducible chain");
    const auto spec = spectral(chain);
    auto g = [&](double t) { return worst_continuous_tv(spec, chain, starts, t, &res.worst_start); };
    if (g(0.0) <= kMixingThreshold) {
        res.tau = 0.0;
        return res;
    }
    double lo = 0.0;
    double hi = 1.0 / chain.clock_rate();
    while (g(hi) > kMixingThreshold) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("continuous mixing time bracket diverged");
    }
    while (hi - lo > 1e-5 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > kMixingThreshold) lo = mid;
        else hi = mid;
    }
    res.tau = hi;
    g(hi);
    return res;
}

std::vector<CmdTerm> cmd_coefficients(const ExactChain& chain, const SpectralDecomposition& spec,
                                      std::span<const std::size_t> psi) {
    if (psi.empty()) throw std::invalid_argument("cmd_coefficients: empty state set");
    double mass = 0.0;
    for (auto i : psi) {
        if (i >= chain.size()) throw std::invalid_argument("state index out of range");
        mass += chain.stationary()[i];
    }
    const auto m = spec.sqrt_pi.size();
    std::vector<CmdTerm> out(static_cast<std::size_t>(m));
    for (Eigen::Index k = 0; k < m; ++k) {
        double s = 0.0;
        for (auto i : psi) s += spec.sqrt_pi(Eigen::Index(i)) * spec.basis(Eigen::Index(i), k);
        out[std::size_t(k)] = {s * s / mass, spec.rates(k)};
    }
    return out;
}

double cmd_evaluate(std::span<const CmdTerm> terms, double t) {
    double s = 0.0;
    for (const auto& term : terms) s += term.alpha * std::exp(-term.lambda * t);
    return s;
}

namespace {

std::vector<double> conditioned_pi(const ExactChain& chain, std::span<const std::size_t> psi) {
    std::vector<double> nu(chain.size(), 0.0);
    double mass = 0.0;
    for (auto i : psi) mass += chain.stationary()[i];
    for (auto i : psi) nu[i] = chain.stationary()[i] / mass;
    return nu;
}

}  // namespace

double occupancy_direct(const ExactChain& chain, std::span<const std::size_t> psi, double t) {
    const auto law = evolve_poisson_mixture(chain, conditioned_pi(chain, psi), t);
    double s = 0.0;
    for (auto i : psi) s += law[i];
    return s;
}

std::vector<std::size_t> states_with_spin(const ExactChain& chain, Vertex v, SpinMask q_v) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < chain.size(); ++i)
        if ((q_v >> chain.state(i).at(std::size_t(v))) & 1u) out.push_back(i);
    return out;
}

double cmd_occupancy_bound(double mu, double t) { return mu + (1.0 - mu) * std::exp(-t / (1.0 - mu)); }

OccupancyReport check_lemma_3_5(const ExactChain& chain, Vertex v, SpinMask q_v,
                              std::span<const double> t_grid) {
    const auto psi = states_with_spin(chain, v, q_v);
    OccupancyReport rep;
    for (auto i : psi) rep.mu += chain.stationary()[i];
    if (psi.empty() || psi.size() == chain.size() || !(rep.mu > 0.0 && rep.mu < 1.0))
        throw std::invalid_argument("occupancy bound requires 0 < mu < 1");
    const auto spec = spectral(chain);
    const auto nu = conditioned_pi(chain, psi);
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const auto law = evolve_continuous(spec, nu, t);
        double lhs = 0.0;
        for (auto i : psi) lhs += law[i];
        const double rhs = cmd_occupancy_bound(rep.mu, t);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        if (lhs - rhs < rep.min_slack) {
            rep.min_slack = lhs - rhs;
            rep.worst_time = t;
        }
    }
    rep.pass = rep.min_slack >= -1e-9;
    return rep;
}

double hypercube_tv(std::size_t n, double flip_prob, double t) {
    if (n == 0) throw std::invalid_argument("hypercube_tv requires n >= 1");
    if (!(flip_prob > 0.0 && flip_prob <= 1.0)) throw std::invalid_argument("flip_prob must lie in (0, 1]");
    if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
    // Each coordinate keeps its initial spin with probability q = 1/2 + e^{-2pt}/2.
    const double e = std::exp(-2.0 * flip_prob * t);
    const double log_q = std::log1p(e) - std::log(2.0);
    const double log_1mq = std::log1p(-e) - std::log(2.0);
    const double nn = double(n);
    const double log_half_n = -nn * std::log(2.0);
    double s = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double kk = double(k);
        const double lc = std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1);
        const double a = (k == n) ? std::exp(lc + kk * log_q)
                                  : (e >= 1.0 ? 0.0 : std::exp(lc + kk * log_q + (nn - kk) * log_1mq));
        const double b = std::exp(lc + log_half_n);
        s += std::abs(a - b);
    }
    return std::min(1.0, 0.5 * s);
}

double hypercube_crossing_time(std::size_t n, double flip_prob) {
    double lo = 0.0, hi = 1.0;
    while (hypercube_tv(n, flip_prob, hi) > kMixingThreshold) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hypercube_tv(n, flip_prob, mid) > kMixingThreshold) lo = mid;
        else hi = mid;
    }
    return hi;
}

TranslationReport verify_prop_2_1(const ExactChain& chain, std::span<const double> t_grid) {
    TranslationReport rep;
    rep.min_slack = std::numeric_limits<double>::infinity();
    const auto spec = spectral(chain);
    std::vector<std::size_t> ts;
    for (double t : t_grid) {
        if (!(t >= 0.0)) throw std::invalid_argument("times must be nonnegative");
        ts.push_back(std::size_t(std::llround(t)));
    }
    std::vector<std::size_t> all(chain.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<double> cur(chain.size()), next(chain.size());
    const std::size_t tmax = ts.empty() ? 0 : *std::max_element(ts.begin(), ts.end());
    for (std::size_t s : all) {
        std::fill(cur.begin(), cur.end(), 0.0);
        cur[s] = 1.0;
        std::vector<double> disc(tmax + 1);
        for (std::size_t t = 0; t <= tmax; ++t) {
            disc[t] = tv_distance(cur, chain.stationary());
            chain.step_into(cur, next);
            cur.swap(next);
        }
        const auto nu = point_mass(chain, s);
        for (std::size_t t : ts) {
            const auto law = evolve_continuous(spec, nu, 2.0 * double(t) / chain.clock_rate());
            const double cont = tv_distance(law, chain.stationary());
            const double slack = disc[t] - (cont - 2.0 * std::exp(-double(t)));
            if (slack < rep.min_slack) {
                rep.min_slack = slack;
                rep.worst_t = double(t);
                rep.worst_start = s;
            }
        }
    }
    rep.pass = rep.min_slack >= -1e-10;
    return rep;
}

}  // namespace glauber
