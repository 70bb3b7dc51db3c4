#include "glauber/experiment.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <optional>

#include "glauber/coupling.hpp"
#include "glauber/exact.hpp"
#include "glauber/fastmix.hpp"
#include "glauber/lower_bound.hpp"
#include "glauber/scaling.hpp"

namespace glauber {

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::logic_error("csv row width mismatch");
    rows_.push_back(std::move(cells));
    return *this;
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

std::string CsvTable::num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

using Clock = std::chrono::system_clock;

struct Model {
    GraphPtr graph;
    SystemPtr system;
    DynamicsPtr dynamics;
};

Model build_model(const Json& j) {
    Model m;
    m.graph = build_graph(param<Json>(j, "graph"));
    m.system = build_system(m.graph, param<Json>(j, "system"));
    m.dynamics = build_dynamics(m.system, j.contains("dynamics") ? j["dynamics"] : Json::object());
    return m;
}

void require_enumerable(const SpinSystem& sys, std::size_t cap) {
    std::size_t counted = 0;
    try {
        counted = count_feasible(sys, cap);
    } catch (const CapExceeded& e) {
        throw ConfigError("cap_exceeded", "state space exceeds cap " + std::to_string(cap) +
                                              " (brute-force bound, counted " +
                                              std::to_string(e.counted()) + ")");
    }
    if (counted > cap)
        throw ConfigError("cap_exceeded", "state space exceeds cap " + std::to_string(cap) +
                                              " (counted > " + std::to_string(cap) + ")");
    if (counted == 0) throw ConfigError("empty_feasible_set", "empty feasible set: " + sys.describe());
}

std::vector<double> time_grid(const Json& j, double default_max) {
    if (j.contains("times")) {
        auto t = param<std::vector<double>>(j, "times");
        for (double x : t)
            if (!(x >= 0.0)) throw ConfigError("bad_field", "times must be nonnegative");
        return t;
    }
    const double t_max = param_or(j, "t_max", default_max);
    const auto points = param_or<long long>(j, "points", 21);
    if (!(t_max > 0.0) || points < 2) throw ConfigError("bad_field", "need t_max > 0 and points >= 2");
    std::vector<double> t;
    for (long long i = 0; i < points; ++i) t.push_back(t_max * double(i) / double(points - 1));
    return t;
}

double nonneg_time(const Json& j, const char* key) {
    const double t = param<double>(j, key);
    if (!(t >= 0.0) || !std::isfinite(t))
        throw ConfigError("bad_field", std::string("field \"") + key + "\" must be a finite time >= 0");
    return t;
}

Configuration start_config(const SpinSystem& sys, const Json& j, const char* key) {
    return build_configuration(sys, j.contains(key) ? j[key] : Json("lex_least"));
}

Vertex site_param(const Graph& g, const Json& j, const char* key) {
    const auto v = param<long long>(j, key);
    if (v < 0 || std::size_t(v) >= g.vertex_count())
        throw ConfigError("bad_field", std::string("site \"") + key + "\" out of range");
    return Vertex(v);
}

std::size_t resolve_delta(const Graph& g, const Json& j) {
    const auto d = std::size_t(param_or<long long>(j, "delta", (long long)g.max_degree()));
    if (d < 2) throw ConfigError("requires_delta", "requires Delta >= 2 (graph has Delta = " +
                                                       std::to_string(d) + ")");
    return d;
}

// Each experiment: checks first (ConfigError), returns early when dry.

void exp_exact(const ExperimentConfig& cfg, bool dry, OutputSet& out) {
    const Json& j = cfg.raw;
    Model m = build_model(j);
    const auto cap = std::size_t(param_or<long long>(j, "cap", 200000));
    require_enumerable(*m.system, cap);
    Configuration start = start_config(*m.system, j, "start");
    const Json psi = j.contains("psi") ? j["psi"] : Json::object();
    const Vertex psi_site = psi.contains("site") ? site_param(*m.graph, psi, "site") : 0;
    SpinMask psi_mask = 0;
    for (int s : param_or<std::vector<int>>(psi, "spins", {0})) {
        if (s < 0 || s >= m.system->num_spins()) throw ConfigError("bad_field", "psi spin out of range");
        psi_mask |= SpinMask{1} << s;
    }
    const auto times = time_grid(j, 10.0);
    if (dry) return;

    ExactChain chain = build_exact_chain(*m.dynamics, cap);
    MixingResult md = mixing_time(chain, TimeKind::discrete);
    MixingResult mc = mixing_time(chain, TimeKind::continuous);
    out["mixing.csv"] = CsvTable({"kind", "tau"})
                            .row({"discrete", CsvTable::num(md.tau)})
                            .row({"continuous", CsvTable::num(mc.tau)})
                            .str();
    if (chain.size() <= 6000) {
        SpectralDecomposition spec = spectral(chain);
        auto states = states_with_spin(chain, psi_site, psi_mask);
        CsvTable sp({"k", "lambda", "alpha"});
        if (!states.empty()) {
            auto terms = cmd_coefficients(chain, spec, states);
            for (std::size_t k = 0; k < terms.size(); ++k)
                sp.row({CsvTable::num(k), CsvTable::num(terms[k].lambda), CsvTable::num(terms[k].alpha)});
        }
        out["spectrum.csv"] = sp.str();
    }
    const TimeKind kind = param_or<std::string>(j, "time_kind", "continuous") == "discrete"
                              ? TimeKind::discrete
                              : TimeKind::continuous;
    TVCurve curve = tv_curve(chain, start, times, kind);
    CsvTable tv({"time", "tv"});
    for (auto [t, d] : curve.samples) tv.row({CsvTable::num(t), CsvTable::num(d)});
    out["tv_curve.csv"] = tv.str();
}

void exp_simulate(const ExperimentConfig& cfg, bool dry, OutputSet& out) {
    const Json& j = cfg.raw;
    Model m = build_model(j);
    Configuration x0 = start_config(*m.system, j, "initial");
    const double t = nonneg_time(j, "t");
    if (dry) return;
    CsvTable csv({"replica", "events", "configuration"});
    for (std::size_t k = 0; k < cfg.replicas; ++k) {
        RngStream rng(cfg.seed, k);
        Configuration x = x0;
        std::size_t ev = advance_continuous(*m.dynamics, x, t, rng);
        csv.row({CsvTable::num(k), CsvTable::num(ev), format_configuration(x)});
    }
    out["simulate.csv"] = csv.str();
}

void exp_couple(const ExperimentConfig& cfg, bool dry, OutputSet& out) {
    const Json& j = cfg.raw;
    Model m = build_model(j);
    DynamicsPtr dyn_y = j.contains("dynamics_y") ? build_dynamics(m.system, j["dynamics_y"]) : m.dynamics;
    Configuration x0 = start_config(*m.system, j, "x0");
    Configuration y0 = build_configuration(*m.system, param<Json>(j, "y0"));
    const double t = nonneg_time(j, "t");
    if (dry) return;
    CsvTable csv({"replica", "events", "disagreements"});
    for (std::size_t k = 0; k < cfg.replicas; ++k) {
        RngStream rng(cfg.seed, k);
        CouplingRun run = run_greedy_coupling(*m.dynamics, *dyn_y, CoupledPair(x0, y0), t, rng);
        csv.row({CsvTable::num(k), CsvTable::num(run.events),
                 CsvTable::num(run.pair.disagreement_count())});
    }
    out["couple.csv"] = csv.str();
}

void exp_percolation(const ExperimentConfig& cfg, bool dry, OutputSet& out) {
    const Json& j = cfg.raw;
    Model m = build_model(j);
    const Vertex center = site_param(*m.graph, j, "center");
    const int r = param<int>(j, "r");
    const int big_r = param<int>(j, "R");
    if (r < 0 || big_r <= r) throw ConfigError("bad_field", "need 0 <= r < R");
    const double t = nonneg_time(j, "t");
    Configuration x0 = start_config(*m.system, j, "x0");
    const VertexSet inner = ball(*m.graph, center, big_r - 1);
    Configuration y0;
    if (j.contains("y0")) {
        y0 = build_configuration(*m.system, j["y0"]);
    } else {
        const int shift = param_or(j, "y0_shift", 1);
        y0 = x0;
        const int q = m.system->num_spins();
        for (std::size_t v = 0; v < y0.size(); ++v)
            if (!inner.contains(Vertex(v))) y0[v] = Spin(((int(x0[v]) + shift) % q + q) % q);
        if (!m.system->is_feasible(y0))
            throw ConfigError("infeasible_configuration", "shifted Y0 is infeasible");
    }
    for (Vertex v : inner)
        if (x0[std::size_t(v)] != y0[std::size_t(v)])
            throw ConfigError("bad_configuration", "X0 and Y0 must agree on B_{R-1}(center)");
    const std::size_t delta = resolve_delta(*m.graph, j);
    if (dry) return;
    PercolationPlan plan = ball_percolation_plan(m.dynamics, center, r, big_r, t, cfg.replicas, x0, y0);
    plan.delta = delta;
    PercolationReport rep = percolation_experiment(plan, cfg.seed);
    out["percolation.csv"] =
        CsvTable({"replica_count", "empirical_p", "ci_lo", "ci_hi", "bound_eq5", "bound_eq6", "d", "t", "delta"})
            .row({CsvTable::num(rep.replicas), CsvTable::num(rep.disagreement.estimate),
                  CsvTable::num(rep.disagreement.ci.lo), CsvTable::num(rep.disagreement.ci.hi),
                  CsvTable::num(rep.bound_eq5), CsvTable::num(rep.bound_eq6.value_or(NAN)),
                  CsvTable::num(rep.d), CsvTable::num(rep.t), CsvTable::num(rep.delta)})
            .str();
}

void exp_distinguisher(const ExperimentConfig& cfg, bool dry, OutputSet& out) {
    const Json& j = cfg.raw;
    Model m = build_model(j);
    PlanOptions po;
    po.delta = resolve_delta(*m.graph, j);
    if (j.contains("R")) po.r_override = param<int>(j, "R");
    po.sample_sigma_u = param_or(j, "sample_sigma_u", false);
    po.sigma_seed = cfg.seed;
    if (m.graph->vertex_count() < 2) throw ConfigError("bad_graph", "distinguisher needs n >= 2");
    if (dry) return;
    LowerBoundPlan plan = plan_lower_bound(*m.system, po);
    if (plan.plan_case != PlanCase::case1)
        throw std::runtime_error("plan is Case 2 (witness site " + std::to_string(*plan.witness) +
                                 "); use the frozen experiment");
    DistinguisherOptions opt;
    opt.replicas = cfg.replicas;
    opt.seed = cfg.seed;
    opt.run_y_chain = param_or(j, "y_chain", true);
    opt.reference_samples = std::size_t(param_or<long long>(j, "reference_samples", 0));
    DistinguisherReport rep = run_distinguisher(plan, *m.dynamics, opt);
    out["distinguisher.csv"] =
        CsvTable({"n", "delta", "R", "T", "eps", "mu_hat", "phat_x", "phat_pi", "L", "ci_lo", "ci_hi"})
            .row({CsvTable::num(rep.n), CsvTable::num(rep.delta), CsvTable::num(rep.R),
                  CsvTable::num(rep.T), CsvTable::num(rep.eps), CsvTable::num(rep.mu_hat),
                  CsvTable::num(rep.x_arm.estimate), CsvTable::num(rep.phat_pi), CsvTable::num(rep.tv.L),
                  CsvTable::num(rep.tv.ci.lo), CsvTable::num(rep.tv.ci.hi)})
            .str();
}

void exp_frozen(const ExperimentConfig& cfg, bool dry, OutputSet& out) {
    const Json& j = cfg.raw;
    Model m = build_model(j);
    const Vertex v = site_param(*m.graph, j, "v");
    const int big_r = param<int>(j, "R");
    const double t = nonneg_time(j, "T");
    Configuration x0 = build_configuration(*m.system, param<Json>(j, "x0"));
    Configuration y0 = build_configuration(*m.system, param<Json>(j, "y0"));
    const std::size_t delta = resolve_delta(*m.graph, j);
    if (big_r < 4) throw ConfigError("bad_field", "R must be >= 4");
    if (t > frozen_time_cap(big_r, delta) * (1 + 1e-12))
        throw ConfigError("bad_field", "T exceeds R/(5 e^2 Delta ln Delta) = " +
                                           std::to_string(frozen_time_cap(big_r, delta)));
    if (dry) return;
    FrozenDistinguisherReport rep;
    try {
        rep = frozen_distinguisher(*m.dynamics, v, big_r, x0, y0, t, cfg.replicas, cfg.seed, delta);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("precondition", e.what());
    }
    out["frozen.csv"] =
        CsvTable({"R", "r", "T", "t_cap", "delta", "bound", "phat_x", "phat_y", "L", "ci_lo", "ci_hi"})
            .row({CsvTable::num(rep.R), CsvTable::num(rep.r), CsvTable::num(rep.T),
                  CsvTable::num(rep.t_cap), CsvTable::num(rep.delta), CsvTable::num(rep.bound),
                  CsvTable::num(rep.x_arm.estimate), CsvTable::num(rep.y_arm.estimate),
                  CsvTable::num(rep.tv.L), CsvTable::num(rep.tv.ci.lo), CsvTable::num(rep.tv.ci.hi)})
            .str();
}

void exp_fastmix(const ExperimentConfig& cfg, bool dry, OutputSet& out) {
    const Json& j = cfg.raw;
    const auto b = std::size_t(param_or<long long>(j, "branching", 2));
    const auto h = std::size_t(param_or<long long>(j, "height", 2));
    const double up = param_or(j, "up_prob", 2.0 / 3.0);
    const auto sel = param_or<std::string>(j, "selector", "uniform");
    if (sel != "uniform" && sel != "nonuniform")
        throw ConfigError("bad_field", "selector must be uniform or nonuniform");
    if (b < 2 || h < 1 || !(up > 0.0 && up < 1.0))
        throw ConfigError("bad_field", "need branching >= 2, height >= 1, up_prob in (0,1)");
    if (dry) return;
    BiasedTreeWalk w = biased_tree_walk(b, h, up);
    std::optional<SiteSelector> selector;
    if (sel == "nonuniform") selector = nonuniform_tree_selector(*w.tree);
    EmbeddingDynamics emb = build_embedding_dynamics(w.tree, w.walk, selector);
    ExactChain chain = build_exact_chain(*emb.dynamics);
    EmbeddingAudit audit = audit_embedding(emb, chain);
    MixingResult mix = mixing_time(chain, TimeKind::discrete);
    out["fastmix.csv"] =
        CsvTable({"branching", "height", "n", "states", "expected_states", "sum_preserved",
                  "bijection_ok", "max_success_error", "max_stationary_error",
                  "max_skeleton_error", "tau", "method"})
            .row({CsvTable::num(b), CsvTable::num(h), CsvTable::num(w.tree->vertex_count()),
                  CsvTable::num(chain.size()), CsvTable::num(audit.expected_states),
                  audit.sum_preserved ? "1" : "0", audit.bijection_ok ? "1" : "0",
                  CsvTable::num(audit.max_success_error), CsvTable::num(audit.max_stationary_error),
                  CsvTable::num(audit.max_skeleton_error), CsvTable::num(mix.tau), mix.method})
            .str();
}

void exp_scaling(const ExperimentConfig& cfg, bool dry, OutputSet& out) {
    const Json& j = cfg.raw;
    ScalingStudy st;
    try {
        st.family = scaling_family_from_string(param<std::string>(j, "family"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("bad_field", e.what());
    }
    for (long long s : param<std::vector<long long>>(j, "sizes")) {
        if (s < 2) throw ConfigError("bad_field", "sizes must be >= 2");
        st.sizes.push_back(std::size_t(s));
    }
    st.flip_prob = param_or(j, "flip_prob", 0.5);
    st.branching = std::size_t(param_or<long long>(j, "branching", 4));
    st.up_prob = param_or(j, "up_prob", 2.0 / 3.0);
    st.cross_check_limit = std::size_t(param_or<long long>(j, "cross_check_limit", 512));
    if (st.family == ScalingFamily::embedding_tree || st.family == ScalingFamily::nonuniform_tree) {
        for (auto n : st.sizes) try {
                tree_height_for_size(st.branching, n);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("bad_field", e.what());
            }
    }
    if (dry) return;
    CsvTable csv({"family", "n", "delta", "method", "tau", "ref_nlogn", "ref_nlogn_over_logdelta", "ref_n"});
    for (const auto& r : scaling_study(st)) {
        csv.row({r.family, CsvTable::num(r.n), CsvTable::num(r.delta),
                 r.error.empty() ? r.method : "error", r.error.empty() ? CsvTable::num(r.tau) : "nan",
                 CsvTable::num(r.ref_nlogn), CsvTable::num(r.ref_nlogn_over_logdelta),
                 CsvTable::num(r.ref_n)});
    }
    out["scaling.csv"] = csv.str();
}

void exp_hypercube(const ExperimentConfig& cfg, bool dry, OutputSet& out) {
    const Json& j = cfg.raw;
    const auto n = std::size_t(param<long long>(j, "n"));
    const double p = param_or(j, "flip_prob", 0.5);
    if (n < 1) throw ConfigError("bad_field", "n must be >= 1");
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("bad_field", "flip_prob must lie in (0, 1]");
    const auto times = time_grid(j, std::max(1.0, std::log(double(n))));
    if (dry) return;
    CsvTable tv({"time", "tv"});
    for (double t : times) tv.row({CsvTable::num(t), CsvTable::num(hypercube_tv(n, p, t))});
    out["tv_curve.csv"] = tv.str();
    out["mixing.csv"] = CsvTable({"kind", "tau"})
                            .row({"continuous", CsvTable::num(hypercube_crossing_time(n, p))})
                            .str();
}

void dispatch(const ExperimentConfig& cfg, bool dry, OutputSet& out) {
    switch (cfg.kind) {
    case ExperimentKind::exact: return exp_exact(cfg, dry, out);
    case ExperimentKind::simulate: return exp_simulate(cfg, dry, out);
    case ExperimentKind::couple: return exp_couple(cfg, dry, out);
    case ExperimentKind::percolation: return exp_percolation(cfg, dry, out);
    case ExperimentKind::distinguisher: return exp_distinguisher(cfg, dry, out);
    case ExperimentKind::frozen: return exp_frozen(cfg, dry, out);
    case ExperimentKind::fastmix: return exp_fastmix(cfg, dry, out);
    case ExperimentKind::scaling: return exp_scaling(cfg, dry, out);
    case ExperimentKind::hypercube: return exp_hypercube(cfg, dry, out);
    }
}

void check(const ExperimentConfig& cfg) {
    OutputSet none;
    try {
        dispatch(cfg, true, none);
    } catch (const ConfigError&) {
        throw;
    } catch (const CapExceeded& e) {
        throw ConfigError("cap_exceeded", std::string(e.what()) + " (counted " +
                                              std::to_string(e.counted()) + ")");
    } catch (const EmptyFeasibleSet& e) {
        throw ConfigError("empty_feasible_set", e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("invalid", e.what());
    }
}

std::string iso_time(Clock::time_point tp) {
    std::time_t t = Clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const ExperimentConfig& cfg, const OutputSet& outputs, Clock::time_point start,
                    const std::string& status, const std::string& error) {
    Json m;
    m["artifact_version"] = kArtifactVersion;
    m["config"] = cfg.raw;
    m["seed"] = cfg.seed;
    m["replicas"] = cfg.replicas;
    m["status"] = status;
    if (!error.empty()) m["error"] = error;
    const auto end = Clock::now();
    m["started_utc"] = iso_time(start);
    m["finished_utc"] = iso_time(end);
    m["elapsed_seconds"] = std::chrono::duration<double>(end - start).count();
    Json files = Json::object();
    for (const auto& [name, body] : outputs) files[name] = {{"sha256", sha256_hex(body)}, {"bytes", body.size()}};
    m["outputs"] = files;
    write_atomic(cfg.out_dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace

std::vector<Diagnostic> validate(const ExperimentConfig& cfg) {
    try {
        check(cfg);
    } catch (const ConfigError& e) {
        return {{e.kind(), e.what()}};
    } catch (const std::exception& e) {
        return {{"runtime", e.what()}};
    }
    return {};
}

OutputSet compute_outputs(const ExperimentConfig& cfg) {
    check(cfg);
    OutputSet out;
    dispatch(cfg, false, out);
    return out;
}

OutputSet run_experiment(const ExperimentConfig& cfg) {
    const auto start = Clock::now();
    check(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    OutputSet out;
    try {
        dispatch(cfg, false, out);
    } catch (const std::exception& e) {
        write_manifest(cfg, {}, start, "error", e.what());
        throw;
    }
    for (const auto& [name, body] : out) write_atomic(cfg.out_dir / name, body);
    write_manifest(cfg, out, start, "ok", "");
    return out;
}

}  // namespace glauber
