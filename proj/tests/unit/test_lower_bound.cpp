#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "glauber/exact.hpp"
#include "glauber/lower_bound.hpp"

using namespace glauber;
using doctest::Approx;

namespace {

// Independent evaluation of the plan arithmetic.
struct Expected {
    int R;
    double T, eps;
    std::size_t centers;
};

Expected expected(std::size_t n, std::size_t delta) {
    const double ln_n = std::log(double(n)), ln_d = std::log(double(delta));
    const int R = int(std::ceil(ln_n / (4 * ln_d) - 1e-9));
    const double T = ln_n / (8 * std::numbers::e * double(delta) * ln_d);
    const double eps = 1.0 / (4.0 * std::exp(2.0 * T));
    const double c = std::ceil(double(n) / std::pow(double(delta), 2 * R) - 1e-9);
    return {R, T, eps, std::size_t(std::max(c, 1.0))};
}

}  // namespace

TEST_CASE("plan arithmetic") {
    auto p = lower_bound_params(4096, 2);
    CHECK(p.R == 3);
    CHECK(p.T == Approx(0.2759).epsilon(1e-3));
    CHECK(p.eps == Approx(0.1440).epsilon(1e-3));
    CHECK(p.target_centers == 64);
    for (std::size_t n : {100u, 1000u, 4096u, 65536u, 1u << 20})
        for (std::size_t d : {2u, 3u, 4u, 7u}) {
            auto q = lower_bound_params(n, d);
            auto e = expected(n, d);
            CHECK(q.R == e.R);
            CHECK(q.T == e.T);
            CHECK(q.eps == e.eps);
            CHECK(q.target_centers == e.centers);
        }
    CHECK_THROWS_AS(lower_bound_params(100, 1), std::invalid_argument);
}

TEST_CASE("threshold and Jensen bound") {
    CHECK(mu_hat(0.7, 0.01) == Approx(0.69));
    CHECK(mu_hat(0.5, 0.01) == 0.5);
    CHECK(mu_hat(0.3, 0.01) == Approx(0.31));
    CHECK(center_occupancy_bound(0.5, 0.2759) == Approx(0.7881).epsilon(1e-4));
}

TEST_CASE("product coin plan is Case 1 with every site a center") {
    auto sys = make_product_coin(empty_graph(50));
    PlanOptions o;
    o.delta = 2;
    auto plan = plan_lower_bound(*sys, o);
    CHECK(plan.plan_case == PlanCase::case1);
    CHECK(plan.centers.size() == 50);
    for (const auto& b : plan.balls) CHECK(b.sites.size() == 1);
    CHECK(plan.mu == Approx(0.5));
}

TEST_CASE("centers are packed and balls are conditioned") {
    auto sys = make_hardcore(cycle_graph(60), {1.0});
    PlanOptions o;
    o.r_override = 3;
    auto plan = plan_lower_bound(*sys, o);
    REQUIRE(plan.plan_case == PlanCase::case1);
    const auto& g = sys->graph();
    for (std::size_t i = 0; i < plan.centers.size(); ++i)
        for (std::size_t j = i + 1; j < plan.centers.size(); ++j)
            CHECK(*distance(g, plan.centers[i], plan.centers[j]) >= 6);
    CHECK(plan.centers.size() >= plan.params.target_centers);
    for (std::size_t k = 0; k < plan.centers.size(); ++k) {
        const SpinMask q = plan.q_sets[k], feas = plan.balls[k].feasible_center_spins;
        CHECK(q != 0);
        CHECK((q & ~feas) == 0);
        CHECK(q != feas);
    }

    // Ball marginals of the sampler against the conditioned tables.
    const auto& ball = plan.balls[0];
    std::vector<double> exact(ball.sites.size(), 0.0);
    double mass = 0.0;
    const SpinMask q = plan.q_sets[0];
    for (std::size_t s = 0; s < ball.states.size(); ++s) {
        const bool in_q = (q >> ball.states[s][ball.center_pos]) & 1;
        if (in_q == plan.flipped) continue;
        mass += ball.weights[s];
        for (std::size_t i = 0; i < ball.sites.size(); ++i) exact[i] += ball.weights[s] * ball.states[s][i];
    }
    for (auto& e : exact) e /= mass;
    const std::size_t draws = 10'000;
    std::vector<double> freq(ball.sites.size(), 0.0);
    for (std::size_t k = 0; k < draws; ++k) {
        RngStream rng(21, k);
        Configuration x = sample_conditioned_initial(plan, *sys, rng);
        CHECK(sys->is_feasible(x));
        for (std::size_t i = 0; i < ball.sites.size(); ++i) freq[i] += x[std::size_t(ball.sites[i])];
        for (Vertex u : plan.u) CHECK(x[std::size_t(u)] == plan.base[std::size_t(u)]);
    }
    for (std::size_t i = 0; i < ball.sites.size(); ++i) {
        const double p = exact[i], f = freq[i] / double(draws);
        CHECK(std::abs(f - p) <= 4 * std::sqrt(p * (1 - p) / double(draws)) + 1e-12);
    }
}

TEST_CASE("independent Ising balls under zero coupling") {
    auto sys = make_ising(cycle_graph(40), {0.0, 0.0});
    PlanOptions o;
    o.r_override = 3;
    auto plan = plan_lower_bound(*sys, o);
    const std::size_t draws = 4000;
    std::map<std::size_t, double> ones;
    for (std::size_t k = 0; k < draws; ++k) {
        RngStream rng(22, k);
        Configuration x = sample_conditioned_initial(plan, *sys, rng);
        for (std::size_t i = 0; i < plan.balls[0].sites.size(); ++i)
            if (i != plan.balls[0].center_pos) ones[i] += x[std::size_t(plan.balls[0].sites[i])];
    }
    for (auto& [i, c] : ones) CHECK(std::abs(c / double(draws) - 0.5) <= 4 * std::sqrt(0.25 / double(draws)));
}

TEST_CASE("distinguisher on independent coins") {
    const std::size_t n = 1024;
    auto sys = make_product_coin(empty_graph(n));
    Dynamics d(heat_bath_kernel(sys));
    PlanOptions o;
    o.delta = 2;
    auto plan = plan_lower_bound(*sys, o);
    DistinguisherOptions opt;
    opt.replicas = 400;
    opt.seed = 3;
    auto rep = run_distinguisher(plan, d, opt);
    CHECK(rep.pi_exact);
    CHECK(rep.tv.L > kMixingThreshold);
    CHECK(rep.tv.L <= hypercube_tv(n, 0.5, rep.T) + 1e-12);
    CHECK(rep.y_ran);
    CHECK(rep.mean_f_y >= rep.occupancy_bound - 4 * 0.5 / std::sqrt(double(n) * 400.0));
}

TEST_CASE("Y-chain center indicators are uncorrelated") {
    auto sys = make_ising(cycle_graph(60), {0.5, 0.0});
    Dynamics d(heat_bath_kernel(sys));
    auto plan = plan_lower_bound(*sys);
    REQUIRE(plan.centers.size() >= 10);
    DistinguisherOptions opt;
    opt.replicas = 1000;
    opt.seed = 4;
    opt.reference_samples = 200;
    auto rep = run_distinguisher(plan, d, opt);
    CHECK(rep.y_ran);
    CHECK(rep.max_cov_z <= 4.0);
}

TEST_CASE("distinguisher never exceeds the exact TV") {
    auto sys = make_ising(cycle_graph(10), {0.5, 0.0});
    Dynamics d(heat_bath_kernel(sys));
    auto plan = plan_lower_bound(*sys);
    DistinguisherOptions opt;
    opt.replicas = 2000;
    opt.seed = 5;
    auto rep = run_distinguisher(plan, d, opt);
    CHECK(rep.pi_exact);

    // Balls are single sites here, so X_0 is deterministic.
    for (const auto& b : plan.balls) REQUIRE(b.sites.size() == 1);
    RngStream rng(0, 0);
    Configuration x0 = sample_conditioned_initial(plan, *sys, rng);
    ExactChain chain = build_exact_chain(d);
    auto law = evolve_continuous(spectral(chain), point_mass(chain, *chain.index_of(x0)), rep.T);
    const double tv = tv_distance(law, chain.stationary());
    CHECK(rep.tv.ci.lo <= tv);
}

TEST_CASE("frozen distinguisher arithmetic") {
    CHECK(frozen_distinguisher_bound(20, 2) == Approx(0.99987).epsilon(1e-5));
    CHECK(frozen_time_cap(20, 2) == Approx(0.3905).epsilon(1e-3));
}

TEST_CASE("frozen distinguisher on a rigid path coloring") {
    auto sys = make_coloring(path_graph(43), {3});
    Dynamics d(heat_bath_kernel(sys));
    Configuration x0(43), y0(43);
    for (std::size_t i = 0; i < 43; ++i) {
        x0[i] = Spin(i % 3);
        y0[i] = Spin((i + 1) % 3);
    }
    auto rep = frozen_distinguisher(d, 21, 20, x0, y0, 0.39, 1000, 6);
    CHECK(rep.r == 9);
    CHECK(rep.tv.L >= 0.99);
    CHECK(rep.bound == Approx(frozen_distinguisher_bound(20, 2)));

    auto zero = frozen_distinguisher(d, 21, 20, x0, y0, 0.0, 100, 6);
    CHECK(zero.tv.L == 1.0);

    CHECK_THROWS_AS(frozen_distinguisher(d, 21, 20, x0, y0, 0.5, 10, 6), std::invalid_argument);
    CHECK_THROWS_AS(frozen_distinguisher(d, 21, 20, x0, x0, 0.1, 10, 6), std::invalid_argument);
    // Radius-21 ball of the midpoint reaches the unfrozen endpoints.
    CHECK_THROWS_AS(frozen_distinguisher(d, 21, 21, x0, y0, 0.1, 10, 6), std::invalid_argument);
    CHECK_THROWS_AS(frozen_distinguisher(d, 21, 3, x0, y0, 0.01, 10, 6), std::invalid_argument);
}
