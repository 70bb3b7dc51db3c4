#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glauber/exact.hpp"

using namespace glauber;
using doctest::Approx;

namespace {

ExactChain chain_of(const Dynamics& d) { return build_exact_chain(d); }

double worst_discrete_tv(const ExactChain& c, std::size_t steps) {
    double w = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) w = std::max(w, discrete_tv(c, i, steps));
    return w;
}

}  // namespace

TEST_CASE("single coin matrix and mixing time") {
    Dynamics d(heat_bath_kernel(make_product_coin(empty_graph(1))));
    ExactChain c = chain_of(d);
    REQUIRE(c.size() == 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(c.entry(i, j) == Approx(0.5).epsilon(1e-15));
    CHECK(discrete_tv(c, 0, 1) == Approx(0.0).epsilon(1e-15));
    CHECK(mixing_time(c, TimeKind::discrete).tau == 1.0);
}

TEST_CASE("chain invariants") {
    Dynamics d(heat_bath_kernel(make_ising(cycle_graph(5), {0.5, 0.0})));
    ExactChain c = chain_of(d);
    CHECK(c.size() == 32);
    CHECK(c.max_row_error() < 1e-12);
    CHECK(c.stationary_ok());
    for (double p : c.stationary()) CHECK(p > 0.0);
    CHECK(c.ergodic());

    SpectralDecomposition s = spectral(c);
    CHECK(std::abs(s.rates[0]) < 1e-9);
    for (Eigen::Index k = 0; k < s.rates.size(); ++k) {
        CHECK(s.rates[k] >= -1e-9);
        CHECK(s.rates[k] <= 2.0 * 5 + 1e-9);
        if (k > 0) CHECK(s.rates[k] >= s.rates[k - 1] - 1e-12);
    }
    Eigen::MatrixXd gram = s.basis.transpose() * s.basis;
    CHECK((gram - Eigen::MatrixXd::Identity(32, 32)).cwiseAbs().maxCoeff() < 1e-9);
    for (std::size_t i = 0; i < 32; ++i)
        CHECK(std::abs(std::abs(s.basis(Eigen::Index(i), 0)) - std::sqrt(c.stationary()[i])) < 1e-9);
}

TEST_CASE("hard-core on the complete graph at lambda = 1/n") {
    const std::size_t n = 6;
    auto sys = make_hardcore(complete_graph(n), {1.0 / double(n)});
    ExactChain c = chain_of(Dynamics(metropolis_kernel(sys)));
    REQUIRE(c.size() == n + 1);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto& s = c.state(i);
        const bool empty = std::all_of(s.begin(), s.end(), [](Spin x) { return x == 0; });
        CHECK(c.stationary()[i] == Approx(empty ? 0.5 : 0.5 / double(n)).epsilon(1e-12));
    }
}

TEST_CASE("Ising at beta = 0 is the product chain") {
    ExactChain a = chain_of(Dynamics(heat_bath_kernel(make_ising(cycle_graph(4), {0.0, 0.0}))));
    ExactChain b = chain_of(Dynamics(heat_bath_kernel(make_product_coin(cycle_graph(4)))));
    REQUIRE(a.size() == 16);
    REQUIRE(b.size() == 16);
    CHECK((a.dense() - b.dense()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("TV curves") {
    auto sys = make_hardcore(path_graph(4), {1.0});
    ExactChain c = chain_of(Dynamics(heat_bath_kernel(sys)));
    const Configuration s0{1, 0, 1, 0};
    const double pi0 = c.stationary()[*c.index_of(s0)];
    std::vector<double> times{0, 1, 2, 3, 5, 8, 13, 21, 34, 55, 200};
    for (auto kind : {TimeKind::discrete, TimeKind::continuous}) {
        TVCurve cur = tv_curve(c, s0, times, kind);
        CHECK(cur.samples.front().second == Approx(1.0 - pi0).epsilon(1e-12));
        for (std::size_t k = 1; k < cur.samples.size(); ++k) {
            CHECK(cur.samples[k].second >= 0.0);
            CHECK(cur.samples[k].second <= cur.samples[k - 1].second + 1e-12);
        }
        CHECK(cur.samples.back().second < 1e-6);
        if (kind == TimeKind::continuous) CHECK(cur.cross_check_gap < 1e-9);
    }
}

TEST_CASE("spectral reconstruction matches repeated multiplication") {
    auto sys = make_ising(cycle_graph(6), {0.7, 0.1});
    ExactChain c = chain_of(Dynamics(heat_bath_kernel(sys), 0.1));
    SpectralDecomposition s = spectral(c);
    std::vector<double> mu = point_mass(c, 3);
    for (std::size_t t = 1; t <= 50; ++t) {
        mu = c.step(mu);
        // sqrt(pi)-weighted eigen expansion of P^t row 3.
        Eigen::VectorXd coeff = s.basis.row(3).transpose().cwiseProduct(
            s.eigenvalues.array().pow(double(t)).matrix());
        Eigen::VectorXd row = s.basis * coeff;
        double err = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j)
            err = std::max(err, std::abs(row[Eigen::Index(j)] * s.sqrt_pi[Eigen::Index(j)] /
                                             s.sqrt_pi[3] -
                                         mu[j]));
        CHECK(err < 1e-8);
    }
}

TEST_CASE("geometric decay at multiples of the mixing time") {
    ExactChain c = chain_of(Dynamics(heat_bath_kernel(make_ising(cycle_graph(5), {0.5, 0.0}))));
    const auto tau = std::size_t(mixing_time(c, TimeKind::discrete).tau);
    CHECK(worst_discrete_tv(c, tau) <= kMixingThreshold);
    if (tau > 0) CHECK(worst_discrete_tv(c, tau - 1) > kMixingThreshold);
    for (int k = 1; k <= 4; ++k) CHECK(worst_discrete_tv(c, std::size_t(k) * tau) <= std::exp(-k));
}

TEST_CASE("discrete and continuous mixing times are comparable") {
    std::vector<std::shared_ptr<const Dynamics>> dyns{
        std::make_shared<Dynamics>(heat_bath_kernel(make_ising(cycle_graph(5), {0.5, 0.0}))),
        std::make_shared<Dynamics>(heat_bath_kernel(make_hardcore(path_graph(5), {2.0}))),
        std::make_shared<Dynamics>(metropolis_kernel(make_coloring(cycle_graph(5), {4}))),
        std::make_shared<Dynamics>(heat_bath_kernel(make_product_coin(empty_graph(6)))),
    };
    for (const auto& d : dyns) {
        ExactChain c = chain_of(*d);
        const double td = mixing_time(c, TimeKind::discrete).tau;
        const double tc = mixing_time(c, TimeKind::continuous).tau;
        const double n = double(d->system().site_count());
        CHECK(td >= n * tc / 6.0);
    }
}

TEST_CASE("discrete TV dominates shifted continuous TV") {
    std::vector<double> grid{1, 2, 5, 10, 40, 100};
    ExactChain hc = chain_of(Dynamics(heat_bath_kernel(make_hardcore(path_graph(3), {1.0}))));
    CHECK(verify_prop_2_1(hc, grid).pass);
    ExactChain is = chain_of(Dynamics(heat_bath_kernel(make_ising(cycle_graph(4), {1.0, 0.0}))));
    CHECK(verify_prop_2_1(is, grid).pass);
}

TEST_CASE("CMD coefficients") {
    ExactChain c = chain_of(Dynamics(heat_bath_kernel(make_ising(cycle_graph(5), {0.5, 0.0}))));
    SpectralDecomposition s = spectral(c);

    std::vector<std::size_t> all(c.size());
    std::iota(all.begin(), all.end(), 0);
    auto whole = cmd_coefficients(c, s, all);
    CHECK(whole[0].alpha == Approx(1.0).epsilon(1e-9));
    for (std::size_t k = 1; k < whole.size(); ++k) CHECK(std::abs(whole[k].alpha) < 1e-9);

    auto psi = states_with_spin(c, 0, SpinMask{1} << 1);
    double pi_psi = 0.0;
    for (auto i : psi) pi_psi += c.stationary()[i];
    auto terms = cmd_coefficients(c, s, psi);
    CHECK(terms[0].alpha == Approx(pi_psi).epsilon(1e-9));
    CHECK(std::abs(terms[0].lambda) < 1e-9);
    double total = 0.0;
    for (const auto& t : terms) {
        CHECK(t.alpha >= -1e-9);
        total += t.alpha;
    }
    CHECK(total == Approx(1.0).epsilon(1e-9));
    for (double t : {0.0, 0.05, 0.3, 1.0, 2.5, 7.0})
        CHECK(std::abs(cmd_evaluate(terms, t) - occupancy_direct(c, psi, t)) < 1e-8);
}

TEST_CASE("occupancy lower bound for a spin set") {
    std::vector<double> grid;
    for (int k = 1; k <= 100; ++k) grid.push_back(0.1 * k);
    ExactChain is = chain_of(Dynamics(heat_bath_kernel(make_ising(cycle_graph(5), {0.5, 0.0}))));
    auto r = check_lemma_3_5(is, 0, SpinMask{1} << 1, grid);
    CHECK(r.pass);
    CHECK(r.mu == Approx(0.5).epsilon(1e-12));

    ExactChain hc = chain_of(Dynamics(heat_bath_kernel(make_hardcore(path_graph(4), {1.0}))));
    CHECK(check_lemma_3_5(hc, 1, SpinMask{1} << 1, grid).pass);

    std::vector<double> zero{0.0};
    auto z = check_lemma_3_5(hc, 1, SpinMask{1} << 1, zero);
    CHECK(z.lhs[0] == Approx(1.0).epsilon(1e-12));
    CHECK(z.rhs[0] == Approx(1.0).epsilon(1e-12));
    CHECK(cmd_occupancy_bound(0.3, 0.0) == Approx(1.0));

    // Spin set with mu = 1 is outside the hypothesis.
    CHECK_THROWS_AS(check_lemma_3_5(hc, 1, SpinMask{3}, grid), std::invalid_argument);
}

TEST_CASE("hypercube closed form") {
    CHECK(hypercube_tv(1, 0.5, std::log(2.0)) == Approx(0.25).epsilon(1e-12));
    std::vector<double> grid;
    for (int k = 0; k < 20; ++k) grid.push_back(0.15 * k);
    for (std::size_t n = 1; n <= 10; ++n) {
        auto sys = make_product_coin(empty_graph(n));
        for (double p : {0.5, 1.0 - 1.0 / double(n + 1)}) {
            Dynamics d(p == 0.5 ? heat_bath_kernel(sys) : flip_kernel(sys, p));
            ExactChain c = chain_of(d);
            auto start = point_mass(c, 0);
            for (double t : grid) {
                auto law = evolve_poisson_mixture(c, start, t);
                CHECK(std::abs(tv_distance(law, c.stationary()) - hypercube_tv(n, p, t)) < 1e-10);
            }
        }
    }
    const double t = hypercube_crossing_time(64, 0.5);
    CHECK(hypercube_tv(64, 0.5, t) == Approx(kMixingThreshold).epsilon(1e-8));
}

TEST_CASE("non-ergodic chains") {
    ExactChain c = chain_of(Dynamics(heat_bath_kernel(make_coloring(cycle_graph(6), {3}))));
    CHECK_FALSE(c.irreducible());
    CHECK_FALSE(c.warning().empty());
    CHECK_THROWS(mixing_time(c, TimeKind::discrete));
    ExactChain r = restrict_to_class(c, 0);
    CHECK(r.size() < c.size());
    CHECK(r.irreducible());
}

TEST_CASE("cap exceeded") {
    Dynamics d(heat_bath_kernel(make_product_coin(empty_graph(12))));
    CHECK_THROWS_AS(build_exact_chain(d, 1000), CapExceeded);
}
