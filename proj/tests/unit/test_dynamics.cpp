#include <doctest.h>

#include <cmath>
#include <map>

#include "glauber/dynamics.hpp"
#include "glauber/exact.hpp"

using namespace glauber;
using doctest::Approx;

namespace {

std::vector<double> row(const UpdateKernel& k, Configuration sigma, Vertex v) {
    std::vector<double> out(std::size_t(k.system().num_spins()));
    k.evaluate(sigma, v, out);
    return out;
}

}  // namespace

TEST_CASE("heat-bath rows") {
    auto coin = make_product_coin(empty_graph(3));
    auto p = row(*heat_bath_kernel(coin), {0, 1, 1}, 2);
    CHECK(p[0] == Approx(0.5));
    CHECK(p[1] == Approx(0.5));

    auto hc = make_hardcore(path_graph(3), {1.0});
    auto q = row(*heat_bath_kernel(hc), {1, 0, 0}, 1);
    CHECK(q[0] == 1.0);
    CHECK(q[1] == 0.0);

    auto ising = make_ising(complete_graph(2), {1.0, 0.0});
    auto k = heat_bath_kernel(ising);
    auto r = row(*k, {0, 1}, 0);
    CHECK(r[0] == Approx(0.1192).epsilon(1e-3));
    CHECK(r[1] == Approx(0.8808).epsilon(1e-3));
    auto r2 = row(*k, {1, 1}, 0);
    CHECK(r2[0] == Approx(r[0]).epsilon(1e-15));
}

TEST_CASE("Metropolis rows") {
    auto free = make_coloring(empty_graph(2), {4});
    auto a = row(*metropolis_kernel(free), {0, 3}, 0);
    for (int s = 1; s < 4; ++s) CHECK(a[std::size_t(s)] == Approx(0.25));

    auto col = make_coloring(path_graph(2), {3});
    auto b = row(*metropolis_kernel(col), {0, 2}, 0);
    CHECK(b[2] == 0.0);
    CHECK(b[1] == Approx(1.0 / 3.0));
    CHECK(b[0] == Approx(2.0 / 3.0));

    auto ising = make_ising(complete_graph(2), {1.0, 0.0});
    auto c = row(*metropolis_kernel(ising), {0, 1}, 0);
    CHECK(c[1] == Approx(0.5));
    CHECK(c[0] == Approx(0.5));
}

TEST_CASE("kernel rows sum to one over enumerated states") {
    auto sys = make_hardcore(grid_graph(2, 3), {1.7});
    for (auto k : {heat_bath_kernel(sys), metropolis_kernel(sys)})
        for (const auto& s : enumerate_feasible(*sys))
            for (Vertex v = 0; v < 6; ++v) {
                auto r = row(*k, s, v);
                CHECK(r[0] + r[1] == Approx(1.0).epsilon(1e-12));
            }
}

TEST_CASE("discrete steps") {
    auto col = make_coloring(path_graph(3), {3});
    Dynamics frozen(heat_bath_kernel(col));
    RngStream rng(1, 0);
    // Middle site sees two colors; spins 0 and 2 can move.
    Configuration s{0, 1, 2};
    for (int i = 0; i < 100; ++i) {
        Configuration t = step_discrete(frozen, s, rng);
        CHECK(t[1] == 1);
        CHECK(col->is_feasible(t));
    }
    auto coin = make_product_coin(empty_graph(5));
    Dynamics d(heat_bath_kernel(coin));
    Configuration x(5, 0);
    for (int i = 0; i < 200; ++i) {
        Configuration y = step_discrete(d, x, rng);
        int diff = 0;
        for (int j = 0; j < 5; ++j) diff += x[std::size_t(j)] != y[std::size_t(j)];
        CHECK(diff <= 1);
        x = y;
    }
}

TEST_CASE("empirical transition frequencies match the exact kernel") {
    auto sys = make_hardcore(path_graph(3), {1.0});
    Dynamics d(heat_bath_kernel(sys));
    ExactChain chain = build_exact_chain(d);
    const Configuration start{0, 0, 0};
    const std::size_t i = *chain.index_of(start);
    RngStream rng(42, 0);
    const std::size_t trials = 1'000'000;
    std::vector<std::size_t> counts(chain.size(), 0);
    for (std::size_t k = 0; k < trials; ++k) counts[*chain.index_of(step_discrete(d, start, rng))]++;
    for (std::size_t j = 0; j < chain.size(); ++j) {
        const double p = chain.entry(i, j);
        const double sd = std::sqrt(p * (1 - p) / double(trials));
        CHECK(std::abs(double(counts[j]) / double(trials) - p) <= 4 * sd + 1e-12);
    }
}

TEST_CASE("continuous time") {
    auto sys = make_hardcore(path_graph(4), {1.0});
    Dynamics d(heat_bath_kernel(sys));
    RngStream rng(5, 1);
    Configuration s0{1, 0, 0, 1};
    CHECK(run_continuous(d, s0, 0.0, rng) == s0);

    const double t = 0.7;
    const std::size_t runs = 10'000;
    double sum = 0.0;
    for (std::size_t k = 0; k < runs; ++k) {
        RngStream r(9, k);
        Configuration x = s0;
        sum += double(advance_continuous(d, x, t, r));
    }
    const double mean = 4.0 * t;
    CHECK(std::abs(sum / double(runs) - mean) <= 4 * std::sqrt(mean / double(runs)));

    std::vector<Event> log;
    RngStream r2(3, 3);
    Configuration end = run_continuous(d, s0, 2.0, r2, &log);
    Configuration replay = s0;
    double last = 0.0;
    for (const auto& e : log) {
        CHECK(e.time >= last);
        CHECK(e.time <= 2.0);
        last = e.time;
        if (e.site < 0) continue;
        CHECK(replay[std::size_t(e.site)] == e.before);
        replay[std::size_t(e.site)] = e.after;
    }
    CHECK(replay == end);
}

TEST_CASE("same seed and stream reproduce the trajectory") {
    auto sys = make_ising(cycle_graph(10), {0.4, 0.0});
    Dynamics d(metropolis_kernel(sys), 0.25);
    RngStream a(77, 3), b(77, 3), c(77, 4);
    Configuration s(10, 0);
    auto x = run_continuous(d, s, 5.0, a);
    auto y = run_continuous(d, s, 5.0, b);
    auto z = run_continuous(d, s, 5.0, c);
    CHECK(x == y);
    (void)z;
}

TEST_CASE("detailed balance audits") {
    auto ising = make_ising(cycle_graph(4), {0.8, 0.0});
    Dynamics hb(heat_bath_kernel(ising));
    CHECK(check_detailed_balance(hb, build_exact_chain(hb)).pass);

    auto col = make_coloring(cycle_graph(5), {4});
    Dynamics met(metropolis_kernel(col));
    CHECK(check_detailed_balance(met, build_exact_chain(met)).pass);

    auto hc = make_hardcore(path_graph(3), {1.0});
    auto base = heat_bath_kernel(hc);
    const Configuration bad{0, 0, 0};
    auto corrupt = custom_kernel(
        hc,
        [base, bad](const Configuration& s, Vertex v, std::span<double> out) {
            Configuration tmp = s;
            base->evaluate(tmp, v, out);
            if (s == bad && v == 1) {
                out[0] += 1e-3;
                out[1] -= 1e-3;
            }
        },
        "corrupted");
    Dynamics dc(corrupt);
    auto rep = check_detailed_balance(dc, build_exact_chain(dc));
    CHECK_FALSE(rep.pass);
    CHECK(rep.site == 1);
    CHECK(rep.max_relative_violation > 1e-4);
}

TEST_CASE("ergodicity audits") {
    auto rigid = make_coloring(cycle_graph(6), {3});
    Dynamics d3(heat_bath_kernel(rigid));
    ExactChain c3 = build_exact_chain(d3);
    CHECK_FALSE(check_ergodicity(c3).irreducible);

    auto four = make_coloring(cycle_graph(6), {4});
    Dynamics d4(heat_bath_kernel(four));
    auto rep = check_ergodicity(build_exact_chain(d4));
    CHECK(rep.irreducible);
    CHECK(rep.aperiodic);
}

TEST_CASE("continuous law is the Poisson mixture of discrete laws") {
    auto sys = make_hardcore(path_graph(3), {1.0});
    Dynamics d(heat_bath_kernel(sys));
    ExactChain chain = build_exact_chain(d);
    SpectralDecomposition spec = spectral(chain);
    const Configuration s0{0, 1, 0};
    const std::size_t i0 = *chain.index_of(s0);
    const auto nu = point_mass(chain, i0);
    for (double t : {0.1, 0.5, 1.3, 4.0}) {
        auto a = evolve_continuous(spec, nu, t);
        auto b = evolve_poisson_mixture(chain, nu, t);
        for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::abs(a[j] - b[j]) < 1e-10);
    }
    // Simulation against the exact law at t = 0.5.
    const double t = 0.5;
    const auto law = evolve_continuous(spec, nu, t);
    const std::size_t runs = 200'000;
    std::vector<std::size_t> counts(chain.size(), 0);
    for (std::size_t k = 0; k < runs; ++k) {
        RngStream r(11, k);
        counts[*chain.index_of(run_continuous(d, s0, t, r))]++;
    }
    for (std::size_t j = 0; j < chain.size(); ++j) {
        const double sd = std::sqrt(law[j] * (1 - law[j]) / double(runs));
        CHECK(std::abs(double(counts[j]) / double(runs) - law[j]) <= 4 * sd + 1e-12);
    }
}

TEST_CASE("laziness and nonuniform selectors") {
    auto sys = make_product_coin(empty_graph(3));
    Dynamics lazy(heat_bath_kernel(sys), SiteSelector({1.0, 2.0, 5.0}), 0.5);
    CHECK(lazy.clock_rate() == Approx(8.0));
    ExactChain c = build_exact_chain(lazy);
    // Stay probability at any state: rho + (1 - rho) * sum_v p_v / 2.
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c.entry(i, i) == Approx(0.75));
    CHECK(c.entry(*c.index_of({0, 0, 0}), *c.index_of({0, 0, 1})) == Approx(0.5 * 5.0 / 8.0 * 0.5));
    CHECK_THROWS_AS(SiteSelector({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(Dynamics(heat_bath_kernel(sys), 1.0), std::invalid_argument);
}
