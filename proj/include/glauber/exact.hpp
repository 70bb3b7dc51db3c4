#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "glauber/dynamics.hpp"

namespace glauber {

/// Enumerated chain: states, one-step transition matrix (compressed rows) and
/// stationary vector. Immutable after construction.
class ExactChain {
public:
    ExactChain(std::vector<Configuration> states, std::vector<std::size_t> row_start,
               std::vector<std::uint32_t> cols, std::vector<double> values,
               std::vector<double> stationary, double clock_rate);

    std::size_t size() const { return states_.size(); }
    const Configuration& state(std::size_t i) const { return states_[i]; }
    const std::vector<Configuration>& states() const { return states_; }
    std::optional<std::size_t> index_of(const Configuration& sigma) const;

    const std::vector<double>& stationary() const { return stationary_; }
    double clock_rate() const { return clock_rate_; }

    std::size_t row_begin(std::size_t i) const { return row_start_[i]; }
    std::size_t row_end(std::size_t i) const { return row_start_[i + 1]; }
    std::size_t col(std::size_t p) const { return cols_[p]; }
    double value(std::size_t p) const { return values_[p]; }
    std::size_t nonzeros() const { return values_.size(); }
    double entry(std::size_t i, std::size_t j) const;

    Eigen::MatrixXd dense() const;
    /// mu P.
    std::vector<double> step(std::span<const double> mu) const;
    void step_into(std::span<const double> mu, std::span<double> out) const;

    /// ||pi P - pi||_inf; stationarity holds when below 1e-10.
    double stationary_residual() const { return stationary_residual_; }
    bool stationary_ok() const { return stationary_residual_ < 1e-10; }
    double max_row_error() const { return max_row_error_; }
    bool irreducible() const { return irreducible_; }
    bool aperiodic() const { return aperiodic_; }
    bool ergodic() const { return irreducible_ && aperiodic_; }
    const std::string& warning() const { return warning_; }

private:
    std::vector<Configuration> states_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> row_start_;
    std::vector<std::uint32_t> cols_;
    std::vector<double> values_;
    std::vector<double> stationary_;
    double clock_rate_;
    double stationary_residual_ = 0.0;
    double max_row_error_ = 0.0;
    bool irreducible_ = false;
    bool aperiodic_ = false;
    std::string warning_;
};

/// Assembles P = rho I + (1 - rho) sum_v p_v K_v over the enumerated Omega and
/// pi from the normalized system weights. Throws CapExceeded when |Omega| > cap,
/// and std::logic_error when a kernel row is not a distribution on Omega.
ExactChain build_exact_chain(const Dynamics& dyn, std::size_t cap = 200'000);

/// Chain restricted to the communicating class of `start` (closed for
/// reversible chains), with pi renormalized.
ExactChain restrict_to_class(const ExactChain& chain, std::size_t start);

struct SpectralDecomposition {
    /// Continuous rates, nondecreasing: rate_k = clock_rate (1 - beta_k).
    Eigen::VectorXd rates;
    /// Discrete eigenvalues beta_k, matching order.
    Eigen::VectorXd eigenvalues;
    /// Orthonormal eigenvectors of the symmetrized kernel; column 0 = sqrt(pi).
    Eigen::MatrixXd basis;
    Eigen::VectorXd sqrt_pi;
};

SpectralDecomposition spectral(const ExactChain& chain);

enum class TimeKind { discrete, continuous };
std::string to_string(TimeKind kind);

/// Law at time t from initial law nu: discrete by vector iteration, continuous by
/// the spectral form.
std::vector<double> evolve_discrete(const ExactChain& chain, std::span<const double> nu,
                                    std::size_t steps);
std::vector<double> evolve_continuous(const SpectralDecomposition& spec,
                                      std::span<const double> nu, double t);
/// Continuous law through the Poisson mixture of discrete laws (rate = clock
/// rate), truncated once the remaining Poisson mass is below tail.
std::vector<double> evolve_poisson_mixture(const ExactChain& chain, std::span<const double> nu,
                                           double t, double tail = 1e-14);

double tv_distance(std::span<const double> a, std::span<const double> b);
std::vector<double> point_mass(const ExactChain& chain, std::size_t i);

struct TVCurve {
    TimeKind kind = TimeKind::discrete;
    std::vector<std::pair<double, double>> samples;
    /// Continuous curves: largest gap between spectral and Poisson-mixture laws.
    double cross_check_gap = 0.0;
};

/// Times are rounded to integers in discrete mode. Continuous curves are
/// cross-checked against the Poisson mixture and throw std::logic_error when the
/// two disagree by more than 1e-9.
TVCurve tv_curve(const ExactChain& chain, const Configuration& sigma0, std::span<const double> times,
                 TimeKind kind);

inline constexpr double kMixingThreshold = 0.18393972058572117;  // 1/(2e)

struct MixingResult {
    double tau = 0.0;
    /// exact-worst-start | exact-candidate-start | closed-form
    std::string method;
    std::size_t worst_start = 0;
    /// True when only candidate starts were examined (tau is a lower bound).
    bool lower_bound = false;
};

/// Discrete: smallest integer t with worst-start TV <= 1/(2e). All starts when
/// |Omega| <= 5000 and no candidates are given; otherwise the candidates only.
/// Continuous: bisection to 1e-4 relative. Non-ergodic chains throw.
MixingResult mixing_time(const ExactChain& chain, TimeKind kind,
                         std::span<const std::size_t> candidate_starts = {},
                         std::size_t max_steps = 50'000'000);

/// TV from start i after `steps` discrete steps.
double discrete_tv(const ExactChain& chain, std::size_t start, std::size_t steps);

struct CmdTerm {
    double alpha = 0.0;
    double lambda = 0.0;
};

/// Pr_pi(.|Psi)(X_t in Psi) = sum_k alpha_k exp(-lambda_k t).
std::vector<CmdTerm> cmd_coefficients(const ExactChain& chain, const SpectralDecomposition& spec,
                                      std::span<const std::size_t> psi);
double cmd_evaluate(std::span<const CmdTerm> terms, double t);
/// Direct continuous evolution of Pr(X_t in Psi) from pi conditioned on Psi.
double occupancy_direct(const ExactChain& chain, std::span<const std::size_t> psi, double t);

/// States with sigma(v) in the mask.
std::vector<std::size_t> states_with_spin(const ExactChain& chain, Vertex v, SpinMask q_v);

struct OccupancyReport {
    double mu = 0.0;
    double min_slack = 0.0;
    double worst_time = 0.0;
    bool pass = false;
    std::vector<double> lhs;
    std::vector<double> rhs;
};

/// mu + (1 - mu) exp(-t/(1 - mu)).
double cmd_occupancy_bound(double mu, double t);

OccupancyReport check_lemma_3_5(const ExactChain& chain, Vertex v, SpinMask q_v,
                              std::span<const double> t_grid);

/// Empty graph, n coins: exact continuous-time TV at time t (rate-n clock).
/// Selected spin flips with probability flip_prob; the fair coin is 1/2.
double hypercube_tv(std::size_t n, double flip_prob, double t);
/// Time where hypercube_tv crosses 1/(2e).
double hypercube_crossing_time(std::size_t n, double flip_prob);

struct TranslationReport {
    bool pass = false;
    double min_slack = 0.0;
    double worst_t = 0.0;
    std::size_t worst_start = 0;
};

/// ||X_t^D - pi|| >= ||X_{2t/rate}^C - pi|| - 2 e^{-t} at every start and grid point
/// (grid values are rounded to integers for the discrete side).
TranslationReport verify_prop_2_1(const ExactChain& chain, std::span<const double> t_grid);

}  // namespace glauber
