#pragma once

#include "oulevy/levy.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace oulevy {

// Total variation uses the convention |P - Q| = 2 for mutually singular laws.
enum class TvMethod { binned, projection, coupling_upper };

std::string method_name(TvMethod method);

struct TvEstimate {
    double value = 0.0;
    double std_err = 0.0;
    TvMethod method = TvMethod::binned;
    std::size_t n_samples = 0;
    std::size_t n_bins = 0;
};

inline constexpr std::size_t min_tv_samples = 1000;
inline constexpr std::size_t bootstrap_resamples = 100;

// ceil(sqrt(n) / 2), capped at 256.
std::size_t default_bin_count(std::size_t n);

// Histogram distance on pooled-quantile bins along one or two projection
// axes (`bins` per axis; 0 picks the default rule). Bootstrap standard error.
TvEstimate tv_binned(std::span<const Vector> p, std::span<const Vector> q, std::span<const Vector> axes,
                     std::size_t bins, std::uint64_t seed);
TvEstimate tv_binned(std::span<const double> p, std::span<const double> q, std::size_t bins, std::uint64_t seed);

// Distance between the sample law and its translate by v, measured along
// v / |v|. Every sample is reused on both sides.
TvEstimate tv_shift_projection(std::span<const Vector> samples, const Vector& v, std::size_t bins, std::uint64_t seed);

// Lower estimate of |P_t(x, .) - P_t(y, .)| for compound Poisson noise. The
// no-jump atoms sit at the distinct points T_t x, T_t y and contribute
// 2 P(N_t = 0) exactly; the rest is the projection estimate on samples of
// X_t^0 conditioned on at least one jump.
TvEstimate tv_transition_projection(std::span<const Vector> jump_samples, double p_no_jump, const Vector& v,
                                    std::size_t bins, std::uint64_t seed);

struct GridSup {
    double value = 0.0;
    std::vector<double> s_grid;
    double binding_s = 0.0;
};

// int_B phi_a(z)^2 rho(z - a)^2 / rho(z) mu(dz) for one shift a.
Estimate delta1_integral(const JumpMeasure& nu, const Vector& a, const Ball& ball, const MonteCarlo& mc);

// Supremum of delta1_integral over a = sigma^-1 T_s x, s >= eps on the
// grid, |x| = 1 on random directions. Samples are shared across the grid.
GridSup delta1(const JumpMeasure& nu, double eps, const Ball& ball, std::span<const double> s_grid,
               std::size_t x_budget, const MonteCarlo& mc);
GridSup delta1(const JumpMeasure& nu, double eps, const Ball& ball, std::size_t x_budget, const MonteCarlo& mc);

enum class Delta2Mode { numeric, closed_form };

// numeric: grid supremum of int_B (phi_a^2 v 1) / rho dmu, like delta1.
// closed_form: (1/c0) [1 + exp(max_k q_k e^{-2 eps lam_k})], c0 = inf_B rho.
GridSup delta2(const JumpMeasure& nu, double eps, const Ball& ball, Delta2Mode mode, std::size_t x_budget = 64,
               const MonteCarlo& mc = {});
double delta2_closed_form(const DiagonalModel& model, double c0, double eps);

enum class BoundKind { coupling_i, coupling_ii, exponential_z3, log_rate, polynomial_52 };

std::string bound_name(BoundKind kind);
BoundKind parse_bound_kind(const std::string& name);

struct BoundParams {
    double scale = 1.0;        // fitted constant C
    double displacement = 0.0; // |x - y|
    double lambda0 = 1.0;
    double lambda = 1.0;
    double delta = 1.0;
    double d = 1.0;
    std::function<double(double)> delta_eval; // delta_1 or delta_2 as a function of eps
};

struct BoundCurve {
    BoundKind kind = BoundKind::exponential_z3;
    std::vector<double> times;
    std::vector<double> values;
    BoundParams params;
};

// Rate factor of each bound at t, before the factor C (1 + |x - y|).
double bound_rate(BoundKind kind, const BoundParams& params, double t);
BoundCurve bound_curve(BoundKind kind, const BoundParams& params, std::span<const double> times);

// C such that the curve passes through `value` at time t.
double fit_bound_scale(BoundKind kind, const BoundParams& params, double t, double value);

enum class RateModel { power, exponential, inverse_log };

struct RateFit {
    double rate = 0.0; // exponent, exponential rate, or 1/log(1+t) slope
    double intercept = 0.0;
    double residual = 0.0; // RMS residual of the linearized fit
};

RateFit fit_rate(std::span<const double> times, std::span<const double> values, RateModel model);

} // namespace oulevy
