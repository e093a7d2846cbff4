#pragma once

#include "oulevy/levy.hpp"
#include "oulevy/observable.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace oulevy {

// sigma^-1 T_s (x - y)
Vector shift_vector(const DiagonalModel& model, double s, const Vector& x, const Vector& y);

struct OverlapReport {
    Vector a;
    double mass = 1.0; // (n ^ delta_a * n)(B) for the normalized jump law n
    double std_err = 0.0;
};

OverlapReport overlap_mass(const JumpMeasure& nu, const Vector& a, const MonteCarlo& mc);

struct GammaReport {
    double value = 0.0;
    std::vector<double> t_grid; // grid points actually scanned (t >= eps)
    std::size_t directions = 0;
    double binding_t = 0.0;
    Vector binding_x;
};

// 32 log-spaced times from eps to 64 / min lam (eps alone if min lam = 0).
std::vector<double> log_grid(double lo, double hi, std::size_t points);
std::vector<double> default_time_grid(const DiagonalModel& model, double eps);

// Grid approximation of inf over t >= eps, |x| <= rho of
// lambda0 * overlap(sigma^-1 T_t x). Directions and jump samples are shared
// across grid points, so shrinking the index set can only raise the value.
GammaReport gamma_functional(const JumpMeasure& nu, double rho_bound, double eps, std::span<const double> t_grid,
                             std::size_t direction_budget, const MonteCarlo& mc);

enum class Step : int { minus = -1, stay = 0, plus = 1 };

struct MinekaPair {
    Vector u;
    Vector u_prime;
    Step step = Step::stay;
};

// U ~ n, then dU = +a with probability min(1, r_minus(U)) / 2 and -a with
// probability min(1, r_plus(U)) / 2, where r_minus, r_plus are the densities
// of the shifted laws n(. - (-a)), n(. - a) relative to n at U.
MinekaPair sample_mineka_pair(const JumpMeasure& nu, const Vector& a, Rng& rng);

struct CouplingTranscript {
    std::vector<double> jump_times;
    std::vector<Vector> shifts;
    std::vector<MinekaPair> pairs;
    std::vector<Vector> walk;       // S_k, chain started at x
    std::vector<Vector> walk_prime; // S'_k, chain started at y
    std::optional<std::size_t> coupled_at; // number of jumps when the walks met
    Vector end_x;
    Vector end_y;

    bool coupled() const { return coupled_at.has_value(); }
};

// Mineka coupling of the jump chains driving X^x and X^y over (0, t].
CouplingTranscript run_mineka_coupling(const JumpMeasure& nu, const Vector& x, const Vector& y, double t, Rng& rng);

struct ShiftWeights {
    std::vector<std::size_t> jump_index; // jumps with 1 < tau <= t
    std::vector<double> xi;
    std::vector<double> xi_tilde;
};

class ShiftTooLarge : public std::invalid_argument {
public:
    ShiftTooLarge(double s, double lhs, double limit);
    double offending_time() const { return s_; }

private:
    double s_;
};

// Throws ShiftTooLarge unless |sigma^-1 T_s y| + |y| <= min(1, r0/2) on [0, t].
void check_shift_condition(const DiagonalModel& model, const Vector& y, double t, const Ball& ball);

ShiftWeights shift_weights(const JumpMeasure& nu, const Vector& y, const JumpPath& path, const Ball& ball);

enum class SeedMode { independent, shared };

// E[f(X_t^x) 1{tau_1 > eps} sum xi] against E[f(X_t^{x+y}) 1{tau_1 > eps} sum xi~].
TwoSided lemma31_check(const JumpMeasure& nu, const Vector& x, const Vector& y, double t, double eps, const Observable& f,
                       const Ball& ball, const MonteCarlo& mc, SeedMode mode = SeedMode::independent);

struct Decomposition {
    Estimate no_jump;    // E[1{N_t = 0} f(X_t^x)]
    Estimate with_jumps; // E[1{N_t >= 1} f(X_t^x)]
    Estimate total;      // E[f(X_t^x)] on the same paths
};

Decomposition decompose_semigroup(const JumpMeasure& nu, const Observable& f, const Vector& x, double t,
                                  const MonteCarlo& mc);

struct WeightedReport {
    Estimate weighted; // simulate at x, reweight jumps
    Estimate direct;   // simulate at x + eps z0
    std::uint64_t aborted = 0;
    double pooled_std_err() const { return pooled(weighted.std_err, direct.std_err); }
};

WeightedReport p1_weighted(const JumpMeasure& nu, const Observable& f, const Vector& x, const Vector& z0, double eps,
                           double t, const MonteCarlo& mc, SeedMode mode = SeedMode::independent);

// (P_t^1 f(x + eps z0) - P_t^1 f(x)) / eps with common random numbers.
Estimate p1_difference_quotient(const JumpMeasure& nu, const Observable& f, const Vector& x, const Vector& z0,
                                double eps, double t, const MonteCarlo& mc);

// Gradient scale of P_t^1: (1 - e^{-l0 t})^-1 int_0^t e^{-l0 r} max_k q_k/|sigma_k| e^{-lam_k r} dr.
double gamma_t(const JumpMeasure& nu, double t);
double gamma_t(const DiagonalModel& model, double lambda0, double t);

} // namespace oulevy
