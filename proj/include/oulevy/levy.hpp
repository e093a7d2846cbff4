#pragma once

#include "oulevy/model.hpp"
#include "oulevy/parallel.hpp"
#include "oulevy/rng.hpp"
#include "oulevy/stats.hpp"

#include <string>
#include <variant>
#include <vector>

namespace oulevy {

// Densities rho0 of the jump intensity with respect to the reference
// Gaussian measure.
struct Constant {
    double c = 1.0;
};

struct IndicatorBall {
    Vector center;
    double radius = 1.0;
    double level = 1.0;
};

// rho0(z) = c / (1 + |z| / scale)
struct BoundedLipschitz {
    double c = 1.0;
    double scale = 1.0;
};

// rho0(z) = 1{0 < |z| < r0} |z|^-(1+alpha) / g(|z|), where g is a chi-type
// density for |z| under the reference measure. Infinite mass unless
// truncated at eta > 0.
struct StableLike {
    double alpha = 0.5;
    double r0 = 1.0;
};

using DensityFamily = std::variant<Constant, IndicatorBall, BoundedLipschitz, StableLike>;

struct LevySpec {
    DensityFamily rho0 = Constant{};
    double eta = 0.0; // jumps with |z| < eta are dropped
};

std::string family_name(const DensityFamily& rho0);

struct MassEstimate {
    bool infinite = false;
    double value = 0.0;
    double std_err = 0.0;
};

// Total mass of the truncated jump measure, by Monte Carlo under the
// reference measure (closed form for an untruncated constant density).
MassEstimate nu0_mass(const LevySpec& spec, const DiagonalModel& model, const MonteCarlo& mc);

struct Ball {
    Vector center;
    double radius = 1.0;
};

// A finite jump measure nu0 = rho0 mu truncated at eta, bound to a model,
// with its total mass and rejection envelope resolved at construction.
class JumpMeasure {
public:
    static constexpr std::uint64_t default_mass_samples = 1u << 21;
    static constexpr std::uint64_t default_mass_seed = 0x6e75306d617373ULL;

    JumpMeasure(LevySpec spec, DiagonalModel model);
    JumpMeasure(LevySpec spec, DiagonalModel model, const MonteCarlo& mass_mc);

    const LevySpec& spec() const { return spec_; }
    const DiagonalModel& model() const { return model_; }
    int n_modes() const { return model_.n_modes(); }

    double lambda0() const { return mass_.value; }
    double lambda0_std_err() const { return mass_.std_err; }
    bool lambda0_exact() const { return mass_.std_err == 0.0; }

    // Truncated density rho0(z) 1{|z| >= eta}.
    double density(const Vector& z) const;
    double envelope() const { return envelope_; }
    double acceptance_rate() const { return mass_.value / envelope_; }

    // inf of the truncated density over a ball (0 if it vanishes somewhere).
    double infimum_on_ball(const Ball& ball) const;

private:
    double radial_normalizer(double r) const;

    LevySpec spec_;
    DiagonalModel model_;
    MassEstimate mass_;
    double envelope_ = 1.0;
    double chi_log_norm_ = 0.0;
    double chi_scale_ = 1.0;

    friend MassEstimate nu0_mass(const LevySpec& spec, const DiagonalModel& model, const MonteCarlo& mc);
};

struct Jump {
    double time = 0.0;
    Vector size;
};

struct JumpPath {
    double horizon = 0.0;
    std::vector<Jump> jumps;

    std::size_t count() const { return jumps.size(); }
};

// Draw from the normalized jump law by rejection from the reference measure.
Vector sample_jump(const JumpMeasure& nu, Rng& rng);

// Compound Poisson driver on (0, t], generated by thinning a rate-M Poisson
// process of reference-measure proposals (M the rejection envelope).
JumpPath sample_path(const JumpMeasure& nu, double t, Rng& rng);

// X_t^x = T_t x + sum_i T_{t - tau_i} sigma xi_i
Vector mild_solution(const DiagonalModel& model, const Vector& x, const JumpPath& path);

enum class MeckeKind { unit, small_jump, endpoint_cosine };

struct MeckeTest {
    MeckeKind kind = MeckeKind::unit;
    double radius = 1.0; // small_jump threshold on |z|
};

// h(w, z, s) evaluated from the endpoint of the path w (started at 0), the
// jump z and its time s.
double mecke_integrand(const MeckeTest& h, const DiagonalModel& model, const Vector& endpoint, const Vector& z, double s);

struct TwoSided {
    Estimate lhs;
    Estimate rhs;
    double pooled_std_err() const { return pooled(lhs.std_err, rhs.std_err); }
    double gap() const { return lhs.value - rhs.value; }
};

// Compensated side: t E[rho(z) h(w, z, s)] with w a path, z ~ mu, s uniform.
// Jump side: E sum_i h(w - (jump i), xi_i, tau_i). Independent streams.
TwoSided mecke_identity_check(const JumpMeasure& nu, double t, const MeckeTest& h, const MonteCarlo& mc);

} // namespace oulevy
