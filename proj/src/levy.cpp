#include "oulevy/levy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace oulevy {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Chi density with n degrees of freedom and scale s, matched to the mean
// squared norm of the reference measure: s^2 = (sum_k 1/q_k) / n.
struct ChiSurrogate {
    double n = 1.0;
    double scale = 1.0;
    double log_norm = 0.0;

    static ChiSurrogate of(const DiagonalModel& model)
    {
        ChiSurrogate chi;
        chi.n = model.n_modes();
        chi.scale = std::sqrt(model.q().cwiseInverse().sum() / chi.n);
        chi.log_norm = (0.5 * chi.n - 1.0) * std::log(2.0) + std::lgamma(0.5 * chi.n) + chi.n * std::log(chi.scale);
        return chi;
    }

    double log_pdf(double r) const { return (n - 1.0) * std::log(r) - 0.5 * r * r / (scale * scale) - log_norm; }

    // log of r^-(1+alpha) / g(r)
    double log_stable(double r, double alpha) const { return -(1.0 + alpha) * std::log(r) - log_pdf(r); }
};

void validate(const LevySpec& spec, const DiagonalModel& model)
{
    if (!(spec.eta >= 0.0) || !std::isfinite(spec.eta))
        throw std::invalid_argument("eta must be a finite non-negative number");
    std::visit(overloaded{
                   [](const Constant& f) {
                       if (!(f.c > 0.0))
                           throw std::invalid_argument("constant density needs c > 0");
                   },
                   [&](const IndicatorBall& f) {
                       model.check_dim(f.center, "indicator ball center");
                       if (!(f.radius > 0.0) || !(f.level > 0.0))
                           throw std::invalid_argument("indicator ball needs radius > 0 and level > 0");
                   },
                   [](const BoundedLipschitz& f) {
                       if (!(f.c > 0.0) || !(f.scale > 0.0))
                           throw std::invalid_argument("bounded Lipschitz density needs c > 0 and scale > 0");
                   },
                   [&](const StableLike& f) {
                       if (!(f.alpha > 0.0 && f.alpha < 2.0))
                           throw std::invalid_argument("stable-like density needs alpha in (0, 2)");
                       if (!(f.r0 > 0.0))
                           throw std::invalid_argument("stable-like density needs r0 > 0");
                       if (spec.eta >= f.r0)
                           throw std::invalid_argument("stable-like density vanishes when eta >= r0");
                   },
               },
               spec.rho0);
}

double truncated_density(const LevySpec& spec, const ChiSurrogate& chi, const Vector& z)
{
    const double r = z.norm();
    if (r < spec.eta)
        return 0.0;
    return std::visit(overloaded{
                          [](const Constant& f) { return f.c; },
                          [&](const IndicatorBall& f) { return (z - f.center).norm() < f.radius ? f.level : 0.0; },
                          [&](const BoundedLipschitz& f) { return f.c / (1.0 + r / f.scale); },
                          [&](const StableLike& f) {
                              if (r <= 0.0 || r >= f.r0)
                                  return 0.0;
                              return std::exp(chi.log_stable(r, f.alpha));
                          },
                      },
                      spec.rho0);
}

bool has_finite_mass(const LevySpec& spec)
{
    return !(std::holds_alternative<StableLike>(spec.rho0) && spec.eta == 0.0);
}

} // namespace

std::string family_name(const DensityFamily& rho0)
{
    return std::visit(overloaded{
                          [](const Constant&) { return std::string("constant"); },
                          [](const IndicatorBall&) { return std::string("indicator_ball"); },
                          [](const BoundedLipschitz&) { return std::string("bounded_lipschitz"); },
                          [](const StableLike&) { return std::string("stable_like"); },
                      },
                      rho0);
}

MassEstimate nu0_mass(const LevySpec& spec, const DiagonalModel& model, const MonteCarlo& mc)
{
    validate(spec, model);
    if (!has_finite_mass(spec))
        return {true, 0.0, 0.0};
    if (const auto* f = std::get_if<Constant>(&spec.rho0); f && spec.eta == 0.0)
        return {false, f->c, 0.0};
    if (mc.samples < 2)
        throw std::invalid_argument("mass estimate needs at least two samples");

    const ChiSurrogate chi = ChiSurrogate::of(model);
    const Moments m = replicate(mc, Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
        acc.add(truncated_density(spec, chi, gaussian_sample(model, rng)));
    });
    return {false, m.mean(), m.std_err()};
}

JumpMeasure::JumpMeasure(LevySpec spec, DiagonalModel model)
    : JumpMeasure(std::move(spec), std::move(model), MonteCarlo{default_mass_seed, default_mass_samples, 1})
{
}

JumpMeasure::JumpMeasure(LevySpec spec, DiagonalModel model, const MonteCarlo& mass_mc)
    : spec_(std::move(spec)), model_(std::move(model))
{
    validate(spec_, model_);
    if (!has_finite_mass(spec_))
        throw std::invalid_argument("stable-like jump measure has infinite mass at eta = 0; set eta > 0");

    const ChiSurrogate chi = ChiSurrogate::of(model_);
    chi_log_norm_ = chi.log_norm;
    chi_scale_ = chi.scale;

    const double eta = spec_.eta;
    envelope_ = std::visit(overloaded{
                               [](const Constant& f) { return f.c; },
                               [](const IndicatorBall& f) { return f.level; },
                               [&](const BoundedLipschitz& f) { return f.c / (1.0 + eta / f.scale); },
                               [&](const StableLike& f) {
                                   // log r^-(1+alpha)/g(r) is convex in r, so the sup
                                   // over [eta, r0] sits at an endpoint.
                                   return std::exp(std::max(chi.log_stable(eta, f.alpha), chi.log_stable(f.r0, f.alpha)));
                               },
                           },
                           spec_.rho0);

    mass_ = nu0_mass(spec_, model_, mass_mc);
    if (!(mass_.value > 0.0)) {
        std::ostringstream msg;
        msg << family_name(spec_.rho0) << " jump measure has zero mass after truncation at eta=" << eta;
        throw std::invalid_argument(msg.str());
    }
    if (acceptance_rate() < 1e-4) {
        std::ostringstream msg;
        msg << "rejection envelope too loose for " << family_name(spec_.rho0) << ": acceptance rate "
            << acceptance_rate() << " < 1e-4 (mass " << mass_.value << ", envelope " << envelope_ << ")";
        throw std::runtime_error(msg.str());
    }
}

double JumpMeasure::density(const Vector& z) const
{
    ChiSurrogate chi;
    chi.n = model_.n_modes();
    chi.scale = chi_scale_;
    chi.log_norm = chi_log_norm_;
    return truncated_density(spec_, chi, z);
}

double JumpMeasure::radial_normalizer(double r) const
{
    const double n = model_.n_modes();
    return std::exp((n - 1.0) * std::log(r) - 0.5 * r * r / (chi_scale_ * chi_scale_) - chi_log_norm_);
}

double JumpMeasure::infimum_on_ball(const Ball& ball) const
{
    model_.check_dim(ball.center, "ball center");
    const double near = std::max(0.0, ball.center.norm() - ball.radius);
    const double far = ball.center.norm() + ball.radius;
    if (near < spec_.eta)
        return 0.0;
    return std::visit(overloaded{
                          [](const Constant& f) { return f.c; },
                          [&](const IndicatorBall& f) {
                              return (ball.center - f.center).norm() + ball.radius <= f.radius ? f.level : 0.0;
                          },
                          [&](const BoundedLipschitz& f) { return f.c / (1.0 + far / f.scale); },
                          [&](const StableLike& f) {
                              if (far >= f.r0)
                                  return 0.0;
                              // r^-(1+alpha)/g(r) has a single interior minimum.
                              const double n = model_.n_modes();
                              const double r_min = chi_scale_ * std::sqrt(n + f.alpha);
                              const double r = std::clamp(r_min, std::max(near, 1e-300), far);
                              return std::pow(r, -(1.0 + f.alpha)) / radial_normalizer(r);
                          },
                      },
                      spec_.rho0);
}

Vector sample_jump(const JumpMeasure& nu, Rng& rng)
{
    const double m = nu.envelope();
    constexpr int max_rejections = 1000000;
    for (int tries = 0; tries < max_rejections; ++tries) {
        Vector z = gaussian_sample(nu.model(), rng);
        if (rng.uniform() * m < nu.density(z))
            return z;
    }
    std::ostringstream msg;
    msg << "sample_jump: " << max_rejections << " consecutive rejections (expected acceptance "
        << nu.acceptance_rate() << ")";
    throw std::runtime_error(msg.str());
}

JumpPath sample_path(const JumpMeasure& nu, double t, Rng& rng)
{
    if (!(t > 0.0))
        throw std::invalid_argument("path horizon must be positive");
    const double m = nu.envelope();
    const std::uint64_t proposals = rng.poisson(m * t);
    std::vector<double> times(proposals);
    for (auto& s : times)
        s = t * (1.0 - rng.uniform());
    std::sort(times.begin(), times.end());

    JumpPath path;
    path.horizon = t;
    for (double s : times) {
        Vector z = gaussian_sample(nu.model(), rng);
        if (rng.uniform() * m < nu.density(z))
            path.jumps.push_back({s, std::move(z)});
    }
    return path;
}

Vector mild_solution(const DiagonalModel& model, const Vector& x, const JumpPath& path)
{
    model.check_dim(x, "initial state");
    Vector out = semigroup_apply(model, path.horizon, x);
    for (const auto& jump : path.jumps) {
        model.check_dim(jump.size, "jump");
        out += semigroup_apply(model, path.horizon - jump.time, sigma_apply(model, jump.size));
    }
    return out;
}

double mecke_integrand(const MeckeTest& h, const DiagonalModel&, const Vector& endpoint, const Vector& z, double s)
{
    switch (h.kind) {
    case MeckeKind::unit:
        return 1.0;
    case MeckeKind::small_jump:
        return z.norm() < h.radius ? 1.0 : 0.0;
    case MeckeKind::endpoint_cosine:
        return std::cos(endpoint[0]) * 0.5 * (1.0 + std::sin(z[0] + s));
    }
    return 0.0;
}

TwoSided mecke_identity_check(const JumpMeasure& nu, double t, const MeckeTest& h, const MonteCarlo& mc)
{
    if (!(t > 0.0))
        throw std::invalid_argument("horizon must be positive");
    const DiagonalModel& model = nu.model();
    const Vector origin = Vector::Zero(model.n_modes());
    const bool needs_path = h.kind == MeckeKind::endpoint_cosine;

    const Moments lhs = replicate(mc.stream(1), Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
        Vector endpoint = origin;
        if (needs_path)
            endpoint = mild_solution(model, origin, sample_path(nu, t, rng));
        const Vector z = gaussian_sample(model, rng);
        const double s = t * (1.0 - rng.uniform());
        const double rho = nu.density(z);
        acc.add(rho > 0.0 ? t * rho * mecke_integrand(h, model, endpoint, z, s) : 0.0);
    });

    const Moments rhs = replicate(mc.stream(2), Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
        const JumpPath path = sample_path(nu, t, rng);
        const Vector endpoint = needs_path ? mild_solution(model, origin, path) : origin;
        double total = 0.0;
        for (const auto& jump : path.jumps) {
            Vector without = endpoint;
            if (needs_path)
                without -= semigroup_apply(model, t - jump.time, sigma_apply(model, jump.size));
            total += mecke_integrand(h, model, without, jump.size, jump.time);
        }
        acc.add(total);
    });

    return {lhs.estimate(), rhs.estimate()};
}

} // namespace oulevy
