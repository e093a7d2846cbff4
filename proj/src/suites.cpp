#include "oulevy/suites.hpp"

#include "oulevy/config.hpp"
#include "oulevy/coupling.hpp"
#include "oulevy/levy.hpp"
#include "oulevy/observable.hpp"
#include "oulevy/tvlab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace oulevy {

bool SuiteReport::pass() const
{
    return std::all_of(properties.begin(), properties.end(), [](const Property& p) { return p.pass; });
}

bool SuiteReport::pass(std::string_view prefix) const
{
    bool any = false;
    for (const auto& p : properties) {
        if (std::string_view(p.name).substr(0, prefix.size()) != prefix)
            continue;
        any = true;
        if (!p.pass)
            return false;
    }
    return any;
}

namespace {

class Checks {
public:
    explicit Checks(std::string suite) { report_.suite = std::move(suite); }

    void at_most(std::string name, double statistic, double threshold)
    {
        report_.properties.push_back({std::move(name), statistic, threshold, statistic <= threshold});
    }

    // |a - b| <= k * se
    void close(std::string name, double a, double b, double se, double k = 3.0)
    {
        at_most(std::move(name), std::abs(a - b), k * se);
    }

    SuiteReport take() { return std::move(report_); }

private:
    SuiteReport report_;
};

MonteCarlo base_budget(const SuiteOptions& o) { return {o.seed, o.replicas, o.threads}; }

DiagonalModel preset_model(std::string_view preset) { return build_model(preset_config(preset)); }

JumpMeasure preset_measure(std::string_view preset)
{
    const auto cfg = preset_config(preset);
    return JumpMeasure(cfg.levy, build_model(cfg));
}

Vector unit(int n, int k)
{
    Vector e = Vector::Zero(n);
    e[k] = 1.0;
    return e;
}

DiagonalModel random_model(Rng& rng)
{
    const int n = 1 + static_cast<int>(rng.uniform() * 8.0);
    Vector q(n), lam(n), sigma(n);
    for (int k = 0; k < n; ++k) {
        q[k] = 0.5 + 8.0 * rng.uniform();
        lam[k] = 3.0 * rng.uniform();
        sigma[k] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.5 + rng.uniform());
    }
    return DiagonalModel(q, lam, sigma);
}

// ---------------------------------------------------------------------------

SuiteReport cameron_martin(const SuiteOptions& o)
{
    Checks c("cm");
    const MonteCarlo base = base_budget(o);
    Rng rng(derive_seed(o.seed, 0xc3));
    double worst_mean = 0.0, worst_square = 0.0, worst_cocycle = 0.0;
    for (int pair = 0; pair < 100; ++pair) {
        const auto model = random_model(rng);
        Vector h(model.n_modes());
        for (int k = 0; k < h.size(); ++k)
            h[k] = rng.normal();
        // Scale so that sum q h^2 is uniform on (0, 0.3): phi_h^2 keeps a finite fourth moment.
        const double energy = (model.q().array() * h.array().square()).sum();
        h *= std::sqrt(0.3 * rng.uniform() / energy);

        const auto s = replicate(base.stream(1000 + pair), MomentSet<2>{}, [&](std::uint64_t, Rng& r, MomentSet<2>& acc) {
            const double w = cm_density(model, h, gaussian_sample(model, r));
            acc[0].add(w);
            acc[1].add(w * w);
        });
        auto z = [](double gap, double se) { return se > 0.0 ? std::abs(gap) / se : (gap == 0.0 ? 0.0 : HUGE_VAL); };
        worst_mean = std::max(worst_mean, z(s[0].mean() - 1.0, s[0].std_err()));
        worst_square = std::max(worst_square, z(s[1].mean() - cm_density_squared_integral(model, h), s[1].std_err()));

        const Vector g = h.reverse().head(model.n_modes()) * 0.5;
        const Vector point = gaussian_sample(model, rng);
        const double lhs = cm_density(model, g + h, point);
        const double rhs = cm_density(model, g, point) * cm_density(model, h, point - g);
        worst_cocycle = std::max(worst_cocycle, std::abs(lhs / rhs - 1.0));
    }
    // Statistics are the largest |estimate - exact| / stderr over the 100 pairs.
    c.at_most("normalization.max_z", worst_mean, 3.0);
    c.at_most("second_moment.max_z", worst_square, 3.0);
    c.at_most("cocycle.max_relative_error", worst_cocycle, 1e-12);
    return c.take();
}

// ---------------------------------------------------------------------------

SuiteReport mecke(const SuiteOptions& o)
{
    Checks c("mecke");
    const MonteCarlo base = base_budget(o).with_samples(10 * o.replicas);
    const double t = 2.0;
    std::uint64_t tag = 0;
    for (const char* preset : {"gaussian52-small", "z3-exponential"}) {
        const JumpMeasure nu = preset_measure(preset);
        for (const auto& [label, test] : {std::pair{"unit", MeckeTest{MeckeKind::unit, 1.0}},
                                          std::pair{"small_jump", MeckeTest{MeckeKind::small_jump, 1.0}},
                                          std::pair{"endpoint_cosine", MeckeTest{MeckeKind::endpoint_cosine, 1.0}}}) {
            const TwoSided r = mecke_identity_check(nu, t, test, base.stream(++tag));
            c.close(std::string(preset) + "." + label, r.lhs.value, r.rhs.value, r.pooled_std_err());
        }
    }
    return c.take();
}

// ---------------------------------------------------------------------------

SuiteReport mineka(const SuiteOptions& o)
{
    Checks c("mineka");
    const MonteCarlo base = base_budget(o);
    const JumpMeasure nu = preset_measure("gaussian52-small");
    const DiagonalModel& model = nu.model();
    const int n = model.n_modes();

    // Pair law at a = 2 e1 (q_1 = 1): overlap 2 Phi(-1) for the Gaussian jump law.
    const Vector a = 2.0 * unit(n, 0);
    const auto pairs = generate<MinekaPair>(base.stream(1), [&](std::uint64_t, Rng& rng) {
        return sample_mineka_pair(nu, a, rng);
    });
    std::vector<Vector> u, u_prime;
    MomentSet<3> steps; // 1{+a}, 1{-a}, 1{+a} - 1{-a}
    for (const auto& p : pairs) {
        u.push_back(p.u);
        u_prime.push_back(p.u_prime);
        const double up = p.step == Step::plus ? 1.0 : 0.0;
        const double down = p.step == Step::minus ? 1.0 : 0.0;
        steps[0].add(up);
        steps[1].add(down);
        steps[2].add(up - down);
    }
    const std::vector<Vector> along_a{a.normalized()};
    c.at_most("pair.marginal_tv", tv_binned(u, u_prime, along_a, 8, derive_seed(o.seed, 11)).value, 0.01);
    c.close("pair.defect_symmetry", steps[2].mean(), 0.0, steps[2].std_err());
    const OverlapReport overlap = overlap_mass(nu, a, base.stream(2));
    c.close("pair.defect_vs_half_overlap", steps[0].mean(), 0.5 * overlap.mass,
            pooled(steps[0].std_err(), 0.5 * overlap.std_err));
    const double oracle = 2.0 * normal_cdf(-std::sqrt(model.q()[0]) * a.norm() / 2.0);
    c.close("pair.overlap_vs_normal_oracle", overlap.mass, oracle, overlap.std_err);
    {
        Rng rng(derive_seed(o.seed, 12));
        double moved = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const auto p = sample_mineka_pair(nu, Vector::Zero(n), rng);
            moved += (p.u_prime - p.u).norm() > 0.0 || p.step != Step::stay;
        }
        c.at_most("pair.zero_shift_moves", moved, 0.0);
    }

    // Chains from x = 0 and y = e1 over (0, 2].
    const double t = 2.0;
    const Vector x = Vector::Zero(n);
    const Vector y = unit(n, 0);
    const Vector v = semigroup_apply(model, t, x - y);
    const auto runs = generate<CouplingTranscript>(base.stream(3), [&](std::uint64_t, Rng& rng) {
        return run_mineka_coupling(nu, x, y, t, rng);
    });
    auto direct = [&](const Vector& start, std::uint64_t tag) {
        return generate<Vector>(base.stream(tag), [&](std::uint64_t, Rng& rng) {
            return mild_solution(model, start, sample_path(nu, t, rng));
        });
    };
    const auto direct_x = direct(x, 4);
    const auto direct_y = direct(y, 5);
    std::vector<Vector> chain_x, chain_y;
    Moments apart;
    double quantization = 0.0;
    double desync = 0.0;
    for (const auto& tr : runs) {
        chain_x.push_back(tr.end_x);
        chain_y.push_back(tr.end_y);
        apart.add(tr.coupled() ? 0.0 : 1.0);
        Vector prev = Vector::Zero(n);
        for (std::size_t k = 0; k < tr.walk.size(); ++k) {
            const Vector diff = tr.walk_prime[k] - tr.walk[k];
            const Vector step = diff - prev;
            prev = diff;
            const double off = std::min({(step - v).norm(), step.norm(), (step + v).norm()});
            quantization = std::max(quantization, off / v.norm());
        }
        if (tr.coupled_at)
            for (std::size_t k = *tr.coupled_at; k < tr.pairs.size(); ++k)
                desync += tr.pairs[k].u != tr.pairs[k].u_prime;
    }
    const std::vector<Vector> first_axis{unit(n, 0)};
    c.at_most("chain.marginal_tv_x", tv_binned(chain_x, direct_x, first_axis, 10, derive_seed(o.seed, 13)).value, 0.02);
    c.at_most("chain.marginal_tv_y", tv_binned(chain_y, direct_y, first_axis, 10, derive_seed(o.seed, 14)).value, 0.02);
    c.at_most("chain.walk_quantization", quantization, 1e-12);
    c.at_most("chain.desync_after_coupling", desync, 0.0);
    const TvEstimate tv = tv_binned(direct_x, direct_y, first_axis, 10, derive_seed(o.seed, 15));
    c.at_most("chain.coupling_inequality", tv.value - 2.0 * apart.mean(), 3.0 * pooled(tv.std_err, 2.0 * apart.std_err()));
    {
        Rng rng(derive_seed(o.seed, 16));
        double bad = 0.0;
        for (int i = 0; i < 100; ++i) {
            const auto tr = run_mineka_coupling(nu, y, y, t, rng);
            bad += !(tr.coupled_at == std::size_t{0}) || tr.end_x != tr.end_y;
        }
        c.at_most("chain.equal_start_coupled", bad, 0.0);
    }
    {
        // P(coupled by t) along t = 1, 2, 4, 8; largest drop beyond 2 stderr.
        double worst = -HUGE_VAL;
        Moments prev;
        std::uint64_t tag = 20;
        for (double s : {1.0, 2.0, 4.0, 8.0}) {
            const Moments met = replicate(base.stream(tag++), Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
                acc.add(run_mineka_coupling(nu, x, y, s, rng).coupled() ? 1.0 : 0.0);
            });
            if (prev.n)
                worst = std::max(worst, prev.mean() - met.mean() - 2.0 * pooled(prev.std_err(), met.std_err()));
            prev = met;
        }
        c.at_most("chain.coupling_probability_monotone", worst, 0.0);
    }
    return c.take();
}

// ---------------------------------------------------------------------------

SuiteReport lemma31(const SuiteOptions& o)
{
    Checks c("lemma31");
    const MonteCarlo base = base_budget(o).with_samples(10 * o.replicas);
    const DiagonalModel model = preset_model("gaussian52-small");
    const int n = model.n_modes();
    const Ball ball{Vector::Zero(n), 1.0};
    LevySpec spec;
    spec.rho0 = IndicatorBall{ball.center, ball.radius, 1.0};
    const JumpMeasure nu(spec, model);

    const Vector x = Vector::Zero(n);
    const Vector y = 0.2 * unit(n, 0);
    const double t = 2.0;
    const double eps = 0.5;
    const Observable one = Observable::one();
    const Observable cosine = Observable::coordinate_cosine(n, 0, 1.0);

    const TwoSided same = lemma31_check(nu, x, Vector::Zero(n), t, eps, cosine, ball, base.stream(1), SeedMode::shared);
    c.at_most("zero_shift_exact_gap", std::abs(same.gap()), 0.0);
    const TwoSided flat = lemma31_check(nu, x, y, t, eps, one, ball, base.stream(2));
    c.close("identity_unit_f", flat.lhs.value, flat.rhs.value, flat.pooled_std_err());
    const TwoSided wavy = lemma31_check(nu, x, y, t, eps, cosine, ball, base.stream(3));
    c.close("identity_cosine_f", wavy.lhs.value, wavy.rhs.value, wavy.pooled_std_err());

    // Per-jump weight moments against nu0(B(z0, r0/2)) / lambda0.
    MomentSet<3> w; // xi, xi~, xi~^2
    {
        const MonteCarlo paths = base_budget(o).stream(4);
        w = replicate(paths, MomentSet<3>{}, [&](std::uint64_t, Rng& rng, MomentSet<3>& acc) {
            const JumpPath path = sample_path(nu, t, rng);
            const ShiftWeights sw = shift_weights(nu, y, path, ball);
            for (std::size_t i = 0; i < sw.xi.size(); ++i) {
                acc[0].add(sw.xi[i]);
                acc[1].add(sw.xi_tilde[i]);
                acc[2].add(sw.xi_tilde[i] * sw.xi_tilde[i]);
            }
        });
    }
    LevySpec half;
    half.rho0 = IndicatorBall{ball.center, ball.radius / 2.0, 1.0};
    const MassEstimate half_mass = nu0_mass(half, model, base_budget(o).stream(5));
    const double ratio = half_mass.value / nu.lambda0();
    const double ratio_se = ratio * pooled(half_mass.std_err / half_mass.value, nu.lambda0_std_err() / nu.lambda0());
    c.close("xi_mean_vs_half_ball_mass", w[0].mean(), ratio, pooled(w[0].std_err(), ratio_se));
    c.close("xi_tilde_mean_vs_xi_mean", w[1].mean(), w[0].mean(), pooled(w[1].std_err(), w[0].std_err()));
    const GridSup d1 = delta1(nu, 1.0, ball, 16, base_budget(o).stream(6).with_samples(1u << 15));
    c.at_most("xi_tilde_second_moment_vs_delta1", w[2].mean() - 3.0 * w[2].std_err(), d1.value / nu.lambda0());
    return c.take();
}

// ---------------------------------------------------------------------------

SuiteReport decomposition(const SuiteOptions& o)
{
    Checks c("decomposition");
    const MonteCarlo base = base_budget(o);
    const JumpMeasure nu = preset_measure("gaussian52-small");
    const int n = nu.n_modes();
    const double l0 = nu.lambda0();
    const Vector x = Vector::Zero(n);
    const Vector z0 = unit(n, 0);
    const double t = 2.0;
    const Observable one = Observable::one();
    const Observable cosine = Observable::coordinate_cosine(n, 0, 1.0, 0.3);

    const Decomposition count = decompose_semigroup(nu, one, x, t, base.stream(1));
    c.close("no_jump_probability", count.no_jump.value, std::exp(-l0 * t), count.no_jump.std_err);
    c.close("jump_probability", count.with_jumps.value, -std::expm1(-l0 * t), count.with_jumps.std_err);
    const Decomposition parts = decompose_semigroup(nu, cosine, x, t, base.stream(2));
    c.at_most("parts_sum_to_total", std::abs(parts.no_jump.value + parts.with_jumps.value - parts.total.value), 1e-12);
    const double late = 8.0 / l0;
    c.at_most("no_jump_part_at_l0t_8", decompose_semigroup(nu, one, x, late, base.stream(3)).no_jump.value, 1e-3);

    const WeightedReport flat = p1_weighted(nu, one, x, z0, 0.1, t, base.stream(4));
    c.close("weighted_unit_f", flat.weighted.value, -std::expm1(-l0 * t), flat.weighted.std_err);
    const WeightedReport still = p1_weighted(nu, cosine, x, z0, 0.0, t, base.stream(5), SeedMode::shared);
    c.at_most("zero_eps_weighted_equals_direct", std::abs(still.weighted.value - still.direct.value), 0.0);
    const WeightedReport moved = p1_weighted(nu, cosine, x, z0, 0.1, t, base.stream(6).with_samples(10 * o.replicas));
    c.close("weighted_vs_direct_eps_0.1", moved.weighted.value, moved.direct.value, moved.pooled_std_err());
    return c.take();
}

// ---------------------------------------------------------------------------

SuiteReport gradient(const SuiteOptions& o)
{
    Checks c("gradient");
    const MonteCarlo base = base_budget(o);
    const JumpMeasure nu = preset_measure("gaussian52-small");
    const int n = nu.n_modes();
    const Vector x = Vector::Zero(n);
    const Vector z0 = unit(n, 0);
    const double eps = 0.05;
    const std::vector<double> times{0.5, 1.0, 2.0, 4.0, 8.0};

    c.at_most("gamma_t_bounded_ratio_128_64", gamma_t(nu, 128.0) / gamma_t(nu, 64.0), 1.01);

    // All observables share one stream per time, so their difference
    // quotients see the same paths.
    auto slope = [&](const Observable& f, std::size_t i) {
        return std::abs(p1_difference_quotient(nu, f, x, z0, eps, times[i], base.stream(10 + i)).value);
    };
    const Observable held_out = Observable::coordinate_cosine(n, 0, 1.0, std::numbers::pi / 2.0);
    double constant = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        constant = std::max(constant, slope(held_out, i) / gamma_t(nu, times[i]));
    c.at_most("held_out_constant_finite", constant, std::numeric_limits<double>::max());

    Rng rng(derive_seed(o.seed, 0x9f));
    for (int k = 0; k < 20; ++k) {
        Vector omega(n);
        for (int j = 0; j < n; ++j)
            omega[j] = rng.normal();
        omega *= std::pow(rng.uniform(), 1.0 / n) / omega.norm();
        const Observable f = Observable::cosine(omega, 2.0 * std::numbers::pi * rng.uniform());
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i)
            worst = std::max(worst, slope(f, i) / gamma_t(nu, times[i]));
        c.at_most("slope_over_gamma.f" + std::to_string(k), worst, constant);
    }
    return c.take();
}

using SuiteFn = SuiteReport (*)(const SuiteOptions&);

const std::vector<std::pair<std::string, SuiteFn>>& registry()
{
    static const std::vector<std::pair<std::string, SuiteFn>> suites{
        {"cm", cameron_martin}, {"mecke", mecke},         {"mineka", mineka},
        {"lemma31", lemma31},   {"decomposition", decomposition}, {"gradient", gradient},
    };
    return suites;
}

} // namespace

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : registry())
            out.push_back(name);
        return out;
    }();
    return names;
}

std::vector<SuiteReport> run_suite(std::string_view name, const SuiteOptions& options)
{
    if (options.replicas < min_suite_replicas)
        throw std::invalid_argument("replicas must be at least " + std::to_string(min_suite_replicas));
    std::vector<SuiteReport> out;
    for (const auto& [suite, fn] : registry())
        if (name == "all" || name == suite)
            out.push_back(fn(options));
    if (out.empty())
        throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
    return out;
}

} // namespace oulevy
