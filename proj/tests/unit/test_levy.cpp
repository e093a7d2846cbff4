#include "oulevy/levy.hpp"
#include "oulevy/parallel.hpp"
#include "oulevy/stats.hpp"
#include "oulevy/tvlab.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

using namespace oulevy;

namespace {

Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

LevySpec spec_of(DensityFamily rho0, double eta = 0.0)
{
    LevySpec s;
    s.rho0 = std::move(rho0);
    s.eta = eta;
    return s;
}

// Composite Simpson rule on [a, b] with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000)
{
    const double h = (b - a) / panels;
    double sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i)
        sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// sup_x |F_n(x) - F(x)| for a sample and a continuous CDF.
double kolmogorov(std::vector<double> xs, const std::function<double(double)>& cdf)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, std::abs((i + 1) / n - f), std::abs(i / n - f)});
    }
    return d;
}

std::vector<double> first_coordinate(const std::vector<Vector>& v)
{
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v)
        out.push_back(x[0]);
    return out;
}

} // namespace

// ===========================================================================
// Jump measures and their mass
// ===========================================================================

TEST(Nu0Mass, ConstantIsExact)
{
    const auto m = nu0_mass(spec_of(Constant{2.5}), make_gaussian_model(3, 1.0, 2.0), MonteCarlo{1, 1000, 1});
    EXPECT_FALSE(m.infinite);
    EXPECT_EQ(m.value, 2.5);
    EXPECT_EQ(m.std_err, 0.0);
}

TEST(Nu0Mass, IndicatorBallMatchesNormalCdf)
{
    DiagonalModel model(vec({1.0}), vec({1.0}));
    const auto m = nu0_mass(spec_of(IndicatorBall{vec({0.0}), 1.0, 1.0}), model, MonteCarlo{7, 1000000, 1});
    const double oracle = std::erf(1.0 / std::sqrt(2.0)); // 2 Phi(1) - 1
    EXPECT_NEAR(oracle, 0.68269, 1e-5);
    EXPECT_LE(std::abs(m.value - oracle), 3.0 * m.std_err);
    EXPECT_GT(m.std_err, 0.0);
}

TEST(Nu0Mass, StableLikeInfiniteWithoutTruncation)
{
    const auto model = make_gaussian_model(4, 1.0, 2.0);
    const auto untruncated = nu0_mass(spec_of(StableLike{0.5, 1.0}), model, MonteCarlo{1, 10000, 1});
    EXPECT_TRUE(untruncated.infinite);
    EXPECT_THROW(JumpMeasure(spec_of(StableLike{0.5, 1.0}), model), std::invalid_argument);

    const auto coarse = nu0_mass(spec_of(StableLike{0.5, 1.0}, 0.4), model, MonteCarlo{1, 200000, 1});
    const auto fine = nu0_mass(spec_of(StableLike{0.5, 1.0}, 0.2), model, MonteCarlo{1, 200000, 1});
    EXPECT_FALSE(coarse.infinite);
    EXPECT_GT(coarse.value, 0.0);
    EXPECT_GT(fine.value, coarse.value); // more small jumps kept
}

TEST(JumpMeasure, RejectsInvalidSpecs)
{
    const auto model = make_gaussian_model(2, 1.0, 2.0);
    EXPECT_THROW(JumpMeasure(spec_of(Constant{0.0}), model), std::invalid_argument);
    EXPECT_THROW(JumpMeasure(spec_of(Constant{1.0}, -1.0), model), std::invalid_argument);
    EXPECT_THROW(JumpMeasure(spec_of(StableLike{2.5, 1.0}, 0.1), model), std::invalid_argument);
    EXPECT_THROW(JumpMeasure(spec_of(BoundedLipschitz{1.0, 0.0}), model), std::invalid_argument);
}

TEST(JumpMeasure, LooseEnvelopeIsDiagnosed)
{
    // A tiny ball far in the tail: almost every reference proposal is rejected.
    DiagonalModel model(vec({1.0, 1.0}), vec({1.0, 1.0}));
    try {
        JumpMeasure(spec_of(IndicatorBall{vec({2.5, 2.5}), 0.3, 1.0}), model);
        FAIL() << "expected the acceptance-rate diagnostic";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("acceptance rate"), std::string::npos);
    }
}

TEST(JumpMeasure, InfimumOnBall)
{
    const auto model = make_gaussian_model(2, 1.0, 2.0);
    const JumpMeasure ball(spec_of(IndicatorBall{vec({0.0, 0.0}), 1.0, 2.0}), model);
    EXPECT_EQ(ball.infimum_on_ball({vec({0.0, 0.0}), 0.5}), 2.0);
    EXPECT_EQ(ball.infimum_on_ball({vec({0.0, 0.0}), 2.0}), 0.0);
    const JumpMeasure lip(spec_of(BoundedLipschitz{1.0, 1.0}), model);
    EXPECT_NEAR(lip.infimum_on_ball({vec({0.0, 0.0}), 3.0}), 0.25, 1e-15);
}

// ===========================================================================
// Jump sampling
// ===========================================================================

TEST(SampleJump, ConstantDensityReproducesReferenceMeasure)
{
    const auto model = make_gaussian_model(3, 1.0, 2.0);
    const JumpMeasure nu(spec_of(Constant{1.0}), model);
    const MonteCarlo mc{3, 100000, 1};
    const auto jumps = generate<Vector>(mc, [&](std::uint64_t, Rng& rng) { return sample_jump(nu, rng); });
    const auto direct = generate<Vector>(mc.stream(1), [&](std::uint64_t, Rng& rng) { return gaussian_sample(model, rng); });
    // Three pooled-quantile bins keep the two-sample noise floor well below 0.01.
    const std::vector<Vector> axis{vec({1.0, 0.0, 0.0})};
    EXPECT_LT(tv_binned(jumps, direct, axis, 3, 5).value, 0.01);
    for (int k = 0; k < 3; ++k) {
        Moments s;
        for (const auto& z : jumps)
            s.add(z[k]);
        EXPECT_NEAR(s.variance(), 1.0 / model.q()[k], 0.02 / model.q()[k]) << k;
    }
}

TEST(SampleJump, IndicatorBallIsTruncatedNormal)
{
    DiagonalModel model(vec({1.0}), vec({1.0}));
    const JumpMeasure nu(spec_of(IndicatorBall{vec({0.0}), 1.0, 1.0}), model);
    const auto jumps = generate<Vector>(MonteCarlo{9, 100000, 1}, [&](std::uint64_t, Rng& rng) {
        return sample_jump(nu, rng);
    });
    for (const auto& z : jumps)
        ASSERT_LT(std::abs(z[0]), 1.0);
    const double mass = normal_cdf(1.0) - normal_cdf(-1.0);
    const double ks = kolmogorov(first_coordinate(jumps), [&](double x) {
        return (normal_cdf(std::clamp(x, -1.0, 1.0)) - normal_cdf(-1.0)) / mass;
    });
    EXPECT_LT(ks, 0.01);
}

TEST(SampleJump, BoundedLipschitzPullsMassTowardOrigin)
{
    DiagonalModel model(vec({1.0}), vec({1.0}));
    const double c = 1.0, scale = 0.5;
    const JumpMeasure nu(spec_of(BoundedLipschitz{c, scale}), model);
    const MonteCarlo mc{13, 200000, 1};
    const Moments jumped = replicate(mc, Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
        acc.add(std::abs(sample_jump(nu, rng)[0]));
    });
    // Quadrature oracle: int |z| rho dmu / int rho dmu.
    auto rho = [&](double z) { return c / (1.0 + std::abs(z) / scale); };
    const double num = simpson([&](double z) { return std::abs(z) * rho(z) * normal_pdf(z); }, -12.0, 12.0);
    const double den = simpson([&](double z) { return rho(z) * normal_pdf(z); }, -12.0, 12.0);
    EXPECT_LE(std::abs(jumped.mean() - num / den), 3.0 * jumped.std_err());
    EXPECT_LT(num / den, std::sqrt(2.0 / M_PI)); // E|z| under the reference measure
    EXPECT_LT(jumped.mean() + 3.0 * jumped.std_err(), std::sqrt(2.0 / M_PI));
    EXPECT_LE(std::abs(nu.lambda0() - den), 3.0 * nu.lambda0_std_err());
}

TEST(SampleJump, StableLikeRespectsTruncation)
{
    const auto model = make_gaussian_model(3, 1.0, 2.0);
    const JumpMeasure nu(spec_of(StableLike{0.8, 1.5}, 0.3), model);
    Rng rng(4);
    for (int i = 0; i < 2000; ++i) {
        const double r = sample_jump(nu, rng).norm();
        ASSERT_GE(r, 0.3);
        ASSERT_LT(r, 1.5);
    }
}

// ===========================================================================
// Paths
// ===========================================================================

TEST(SamplePath, PoissonCountAndZeroClass)
{
    const auto model = make_gaussian_model(4, 1.0, 2.0);
    const JumpMeasure nu(spec_of(BoundedLipschitz{1.0, 1.0}), model);
    const double t = 1.5;
    const auto s = replicate(MonteCarlo{21, 100000, 1}, MomentSet<2>{}, [&](std::uint64_t, Rng& rng, MomentSet<2>& acc) {
        const JumpPath path = sample_path(nu, t, rng);
        acc[0].add(static_cast<double>(path.count()));
        acc[1].add(path.count() == 0 ? 1.0 : 0.0);
        for (std::size_t i = 0; i < path.count(); ++i) {
            ASSERT_GT(path.jumps[i].time, 0.0);
            ASSERT_LE(path.jumps[i].time, t);
            if (i > 0)
                ASSERT_GT(path.jumps[i].time, path.jumps[i - 1].time);
        }
    });
    const double mean = nu.lambda0() * t;
    // lambda0 itself is a Monte Carlo estimate here; pool its error in.
    EXPECT_LE(std::abs(s[0].mean() - mean), 3.0 * pooled(s[0].std_err(), t * nu.lambda0_std_err()));
    const double p0 = std::exp(-mean);
    EXPECT_LE(std::abs(s[1].mean() - p0), 3.0 * pooled(s[1].std_err(), p0 * t * nu.lambda0_std_err()));
}

TEST(SamplePath, InterJumpGapsAreExponential)
{
    DiagonalModel model(vec({1.0}), vec({1.0}));
    const JumpMeasure nu(spec_of(Constant{2.0}), model);
    Rng rng(99);
    const JumpPath path = sample_path(nu, 50000.0, rng);
    ASSERT_GT(path.count(), 90000u);
    std::vector<double> gaps;
    double prev = 0.0;
    for (const auto& j : path.jumps) {
        gaps.push_back(j.time - prev);
        prev = j.time;
    }
    const double ks = kolmogorov(gaps, [](double g) { return -std::expm1(-2.0 * g); });
    EXPECT_LT(ks, 0.01);
}

TEST(SamplePath, RejectsNonPositiveHorizon)
{
    const JumpMeasure nu(spec_of(Constant{1.0}), make_gaussian_model(1, 1.0, 2.0));
    Rng rng(1);
    EXPECT_THROW(sample_path(nu, 0.0, rng), std::invalid_argument);
}

// ===========================================================================
// Mild solution
// ===========================================================================

TEST(MildSolution, EmptyPathIsSemigroup)
{
    DiagonalModel model(vec({1.0, 2.0}), vec({1.0, 3.0}));
    JumpPath path;
    path.horizon = 0.7;
    EXPECT_EQ(mild_solution(model, vec({1.0, -2.0}), path), semigroup_apply(model, 0.7, vec({1.0, -2.0})));
}

TEST(MildSolution, SingleJump)
{
    DiagonalModel model(vec({1.0}), vec({1.0}));
    JumpPath path;
    path.horizon = 2.0;
    path.jumps.push_back({1.0, vec({1.0})});
    const double x = mild_solution(model, vec({1.0}), path)[0];
    EXPECT_NEAR(x, 0.503215, 1e-6);
    EXPECT_NEAR(x, std::exp(-2.0) + std::exp(-1.0), 1e-15);
    EXPECT_THROW(mild_solution(model, vec({1.0, 0.0}), path), std::invalid_argument);
}

TEST(MildSolution, AffineInInitialState)
{
    const auto model = make_gaussian_model(5, 1.0, 2.0);
    const JumpMeasure nu(spec_of(Constant{1.0}), model);
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        const JumpPath path = sample_path(nu, 3.0, rng);
        const Vector x = gaussian_sample(model, rng) * 3.0;
        const Vector diff = mild_solution(model, x, path) - mild_solution(model, Vector::Zero(5), path);
        EXPECT_LE((diff - semigroup_apply(model, 3.0, x)).norm(), 1e-12 * std::max(1.0, x.norm()));
    }
}

TEST(MildSolution, CharacteristicFunctionMatchesCompoundPoissonFormula)
{
    // Constant density: jumps are N(0, 1/q_k) per coordinate, so
    // E cos(u X_k) = exp(l0 int_0^t (exp(-u^2 s_k^2 e^{-2 lam_k r} / (2 q_k)) - 1) dr), E sin(u X_k) = 0.
    DiagonalModel model(vec({1.0, 4.0}), vec({0.5, 2.0}), vec({1.0, -1.5}));
    const double l0 = 1.5, t = 2.0;
    const JumpMeasure nu(spec_of(Constant{l0}), model);
    const auto ends = generate<Vector>(MonteCarlo{31, 200000, 1}, [&](std::uint64_t, Rng& rng) {
        return mild_solution(model, Vector::Zero(2), sample_path(nu, t, rng));
    });
    for (int k = 0; k < 2; ++k) {
        for (int j = 1; j <= 10; ++j) {
            const double u = 0.4 * j;
            const double s2 = model.sigma()[k] * model.sigma()[k];
            const double exponent = simpson(
                [&](double r) {
                    return std::exp(-u * u * s2 * std::exp(-2.0 * model.lam()[k] * r) / (2.0 * model.q()[k])) - 1.0;
                },
                0.0, t, 2000);
            const double oracle = std::exp(l0 * exponent);
            Moments c, s;
            for (const auto& x : ends) {
                c.add(std::cos(u * x[k]));
                s.add(std::sin(u * x[k]));
            }
            EXPECT_LE(std::abs(c.mean() - oracle), 3.0 * c.std_err()) << "k=" << k << " u=" << u;
            EXPECT_LE(std::abs(s.mean()), 3.0 * s.std_err()) << "k=" << k << " u=" << u;
        }
    }
}

TEST(MildSolution, LawFromXIsTranslateOfLawFromZero)
{
    const auto model = make_gaussian_model(4, 1.0, 2.0);
    const JumpMeasure nu(spec_of(BoundedLipschitz{1.0, 1.0}), model);
    const Vector x = vec({1.0, -0.5, 0.25, 2.0});
    const double t = 0.8;
    const MonteCarlo mc{41, 100000, 1};
    const Vector tx = semigroup_apply(model, t, x);
    const auto from_x = generate<Vector>(mc, [&](std::uint64_t, Rng& rng) {
        return Vector(mild_solution(model, x, sample_path(nu, t, rng)) - tx);
    });
    const auto from_zero = generate<Vector>(mc.stream(1), [&](std::uint64_t, Rng& rng) {
        return mild_solution(model, Vector::Zero(4), sample_path(nu, t, rng));
    });
    const std::vector<Vector> axis{vec({1.0, 0.0, 0.0, 0.0})};
    EXPECT_LT(tv_binned(from_x, from_zero, axis, 10, 3).value, 0.02);
}

TEST(MildSolution, ThinningAgreesWithCoarserTruncation)
{
    // Dropping jumps below eta' from an eta-truncated path has the law of
    // simulating at eta' directly.
    const auto model = make_gaussian_model(4, 1.0, 2.0);
    const double coarse_eta = 1.0;
    const JumpMeasure fine(spec_of(BoundedLipschitz{1.0, 1.0}, 0.0), model);
    const JumpMeasure coarse(spec_of(BoundedLipschitz{1.0, 1.0}, coarse_eta), model);
    const double t = 1.5;
    const MonteCarlo mc{51, 100000, 1};
    const auto thinned = generate<Vector>(mc, [&](std::uint64_t, Rng& rng) {
        JumpPath path = sample_path(fine, t, rng);
        std::erase_if(path.jumps, [&](const Jump& j) { return j.size.norm() < coarse_eta; });
        return mild_solution(model, Vector::Zero(4), path);
    });
    const auto direct = generate<Vector>(mc.stream(1), [&](std::uint64_t, Rng& rng) {
        return mild_solution(model, Vector::Zero(4), sample_path(coarse, t, rng));
    });
    const std::vector<Vector> axis{vec({1.0, 0.0, 0.0, 0.0})};
    EXPECT_LT(tv_binned(thinned, direct, axis, 10, 4).value, 0.02);
}

// ===========================================================================
// Mecke identity
// ===========================================================================

TEST(Mecke, UnitFunctionCountsJumps)
{
    const JumpMeasure nu(spec_of(Constant{1.3}), make_gaussian_model(3, 1.0, 2.0));
    const auto r = mecke_identity_check(nu, 2.0, {MeckeKind::unit, 1.0}, MonteCarlo{61, 200000, 1});
    EXPECT_DOUBLE_EQ(r.lhs.value, 1.3 * 2.0);
    EXPECT_EQ(r.lhs.std_err, 0.0);
    EXPECT_LE(std::abs(r.gap()), 3.0 * r.pooled_std_err());
}

TEST(Mecke, SmallJumpsMatchMassOfBall)
{
    const auto model = make_gaussian_model(3, 1.0, 2.0);
    const JumpMeasure nu(spec_of(BoundedLipschitz{1.0, 1.0}), model);
    const double t = 1.5, r0 = 0.8;
    const auto r = mecke_identity_check(nu, t, {MeckeKind::small_jump, r0}, MonteCarlo{62, 200000, 1});
    EXPECT_LE(std::abs(r.gap()), 3.0 * r.pooled_std_err());
    // lhs = t nu0(B(0, r0)), independently via the mass of rho0 restricted to the ball.
    const Moments ball = replicate(MonteCarlo{63, 200000, 1}, Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
        const Vector z = gaussian_sample(model, rng);
        acc.add(z.norm() < r0 ? t * nu.density(z) : 0.0);
    });
    EXPECT_LE(std::abs(r.lhs.value - ball.mean()), 3.0 * pooled(r.lhs.std_err, ball.std_err()));
}

TEST(Mecke, EndpointFunctional)
{
    const JumpMeasure nu(spec_of(BoundedLipschitz{2.0, 0.5}), make_gaussian_model(3, 1.0, 2.0));
    const auto r = mecke_identity_check(nu, 2.0, {MeckeKind::endpoint_cosine, 1.0}, MonteCarlo{64, 200000, 1});
    EXPECT_LE(std::abs(r.gap()), 3.0 * r.pooled_std_err());
    EXPECT_GT(std::abs(r.lhs.value), 10.0 * r.lhs.std_err); // not trivially zero
}
