#include "oulevy/coupling.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace oulevy {

namespace {

constexpr double log_weight_cap = 30.0;

// log of the density of n(. - a) with respect to n at z, i.e.
// log[rho(z - a) phi_a(z) / rho(z)]; -inf where the shifted law vanishes.
double log_shift_ratio(const JumpMeasure& nu, const Vector& a, const Vector& z, double rho_z)
{
    const double shifted = nu.density(z - a);
    if (shifted <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return std::log(shifted) - std::log(rho_z) + log_cm_density(nu.model(), a, z);
}

double clipped_ratio(double log_ratio) { return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio); }

Vector random_direction(int n, Rng& rng)
{
    Vector d(n);
    do {
        for (int k = 0; k < n; ++k)
            d[k] = rng.normal();
    } while (d.norm() == 0.0);
    return d / d.norm();
}

} // namespace

Vector shift_vector(const DiagonalModel& model, double s, const Vector& x, const Vector& y)
{
    model.check_dim(x, "x");
    model.check_dim(y, "y");
    return sigma_solve(model, semigroup_apply(model, s, x - y));
}

OverlapReport overlap_mass(const JumpMeasure& nu, const Vector& a, const MonteCarlo& mc)
{
    nu.model().check_dim(a, "shift");
    const Moments m = replicate(mc, Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
        const Vector z = sample_jump(nu, rng);
        acc.add(clipped_ratio(log_shift_ratio(nu, a, z, nu.density(z))));
    });
    return {a, m.mean(), m.std_err()};
}

std::vector<double> log_grid(double lo, double hi, std::size_t points)
{
    if (!(lo > 0.0) || !(hi >= lo) || points == 0)
        throw std::invalid_argument("log grid needs 0 < lo <= hi and at least one point");
    if (points == 1 || hi == lo)
        return {lo};
    std::vector<double> grid(points);
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = lo * std::exp(step * static_cast<double>(i));
    grid.back() = hi;
    return grid;
}

std::vector<double> default_time_grid(const DiagonalModel& model, double eps)
{
    if (!(eps > 0.0))
        throw std::invalid_argument("grid needs eps > 0");
    const double slowest = model.min_lam();
    if (slowest <= 0.0)
        return {eps};
    return log_grid(eps, std::max(eps, 64.0 / slowest), 32);
}

GammaReport gamma_functional(const JumpMeasure& nu, double rho_bound, double eps, std::span<const double> t_grid,
                             std::size_t direction_budget, const MonteCarlo& mc)
{
    if (!(eps > 0.0) || !(rho_bound > 0.0))
        throw std::invalid_argument("gamma functional needs eps > 0 and rho > 0");
    if (direction_budget == 0)
        throw std::invalid_argument("gamma functional needs at least one direction");
    GammaReport report;
    for (double t : t_grid)
        if (t >= eps)
            report.t_grid.push_back(t);
    if (report.t_grid.empty())
        throw std::invalid_argument("time grid has no point t >= eps");
    report.directions = direction_budget;

    const DiagonalModel& model = nu.model();
    const int n = model.n_modes();
    const Vector origin = Vector::Zero(n);
    std::vector<Vector> dirs;
    Rng dir_rng(derive_seed(mc.seed, 0xd1ec7105ULL));
    for (std::size_t j = 0; j < direction_budget; ++j)
        dirs.push_back(rho_bound * random_direction(n, dir_rng));

    const auto jumps = generate<Vector>(mc, [&](std::uint64_t, Rng& rng) { return sample_jump(nu, rng); });
    std::vector<double> rho(jumps.size());
    for (std::size_t i = 0; i < jumps.size(); ++i)
        rho[i] = nu.density(jumps[i]);

    double best = 1.0;
    report.binding_t = report.t_grid.front();
    report.binding_x = dirs.front();
    for (double t : report.t_grid) {
        for (const auto& x : dirs) {
            const Vector a = shift_vector(model, t, x, origin);
            double total = 0.0;
            for (std::size_t i = 0; i < jumps.size(); ++i)
                total += clipped_ratio(log_shift_ratio(nu, a, jumps[i], rho[i]));
            const double overlap = total / static_cast<double>(jumps.size());
            if (overlap < best) {
                best = overlap;
                report.binding_t = t;
                report.binding_x = x;
            }
        }
    }
    report.value = nu.lambda0() * best;
    return report;
}

MinekaPair sample_mineka_pair(const JumpMeasure& nu, const Vector& a, Rng& rng)
{
    MinekaPair pair;
    pair.u = sample_jump(nu, rng);
    if (a.isZero(0.0)) {
        pair.u_prime = pair.u;
        return pair;
    }
    const double rho_u = nu.density(pair.u);
    const double up = 0.5 * clipped_ratio(log_shift_ratio(nu, -a, pair.u, rho_u));
    const double down = 0.5 * clipped_ratio(log_shift_ratio(nu, a, pair.u, rho_u));
    const double u = rng.uniform();
    if (u < up) {
        pair.step = Step::plus;
        pair.u_prime = pair.u + a;
    } else if (u < up + down) {
        pair.step = Step::minus;
        pair.u_prime = pair.u - a;
    } else {
        pair.u_prime = pair.u;
    }
    return pair;
}

CouplingTranscript run_mineka_coupling(const JumpMeasure& nu, const Vector& x, const Vector& y, double t, Rng& rng)
{
    const DiagonalModel& model = nu.model();
    model.check_dim(x, "x");
    model.check_dim(y, "y");
    const JumpPath clock = sample_path(nu, t, rng);

    CouplingTranscript tr;
    const int n = model.n_modes();
    Vector s = Vector::Zero(n);
    Vector s_prime = Vector::Zero(n);
    // S' - S = level * T_t(x - y); the chains meet at level 1.
    long level = 0;
    if (x == y)
        tr.coupled_at = 0;

    for (const auto& jump : clock.jumps) {
        const double tau = jump.time;
        tr.jump_times.push_back(tau);
        const Vector a = shift_vector(model, tau, x, y);
        tr.shifts.push_back(a);
        MinekaPair pair;
        if (tr.coupled()) {
            pair.u = sample_jump(nu, rng);
            pair.u_prime = pair.u;
        } else {
            pair = sample_mineka_pair(nu, a, rng);
            level += static_cast<int>(pair.step);
        }
        s += semigroup_apply(model, t - tau, sigma_apply(model, pair.u));
        s_prime += semigroup_apply(model, t - tau, sigma_apply(model, pair.u_prime));
        tr.pairs.push_back(std::move(pair));
        tr.walk.push_back(s);
        tr.walk_prime.push_back(s_prime);
        if (!tr.coupled() && level == 1)
            tr.coupled_at = tr.pairs.size();
    }
    tr.end_x = semigroup_apply(model, t, x) + s;
    tr.end_y = semigroup_apply(model, t, y) + s_prime;
    return tr;
}

ShiftTooLarge::ShiftTooLarge(double s, double lhs, double limit)
    : std::invalid_argument([&] {
          std::ostringstream msg;
          msg << "shift condition violated at s=" << s << ": |sigma^-1 T_s y| + |y| = " << lhs << " > " << limit;
          return msg.str();
      }()),
      s_(s)
{
}

void check_shift_condition(const DiagonalModel& model, const Vector& y, double t, const Ball& ball)
{
    model.check_dim(y, "y");
    const double limit = std::min(1.0, 0.5 * ball.radius);
    // |sigma^-1 T_s y| is non-increasing in s, so s = 0 is the binding time
    // whenever the condition fails somewhere on [0, t].
    const double s = 0.0;
    (void)t;
    const double lhs = sigma_solve(model, semigroup_apply(model, s, y)).norm() + y.norm();
    if (lhs > limit)
        throw ShiftTooLarge(s, lhs, limit);
}

ShiftWeights shift_weights(const JumpMeasure& nu, const Vector& y, const JumpPath& path, const Ball& ball)
{
    const DiagonalModel& model = nu.model();
    model.check_dim(ball.center, "ball center");
    check_shift_condition(model, y, path.horizon, ball);
    const double half = 0.5 * ball.radius;

    ShiftWeights w;
    for (std::size_t i = 0; i < path.jumps.size(); ++i) {
        const auto& jump = path.jumps[i];
        if (!(jump.time > 1.0))
            continue;
        const Vector& z = jump.size;
        const Vector b = sigma_solve(model, semigroup_apply(model, jump.time, y));
        w.jump_index.push_back(i);
        w.xi.push_back((z - ball.center).norm() < half ? 1.0 : 0.0);

        double tilde = 0.0;
        if ((z + b - ball.center).norm() < half) {
            const double shifted = nu.density(z + b);
            if (shifted > 0.0)
                tilde = std::exp(std::log(shifted) - std::log(nu.density(z)) + log_cm_density(model, -b, z));
        }
        w.xi_tilde.push_back(tilde);
    }
    return w;
}

TwoSided lemma31_check(const JumpMeasure& nu, const Vector& x, const Vector& y, double t, double eps, const Observable& f,
                       const Ball& ball, const MonteCarlo& mc, SeedMode mode)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("lemma check needs eps in (0, 1)");
    if (!(t >= 2.0))
        throw std::invalid_argument("lemma check needs t >= 2");
    const DiagonalModel& model = nu.model();
    check_shift_condition(model, y, t, ball);
    const Vector shifted_start = x + y;

    auto side = [&](const MonteCarlo& stream, bool shifted) {
        return replicate(stream, Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
            const JumpPath path = sample_path(nu, t, rng);
            if (!path.jumps.empty() && !(path.jumps.front().time > eps)) {
                acc.add(0.0);
                return;
            }
            const ShiftWeights w = shift_weights(nu, y, path, ball);
            double total = 0.0;
            for (double v : shifted ? w.xi_tilde : w.xi)
                total += v;
            const double fx = total == 0.0 ? 0.0 : f(mild_solution(model, shifted ? shifted_start : x, path));
            acc.add(fx * total);
        });
    };
    const MonteCarlo lhs_stream = mc.stream(1);
    const MonteCarlo rhs_stream = mode == SeedMode::shared ? lhs_stream : mc.stream(2);
    return {side(lhs_stream, false).estimate(), side(rhs_stream, true).estimate()};
}

Decomposition decompose_semigroup(const JumpMeasure& nu, const Observable& f, const Vector& x, double t,
                                  const MonteCarlo& mc)
{
    nu.model().check_dim(x, "x");
    const auto m = replicate(mc, MomentSet<3>{}, [&](std::uint64_t, Rng& rng, MomentSet<3>& acc) {
        const JumpPath path = sample_path(nu, t, rng);
        const double fx = f(mild_solution(nu.model(), x, path));
        const bool quiet = path.jumps.empty();
        acc[0].add(quiet ? fx : 0.0);
        acc[1].add(quiet ? 0.0 : fx);
        acc[2].add(fx);
    });
    return {m[0].estimate(), m[1].estimate(), m[2].estimate()};
}

WeightedReport p1_weighted(const JumpMeasure& nu, const Observable& f, const Vector& x, const Vector& z0, double eps,
                           double t, const MonteCarlo& mc, SeedMode mode)
{
    const DiagonalModel& model = nu.model();
    model.check_dim(x, "x");
    model.check_dim(z0, "z0");
    if (!(eps >= 0.0))
        throw std::invalid_argument("eps must be non-negative");

    struct Acc {
        Moments m;
        std::uint64_t aborted = 0;
        void merge(const Acc& o)
        {
            m.merge(o.m);
            aborted += o.aborted;
        }
    };

    const MonteCarlo weighted_stream = mc.stream(1);
    const Acc weighted = replicate(weighted_stream, Acc{}, [&](std::uint64_t, Rng& rng, Acc& acc) {
        const JumpPath path = sample_path(nu, t, rng);
        if (path.jumps.empty()) {
            acc.m.add(0.0);
            return;
        }
        double total = 0.0;
        for (const auto& jump : path.jumps) {
            const Vector b = eps * sigma_solve(model, semigroup_apply(model, jump.time, z0));
            const double rho = nu.density(jump.size);
            const double log_w = log_shift_ratio(nu, b, jump.size, rho);
            if (log_w > log_weight_cap) {
                ++acc.aborted;
                return;
            }
            total += std::exp(log_w);
        }
        const double weight = total / static_cast<double>(path.jumps.size());
        acc.m.add(weight == 0.0 ? 0.0 : f(mild_solution(model, x, path)) * weight);
    });

    const Vector moved = x + eps * z0;
    const MonteCarlo direct_stream = mode == SeedMode::shared ? weighted_stream : mc.stream(2);
    const Moments direct = replicate(direct_stream, Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
        const JumpPath path = sample_path(nu, t, rng);
        acc.add(path.jumps.empty() ? 0.0 : f(mild_solution(model, moved, path)));
    });

    return {weighted.m.estimate(), direct.estimate(), weighted.aborted};
}

Estimate p1_difference_quotient(const JumpMeasure& nu, const Observable& f, const Vector& x, const Vector& z0,
                                double eps, double t, const MonteCarlo& mc)
{
    const DiagonalModel& model = nu.model();
    model.check_dim(x, "x");
    model.check_dim(z0, "z0");
    if (!(eps > 0.0))
        throw std::invalid_argument("difference quotient needs eps > 0");
    const Vector offset = eps * semigroup_apply(model, t, z0);
    const Moments m = replicate(mc, Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
        const JumpPath path = sample_path(nu, t, rng);
        if (path.jumps.empty()) {
            acc.add(0.0);
            return;
        }
        const Vector end = mild_solution(model, x, path);
        acc.add((f(end + offset) - f(end)) / eps);
    });
    return m.estimate();
}

double gamma_t(const DiagonalModel& model, double lambda0, double t)
{
    if (!(t > 0.0))
        throw std::invalid_argument("gamma_t needs t > 0");
    if (!(lambda0 > 0.0))
        throw std::invalid_argument("gamma_t needs lambda0 > 0");
    const int n = model.n_modes();
    const Vector weight = (model.q().array() / model.sigma().array().abs()).matrix();
    auto envelope = [&](double r) {
        double best = 0.0;
        for (int k = 0; k < n; ++k)
            best = std::max(best, weight[k] * std::exp(-model.lam()[k] * r));
        return std::exp(-lambda0 * r) * best;
    };

    // Split at the crossing times of the mode envelopes so that every piece
    // is smooth.
    std::vector<double> cuts{0.0, t};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double dl = model.lam()[i] - model.lam()[j];
            if (dl == 0.0)
                continue;
            const double r = std::log(weight[i] / weight[j]) / dl;
            if (r > 0.0 && r < t)
                cuts.push_back(r);
        }
    std::sort(cuts.begin(), cuts.end());

    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i])
            continue;
        integral += Quadrature::integrate(envelope, cuts[i], cuts[i + 1], 15, 1e-11);
    }
    return integral / -std::expm1(-lambda0 * t);
}

double gamma_t(const JumpMeasure& nu, double t) { return gamma_t(nu.model(), nu.lambda0(), t); }

} // namespace oulevy
