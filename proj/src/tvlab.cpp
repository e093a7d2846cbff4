#include "oulevy/tvlab.hpp"

#include "oulevy/coupling.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace oulevy {

namespace {

using Bins = std::vector<std::uint32_t>;

std::vector<double> quantile_edges(std::vector<double> pooled, std::size_t bins)
{
    std::sort(pooled.begin(), pooled.end());
    std::vector<double> edges;
    edges.reserve(bins);
    const std::size_t n = pooled.size();
    // Midpoints between neighbouring order statistics, so that no edge sits
    // on a sample and tiny translations do not flip samples across edges.
    for (std::size_t k = 1; k < bins; ++k) {
        const std::size_t i = std::clamp<std::size_t>(k * n / bins, 1, n - 1);
        edges.push_back(std::midpoint(pooled[i - 1], pooled[i]));
    }
    return edges;
}

std::uint32_t bin_of(const std::vector<double>& edges, double v)
{
    return static_cast<std::uint32_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
}

double distance(const std::vector<double>& cp, const std::vector<double>& cq, double np, double nq)
{
    double total = 0.0;
    for (std::size_t c = 0; c < cp.size(); ++c)
        total += std::abs(cp[c] / np - cq[c] / nq);
    return total;
}

// Histogram distance of two binned samples. With `paired`, p[i] and q[i]
// come from the same draw and are resampled together.
TvEstimate histogram_distance(const Bins& p, const Bins& q, std::size_t cells, bool paired, std::uint64_t seed)
{
    const double np = static_cast<double>(p.size());
    const double nq = static_cast<double>(q.size());
    std::vector<double> cp(cells, 0.0), cq(cells, 0.0);
    for (auto b : p)
        cp[b] += 1.0;
    for (auto b : q)
        cq[b] += 1.0;

    TvEstimate est;
    est.value = distance(cp, cq, np, nq);
    est.n_samples = std::min(p.size(), q.size());
    est.n_bins = cells;

    auto draw = [](Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)); };
    Moments boot;
    for (std::size_t b = 0; b < bootstrap_resamples; ++b) {
        Rng rng = Rng::for_replica(seed, b);
        std::fill(cp.begin(), cp.end(), 0.0);
        std::fill(cq.begin(), cq.end(), 0.0);
        if (paired) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                const std::size_t j = draw(rng, p.size());
                cp[p[j]] += 1.0;
                cq[q[j]] += 1.0;
            }
        } else {
            for (std::size_t i = 0; i < p.size(); ++i)
                cp[p[draw(rng, p.size())]] += 1.0;
            for (std::size_t i = 0; i < q.size(); ++i)
                cq[q[draw(rng, q.size())]] += 1.0;
        }
        boot.add(distance(cp, cq, np, nq));
    }
    est.std_err = std::sqrt(boot.variance());
    return est;
}

void require_samples(std::size_t np, std::size_t nq)
{
    if (np < min_tv_samples || nq < min_tv_samples)
        throw std::invalid_argument("total variation estimate needs at least 1000 samples per side");
}

std::vector<double> project(std::span<const Vector> samples, const Vector& axis)
{
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].size() != axis.size())
            throw std::invalid_argument("sample and projection axis dimensions differ");
        out[i] = samples[i].dot(axis);
    }
    return out;
}

template <class Integrand>
GridSup grid_supremum(const JumpMeasure& nu, double eps, const Ball& ball, std::span<const double> s_grid,
                      std::size_t x_budget, const MonteCarlo& mc, Integrand&& integrand)
{
    if (!(eps > 0.0))
        throw std::invalid_argument("grid supremum needs eps > 0");
    if (x_budget == 0)
        throw std::invalid_argument("grid supremum needs at least one direction");
    const DiagonalModel& model = nu.model();
    model.check_dim(ball.center, "ball center");
    if (!(nu.infimum_on_ball(ball) > 0.0))
        throw std::invalid_argument("jump density vanishes somewhere on the ball");

    GridSup out;
    for (double s : s_grid)
        if (s >= eps)
            out.s_grid.push_back(s);
    if (out.s_grid.empty())
        throw std::invalid_argument("grid has no point s >= eps");

    const int n = model.n_modes();
    std::vector<Vector> dirs;
    Rng dir_rng(derive_seed(mc.seed, 0xd1ec7105ULL));
    for (std::size_t j = 0; j < x_budget; ++j) {
        Vector d(n);
        do {
            for (int k = 0; k < n; ++k)
                d[k] = dir_rng.normal();
        } while (d.norm() == 0.0);
        dirs.push_back(d / d.norm());
    }

    const auto draws = generate<Vector>(mc, [&](std::uint64_t, Rng& rng) { return gaussian_sample(model, rng); });
    std::vector<Vector> inside;
    std::vector<double> rho;
    for (const auto& z : draws)
        if ((z - ball.center).norm() < ball.radius) {
            inside.push_back(z);
            rho.push_back(nu.density(z));
        }

    const double total = static_cast<double>(draws.size());
    out.value = -std::numeric_limits<double>::infinity();
    const Vector origin = Vector::Zero(n);
    for (double s : out.s_grid) {
        for (const auto& x : dirs) {
            const Vector a = shift_vector(model, s, x, origin);
            double sum = 0.0;
            for (std::size_t i = 0; i < inside.size(); ++i)
                sum += integrand(a, inside[i], rho[i]);
            const double value = sum / total;
            if (value > out.value) {
                out.value = value;
                out.binding_s = s;
            }
        }
    }
    return out;
}

} // namespace

std::string method_name(TvMethod method)
{
    switch (method) {
    case TvMethod::binned:
        return "binned";
    case TvMethod::projection:
        return "projection";
    case TvMethod::coupling_upper:
        return "coupling_upper";
    }
    return "unknown";
}

std::size_t default_bin_count(std::size_t n)
{
    const auto b = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)) / 2.0));
    return std::clamp<std::size_t>(b, 1, 256);
}

TvEstimate tv_binned(std::span<const double> p, std::span<const double> q, std::size_t bins, std::uint64_t seed)
{
    require_samples(p.size(), q.size());
    if (bins == 0)
        bins = default_bin_count(std::min(p.size(), q.size()));
    std::vector<double> pooled(p.begin(), p.end());
    pooled.insert(pooled.end(), q.begin(), q.end());
    const auto edges = quantile_edges(std::move(pooled), bins);
    Bins bp(p.size()), bq(q.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        bp[i] = bin_of(edges, p[i]);
    for (std::size_t i = 0; i < q.size(); ++i)
        bq[i] = bin_of(edges, q[i]);
    return histogram_distance(bp, bq, bins, false, seed);
}

TvEstimate tv_binned(std::span<const Vector> p, std::span<const Vector> q, std::span<const Vector> axes,
                     std::size_t bins, std::uint64_t seed)
{
    require_samples(p.size(), q.size());
    if (axes.empty() || axes.size() > 2)
        throw std::invalid_argument("binned estimate projects on one or two axes");
    if (bins == 0)
        bins = default_bin_count(std::min(p.size(), q.size()));

    Bins bp(p.size(), 0), bq(q.size(), 0);
    std::size_t cells = 1;
    for (const auto& axis : axes) {
        const auto pp = project(p, axis);
        const auto pq = project(q, axis);
        std::vector<double> pooled(pp);
        pooled.insert(pooled.end(), pq.begin(), pq.end());
        const auto edges = quantile_edges(std::move(pooled), bins);
        for (std::size_t i = 0; i < p.size(); ++i)
            bp[i] = static_cast<std::uint32_t>(bp[i] * bins + bin_of(edges, pp[i]));
        for (std::size_t i = 0; i < q.size(); ++i)
            bq[i] = static_cast<std::uint32_t>(bq[i] * bins + bin_of(edges, pq[i]));
        cells *= bins;
    }
    return histogram_distance(bp, bq, cells, false, seed);
}

TvEstimate tv_shift_projection(std::span<const Vector> samples, const Vector& v, std::size_t bins, std::uint64_t seed)
{
    TvEstimate est;
    est.method = TvMethod::projection;
    est.n_samples = samples.size();
    const double length = v.norm();
    if (length == 0.0)
        return est;
    require_samples(samples.size(), samples.size());
    if (bins == 0)
        bins = default_bin_count(samples.size());

    const auto base = project(samples, v / length);
    // Edges from alternate samples of each side: a sample and its own
    // translate never become neighbouring order statistics.
    std::vector<double> pooled(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        pooled[i] = i % 2 ? base[i] + length : base[i];
    const auto edges = quantile_edges(std::move(pooled), bins);
    Bins bp(base.size()), bq(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        bp[i] = bin_of(edges, base[i]);
        bq[i] = bin_of(edges, base[i] + length);
    }
    est = histogram_distance(bp, bq, bins, true, seed);
    est.method = TvMethod::projection;
    return est;
}

TvEstimate tv_transition_projection(std::span<const Vector> jump_samples, double p_no_jump, const Vector& v,
                                    std::size_t bins, std::uint64_t seed)
{
    if (!(p_no_jump >= 0.0 && p_no_jump <= 1.0))
        throw std::invalid_argument("no-jump probability must lie in [0, 1]");
    TvEstimate est;
    est.method = TvMethod::projection;
    est.n_samples = jump_samples.size();
    if (v.norm() == 0.0)
        return est;
    const TvEstimate moving = tv_shift_projection(jump_samples, v, bins, seed);
    est.value = 2.0 * p_no_jump + (1.0 - p_no_jump) * moving.value;
    est.std_err = (1.0 - p_no_jump) * moving.std_err;
    est.n_bins = moving.n_bins;
    return est;
}

Estimate delta1_integral(const JumpMeasure& nu, const Vector& a, const Ball& ball, const MonteCarlo& mc)
{
    const DiagonalModel& model = nu.model();
    model.check_dim(a, "shift");
    model.check_dim(ball.center, "ball center");
    if (!(nu.infimum_on_ball(ball) > 0.0))
        throw std::invalid_argument("jump density vanishes somewhere on the ball");
    const Moments m = replicate(mc, Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
        const Vector z = gaussian_sample(model, rng);
        if (!((z - ball.center).norm() < ball.radius)) {
            acc.add(0.0);
            return;
        }
        const double shifted = nu.density(z - a);
        if (shifted <= 0.0) {
            acc.add(0.0);
            return;
        }
        acc.add(std::exp(2.0 * log_cm_density(model, a, z) + 2.0 * std::log(shifted) - std::log(nu.density(z))));
    });
    return m.estimate();
}

GridSup delta1(const JumpMeasure& nu, double eps, const Ball& ball, std::span<const double> s_grid,
               std::size_t x_budget, const MonteCarlo& mc)
{
    const DiagonalModel& model = nu.model();
    return grid_supremum(nu, eps, ball, s_grid, x_budget, mc, [&](const Vector& a, const Vector& z, double rho) {
        const double shifted = nu.density(z - a);
        if (shifted <= 0.0)
            return 0.0;
        return std::exp(2.0 * log_cm_density(model, a, z) + 2.0 * std::log(shifted) - std::log(rho));
    });
}

GridSup delta1(const JumpMeasure& nu, double eps, const Ball& ball, std::size_t x_budget, const MonteCarlo& mc)
{
    const auto grid = default_time_grid(nu.model(), eps);
    return delta1(nu, eps, ball, grid, x_budget, mc);
}

double delta2_closed_form(const DiagonalModel& model, double c0, double eps)
{
    if (!(c0 > 0.0))
        throw std::invalid_argument("closed-form delta2 needs inf of rho0 on the ball > 0");
    if (!(eps > 0.0))
        throw std::invalid_argument("delta2 needs eps > 0");
    const double peak = (model.q().array() * (-2.0 * eps * model.lam().array()).exp()).maxCoeff();
    return (1.0 + std::exp(peak)) / c0;
}

GridSup delta2(const JumpMeasure& nu, double eps, const Ball& ball, Delta2Mode mode, std::size_t x_budget,
               const MonteCarlo& mc)
{
    const DiagonalModel& model = nu.model();
    if (mode == Delta2Mode::closed_form) {
        GridSup out;
        out.value = delta2_closed_form(model, nu.infimum_on_ball(ball), eps);
        out.binding_s = eps;
        out.s_grid = {eps};
        return out;
    }
    const auto grid = default_time_grid(model, eps);
    return grid_supremum(nu, eps, ball, grid, x_budget, mc, [&](const Vector& a, const Vector& z, double rho) {
        return std::exp(std::max(0.0, 2.0 * log_cm_density(model, a, z))) / rho;
    });
}

std::string bound_name(BoundKind kind)
{
    switch (kind) {
    case BoundKind::coupling_i:
        return "coupling_i";
    case BoundKind::coupling_ii:
        return "coupling_ii";
    case BoundKind::exponential_z3:
        return "exponential_z3";
    case BoundKind::log_rate:
        return "log_rate";
    case BoundKind::polynomial_52:
        return "polynomial_52";
    }
    return "unknown";
}

BoundKind parse_bound_kind(const std::string& name)
{
    for (auto kind : {BoundKind::coupling_i, BoundKind::coupling_ii, BoundKind::exponential_z3, BoundKind::log_rate,
                      BoundKind::polynomial_52})
        if (bound_name(kind) == name)
            return kind;
    throw std::invalid_argument("unknown bound kind '" + name + "'");
}

double bound_rate(BoundKind kind, const BoundParams& p, double t)
{
    if (!(t >= 0.0))
        throw std::invalid_argument("bound curves need t >= 0");
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind) {
    case BoundKind::coupling_i:
    case BoundKind::coupling_ii: {
        if (!p.delta_eval)
            throw std::invalid_argument(bound_name(kind) + " needs a delta evaluator");
        if (t == 0.0)
            return inf;
        double best = inf;
        for (int j = 0; j <= 20; ++j) {
            const double eps = std::ldexp(1.0, -j);
            best = std::min(best, eps + std::sqrt(p.delta_eval(eps) / t));
        }
        return best;
    }
    case BoundKind::exponential_z3:
        if (!(p.lambda0 > 0.0) || !(p.lambda > 0.0))
            throw std::invalid_argument("exponential_z3 needs lambda0 > 0 and lambda > 0");
        return std::exp(-p.lambda0 * p.lambda * t / (p.lambda0 + p.lambda));
    case BoundKind::log_rate:
        return t == 0.0 ? inf : 1.0 / std::log1p(t);
    case BoundKind::polynomial_52:
        if (!(p.delta > 0.0) || !(p.d > 0.0))
            throw std::invalid_argument("polynomial_52 needs delta > 0 and d > 0");
        return t == 0.0 ? inf : std::pow(t, -2.0 / (4.0 + p.d * (1.0 + p.delta)));
    }
    return inf;
}

BoundCurve bound_curve(BoundKind kind, const BoundParams& params, std::span<const double> times)
{
    if (times.empty())
        throw std::invalid_argument("bound curve needs a non-empty time grid");
    BoundCurve curve{kind, {times.begin(), times.end()}, {}, params};
    const double prefactor = params.scale * (1.0 + params.displacement);
    for (double t : times)
        curve.values.push_back(prefactor * bound_rate(kind, params, t));
    return curve;
}

double fit_bound_scale(BoundKind kind, const BoundParams& params, double t, double value)
{
    const double base = (1.0 + params.displacement) * bound_rate(kind, params, t);
    if (!(base > 0.0) || !std::isfinite(base))
        throw std::invalid_argument("cannot fit a bound constant where the rate factor is 0 or infinite");
    return value / base;
}

RateFit fit_rate(std::span<const double> times, std::span<const double> values, RateModel model)
{
    if (times.size() != values.size())
        throw std::invalid_argument("times and values differ in length");
    if (times.size() < 4)
        throw std::invalid_argument("rate fit needs at least 4 points");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const double v = values[i];
        if (!(v > 0.0))
            throw std::invalid_argument("rate fit needs positive values");
        switch (model) {
        case RateModel::power:
            if (!(t > 0.0))
                throw std::invalid_argument("power fit needs positive times");
            xs.push_back(std::log(t));
            ys.push_back(std::log(v));
            break;
        case RateModel::exponential:
            xs.push_back(t);
            ys.push_back(std::log(v));
            break;
        case RateModel::inverse_log:
            if (!(t > 0.0))
                throw std::invalid_argument("inverse-log fit needs positive times");
            xs.push_back(1.0 / std::log1p(t));
            ys.push_back(v);
            break;
        }
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("rate fit needs distinct times");
    RateFit fit;
    fit.rate = sxy / sxx;
    fit.intercept = my - fit.rate * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - fit.intercept - fit.rate * xs[i];
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

} // namespace oulevy
