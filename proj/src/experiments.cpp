#include "oulevy/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

namespace oulevy {

namespace {

std::uint64_t require_seed(const ExperimentConfig& cfg)
{
    if (!cfg.run.seed)
        throw std::invalid_argument("run.seed is required (no entropy default)");
    return *cfg.run.seed;
}

void require_grid(const ExperimentConfig& cfg)
{
    if (cfg.run.times.empty())
        throw std::invalid_argument("run.times is empty");
}

bool wants(const ExperimentConfig& cfg, BoundKind kind)
{
    const auto& k = cfg.bounds.kinds;
    return std::find(k.begin(), k.end(), bound_name(kind)) != k.end();
}

// delta evaluator for the coupling kinds. bound_rate asks for the same 21
// values at every time, so the Monte Carlo variant is memoized.
std::function<double(double)> delta_evaluator(BoundKind kind, const std::shared_ptr<const JumpMeasure>& nu,
                                              const Ball& ball, std::uint64_t seed, unsigned threads)
{
    const double c0 = nu->infimum_on_ball(ball);
    if (kind == BoundKind::coupling_ii) {
        if (!(c0 > 0.0))
            throw std::invalid_argument("coupling_ii needs a jump density bounded below on bounds.ball");
        return [model = nu->model(), c0](double eps) { return delta2_closed_form(model, c0, eps); };
    }
    auto cache = std::make_shared<std::map<double, double>>();
    const MonteCarlo mc{derive_seed(seed, 0xde17a1), 1u << 14, threads};
    return [nu, ball, mc, cache](double eps) {
        auto [it, fresh] = cache->try_emplace(eps, 0.0);
        if (fresh)
            it->second = delta1(*nu, eps, ball, 16, mc).value;
        return it->second;
    };
}

} // namespace

BoundParams base_bound_params(const ExperimentConfig& cfg, const JumpMeasure& nu)
{
    BoundParams p;
    p.scale = cfg.bounds.scale > 0.0 ? cfg.bounds.scale : 1.0;
    p.displacement = (cfg.run.x - cfg.run.y).norm();
    p.lambda0 = nu.lambda0();
    p.lambda = nu.model().min_lam();
    p.delta = cfg.model.delta;
    p.d = cfg.model.d;
    return p;
}

DecayTable tv_decay(const ExperimentConfig& cfg, unsigned threads)
{
    const std::uint64_t seed = require_seed(cfg);
    require_grid(cfg);
    if (cfg.run.replicas < min_tv_samples)
        throw std::invalid_argument("run.replicas must be at least " + std::to_string(min_tv_samples));
    const auto nu = std::make_shared<const JumpMeasure>(cfg.levy, build_model(cfg));
    const DiagonalModel& model = nu->model();
    const Vector& x = cfg.run.x;
    const Vector& y = cfg.run.y;
    const MonteCarlo base{seed, cfg.run.replicas, threads};

    DecayTable table;
    table.seed = seed;
    for (std::size_t i = 0; i < cfg.run.times.size(); ++i) {
        const double t = cfg.run.times[i];
        DecayRow row;
        row.t = t;
        const Vector v = semigroup_apply(model, t, x - y);

        // X_t^0 on paths with at least one jump; the no-jump atoms enter exactly.
        struct Draw {
            Vector end;
            bool jumped = false;
        };
        const auto draws = generate<Draw>(base.stream(100 + i), [&](std::uint64_t, Rng& rng) {
            const JumpPath path = sample_path(*nu, t, rng);
            return Draw{mild_solution(model, Vector::Zero(model.n_modes()), path), path.count() > 0};
        });
        std::vector<Vector> jumped;
        for (const auto& d : draws)
            if (d.jumped)
                jumped.push_back(d.end);
        const double p0 = std::exp(-nu->lambda0() * t);
        if (v.norm() > 0.0 && jumped.size() < min_tv_samples)
            throw std::invalid_argument("too few paths with jumps at t=" + std::to_string(t) + "; raise run.replicas");
        row.projection = tv_transition_projection(jumped, p0, v, 0, derive_seed(seed, 300 + i));

        const Moments apart = replicate(base.stream(200 + i), Moments{}, [&](std::uint64_t, Rng& rng, Moments& acc) {
            acc.add(run_mineka_coupling(*nu, x, y, t, rng).coupled() ? 0.0 : 2.0);
        });
        row.coupling_upper.method = TvMethod::coupling_upper;
        row.coupling_upper.value = apart.mean();
        row.coupling_upper.std_err = apart.std_err();
        row.coupling_upper.n_samples = apart.n;
        table.rows.push_back(std::move(row));
    }

    const double t0 = table.rows.front().t;
    const double tv0 = table.rows.front().projection.value;
    auto fitted = [&](BoundKind kind, BoundParams p) {
        p.scale = cfg.bounds.scale > 0.0 ? cfg.bounds.scale : fit_bound_scale(kind, p, t0, tv0);
        return p;
    };
    const BoundParams base_params = base_bound_params(cfg, *nu);
    if (wants(cfg, BoundKind::coupling_ii) && nu->infimum_on_ball(cfg.bounds.ball) > 0.0) {
        BoundParams p = base_params;
        p.delta_eval = delta_evaluator(BoundKind::coupling_ii, nu, cfg.bounds.ball, seed, threads);
        table.coupling1 = fitted(BoundKind::coupling_ii, p);
        const auto curve = bound_curve(BoundKind::coupling_ii, *table.coupling1, cfg.run.times);
        for (std::size_t i = 0; i < curve.values.size(); ++i)
            table.rows[i].bound_coupling1 = curve.values[i];
    }
    if (wants(cfg, BoundKind::exponential_z3) && base_params.lambda > 0.0) {
        table.z3 = fitted(BoundKind::exponential_z3, base_params);
        const auto curve = bound_curve(BoundKind::exponential_z3, *table.z3, cfg.run.times);
        for (std::size_t i = 0; i < curve.values.size(); ++i)
            table.rows[i].bound_z3 = curve.values[i];
    }
    return table;
}

std::vector<BoundCurve> bound_tables(const ExperimentConfig& cfg, unsigned threads)
{
    require_grid(cfg);
    if (cfg.bounds.kinds.empty())
        throw std::invalid_argument("bounds.kinds is empty");
    const auto nu = std::make_shared<const JumpMeasure>(cfg.levy, build_model(cfg));
    const BoundParams base = base_bound_params(cfg, *nu);
    std::vector<BoundCurve> curves;
    for (const auto& name : cfg.bounds.kinds) {
        const BoundKind kind = parse_bound_kind(name);
        BoundParams p = base;
        if (kind == BoundKind::coupling_i || kind == BoundKind::coupling_ii)
            p.delta_eval = delta_evaluator(kind, nu, cfg.bounds.ball, cfg.run.seed.value_or(0), threads);
        curves.push_back(bound_curve(kind, p, cfg.run.times));
    }
    return curves;
}

std::vector<CouplingTranscript> coupling_traces(const ExperimentConfig& cfg, double t, std::uint64_t count,
                                                unsigned threads)
{
    const std::uint64_t seed = require_seed(cfg);
    if (!(t > 0.0))
        throw std::invalid_argument("coupling horizon must be positive");
    const JumpMeasure nu(cfg.levy, build_model(cfg));
    return generate<CouplingTranscript>(MonteCarlo{seed, count, threads}.stream(400), [&](std::uint64_t, Rng& rng) {
        return run_mineka_coupling(nu, cfg.run.x, cfg.run.y, t, rng);
    });
}

} // namespace oulevy
