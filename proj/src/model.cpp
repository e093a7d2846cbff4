#include "oulevy/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace oulevy {

DiagonalModel::DiagonalModel(Vector q, Vector lam)
    : DiagonalModel(std::move(q), std::move(lam), Vector())
{
}

DiagonalModel::DiagonalModel(Vector q, Vector lam, Vector sigma)
    : q_(std::move(q)), lam_(std::move(lam)), sigma_(std::move(sigma))
{
    if (q_.size() == 0)
        throw std::invalid_argument("model needs at least one mode");
    if (sigma_.size() == 0)
        sigma_ = Vector::Ones(q_.size());
    if (lam_.size() != q_.size() || sigma_.size() != q_.size())
        throw std::invalid_argument("q, lam and sigma must have the same length");
    for (int k = 0; k < q_.size(); ++k) {
        if (!(q_[k] > 0.0) || !std::isfinite(q_[k]))
            throw std::invalid_argument("precision q_" + std::to_string(k + 1) + " must be positive");
        if (!(lam_[k] >= 0.0) || !std::isfinite(lam_[k]))
            throw std::invalid_argument("eigenvalue lam_" + std::to_string(k + 1) + " must be non-negative");
        if (sigma_[k] == 0.0 || !std::isfinite(sigma_[k]))
            throw std::invalid_argument("sigma_" + std::to_string(k + 1) + " must be non-zero");
    }
    std_dev_ = q_.cwiseSqrt().cwiseInverse();
}

void DiagonalModel::check_dim(const Vector& v, const char* what) const
{
    if (v.size() != q_.size())
        throw std::invalid_argument(std::string(what) + " has " + std::to_string(v.size()) +
                                    " coordinates, model has " + std::to_string(q_.size()));
}

Vector semigroup_apply(const DiagonalModel& model, double t, const Vector& x)
{
    if (!(t >= 0.0))
        throw std::invalid_argument("semigroup time must be non-negative");
    model.check_dim(x, "x");
    return ((-t * model.lam().array()).exp() * x.array()).matrix();
}

Vector gaussian_sample(const DiagonalModel& model, Rng& rng)
{
    Vector z(model.n_modes());
    for (int k = 0; k < z.size(); ++k)
        z[k] = model.std_dev_[k] * rng.normal();
    return z;
}

double log_cm_density(const DiagonalModel& model, const Vector& h, const Vector& z)
{
    model.check_dim(h, "shift");
    model.check_dim(z, "point");
    const auto q = model.q().array();
    return (q * h.array() * (z.array() - 0.5 * h.array())).sum();
}

double cm_density(const DiagonalModel& model, const Vector& h, const Vector& z)
{
    return std::exp(log_cm_density(model, h, z));
}

double cm_density_squared_integral(const DiagonalModel& model, const Vector& h)
{
    model.check_dim(h, "shift");
    return std::exp((model.q().array() * h.array().square()).sum());
}

double beta(const DiagonalModel& model, double eps)
{
    if (!(eps > 0.0))
        throw std::invalid_argument("beta needs eps > 0");
    return ((-eps * model.lam().array()).exp() * model.q().array().square()).maxCoeff();
}

double norm(const DiagonalModel& model, const Vector& v, NormKind kind)
{
    model.check_dim(v, "vector");
    if (kind == NormKind::state)
        return v.norm();
    return (model.q().array() * v.array()).matrix().norm();
}

Vector sigma_apply(const DiagonalModel& model, const Vector& v)
{
    model.check_dim(v, "vector");
    return (model.sigma().array() * v.array()).matrix();
}

Vector sigma_solve(const DiagonalModel& model, const Vector& v)
{
    model.check_dim(v, "vector");
    return (v.array() / model.sigma().array()).matrix();
}

DiagonalModel make_gaussian_model(int n_modes, double delta, double d)
{
    if (n_modes < 1 || !(delta > 0.0) || !(d > 0.0))
        throw std::invalid_argument("gaussian model needs n_modes >= 1, delta > 0, d > 0");
    Vector q(n_modes), lam(n_modes);
    for (int k = 1; k <= n_modes; ++k) {
        q[k - 1] = std::pow(k, 1.0 + delta);
        lam[k - 1] = std::pow(k, 2.0 / d);
    }
    return DiagonalModel(q, lam);
}

DiagonalModel make_wiener_surrogate(int n_modes)
{
    if (n_modes < 1)
        throw std::invalid_argument("wiener surrogate needs n_modes >= 1");
    Vector q(n_modes);
    for (int k = 1; k <= n_modes; ++k) {
        const double root = (k - 0.5) * std::numbers::pi;
        q[k - 1] = root * root;
    }
    return DiagonalModel(q, q);
}

} // namespace oulevy
