#pragma once

#include "oulevy/rng.hpp"

#include <Eigen/Core>

namespace oulevy {

using Vector = Eigen::VectorXd;

enum class NormKind { state, cameron_martin };

// Galerkin truncation with a diagonal drift and noise coefficient.
// The reference measure is the product Gaussian with precisions q_k,
// the drift is A e_k = -lam_k e_k and sigma acts coordinatewise.
class DiagonalModel {
public:
    DiagonalModel(Vector q, Vector lam);
    DiagonalModel(Vector q, Vector lam, Vector sigma);

    int n_modes() const { return static_cast<int>(q_.size()); }
    const Vector& q() const { return q_; }
    const Vector& lam() const { return lam_; }
    const Vector& sigma() const { return sigma_; }
    double min_lam() const { return lam_.minCoeff(); }

    // Throws std::invalid_argument unless v has n_modes coordinates.
    void check_dim(const Vector& v, const char* what) const;

private:
    Vector q_;
    Vector lam_;
    Vector sigma_;
    Vector std_dev_;

    friend Vector gaussian_sample(const DiagonalModel& model, Rng& rng);
};

Vector semigroup_apply(const DiagonalModel& model, double t, const Vector& x);

// Draw from the reference measure: independent N(0, 1/q_k) coordinates.
Vector gaussian_sample(const DiagonalModel& model, Rng& rng);

double log_cm_density(const DiagonalModel& model, const Vector& h, const Vector& z);
double cm_density(const DiagonalModel& model, const Vector& h, const Vector& z);
double cm_density_squared_integral(const DiagonalModel& model, const Vector& h);

double beta(const DiagonalModel& model, double eps);

double norm(const DiagonalModel& model, const Vector& v, NormKind kind);

Vector sigma_apply(const DiagonalModel& model, const Vector& v);
Vector sigma_solve(const DiagonalModel& model, const Vector& v);

DiagonalModel make_gaussian_model(int n_modes, double delta, double d);
DiagonalModel make_wiener_surrogate(int n_modes);

} // namespace oulevy
