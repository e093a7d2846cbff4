#pragma once

#include "oulevy/model.hpp"

#include <string>

namespace oulevy {

// Bounded test function on the state space, |f| <= 1.
//   one:        f(z) = 1
//   cosine:     f(z) = cos(<omega, z> + phase)
//   half_space: f(z) = 1 if <omega, z> > level, else 0
class Observable {
public:
    enum class Kind { one, cosine, half_space };

    static Observable one() { return Observable(Kind::one, Vector(), 0.0); }
    static Observable cosine(Vector omega, double phase = 0.0) { return Observable(Kind::cosine, std::move(omega), phase); }
    static Observable half_space(Vector omega, double level) { return Observable(Kind::half_space, std::move(omega), level); }

    // cos(freq * z_k + phase) on an n-mode space, k zero-based.
    static Observable coordinate_cosine(int n_modes, int k, double freq, double phase = 0.0);

    double operator()(const Vector& z) const;

    Kind kind() const { return kind_; }
    const Vector& omega() const { return omega_; }
    double parameter() const { return param_; }
    std::string describe() const;

private:
    Observable(Kind kind, Vector omega, double param) : kind_(kind), omega_(std::move(omega)), param_(param) {}

    Kind kind_;
    Vector omega_;
    double param_;
};

} // namespace oulevy
