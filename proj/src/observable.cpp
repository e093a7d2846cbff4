#include "oulevy/observable.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace oulevy {

Observable Observable::coordinate_cosine(int n_modes, int k, double freq, double phase)
{
    if (k < 0 || k >= n_modes)
        throw std::invalid_argument("coordinate index out of range");
    Vector omega = Vector::Zero(n_modes);
    omega[k] = freq;
    return cosine(std::move(omega), phase);
}

double Observable::operator()(const Vector& z) const
{
    switch (kind_) {
    case Kind::one:
        return 1.0;
    case Kind::cosine:
        if (omega_.size() != z.size())
            throw std::invalid_argument("observable dimension mismatch");
        return std::cos(omega_.dot(z) + param_);
    case Kind::half_space:
        if (omega_.size() != z.size())
            throw std::invalid_argument("observable dimension mismatch");
        return omega_.dot(z) > param_ ? 1.0 : 0.0;
    }
    return 0.0;
}

std::string Observable::describe() const
{
    std::ostringstream out;
    switch (kind_) {
    case Kind::one:
        return "one";
    case Kind::cosine:
        out << "cosine(|omega|=" << omega_.norm() << ", phase=" << param_ << ")";
        break;
    case Kind::half_space:
        out << "half_space(|omega|=" << omega_.norm() << ", level=" << param_ << ")";
        break;
    }
    return out.str();
}

} // namespace oulevy
