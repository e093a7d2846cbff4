#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace oulevy {

struct Estimate {
    double value = 0.0;
    double std_err = 0.0;
};

// Streaming mean and variance (Welford updates, Chan merges). Merging in a
// fixed order keeps chunked reductions bitwise reproducible.
struct Moments {
    std::uint64_t n = 0;
    double mu = 0.0;
    double m2 = 0.0;

    void add(double v)
    {
        ++n;
        const double d = v - mu;
        mu += d / static_cast<double>(n);
        m2 += d * (v - mu);
    }

    void merge(const Moments& o)
    {
        if (o.n == 0)
            return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double d = o.mu - mu;
        const double total = na + nb;
        mu += d * nb / total;
        m2 += o.m2 + d * d * na * nb / total;
        n += o.n;
    }

    double mean() const { return mu; }
    double sum() const { return mu * static_cast<double>(n); }
    double variance() const { return n < 2 ? 0.0 : m2 / static_cast<double>(n - 1); }
    double std_err() const { return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
    Estimate estimate() const { return {mean(), std_err()}; }
};

// Several statistics reduced together.
template <std::size_t K>
struct MomentSet {
    std::array<Moments, K> m{};

    Moments& operator[](std::size_t i) { return m[i]; }
    const Moments& operator[](std::size_t i) const { return m[i]; }

    void merge(const MomentSet& o)
    {
        for (std::size_t i = 0; i < K; ++i)
            m[i].merge(o.m[i]);
    }
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double pooled(double se_a, double se_b) { return std::sqrt(se_a * se_a + se_b * se_b); }

} // namespace oulevy
