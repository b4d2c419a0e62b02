#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vexp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid construction arguments (degenerate grids, bad parameters, ...).
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Two objects that must live on the same grid do not.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// Input contains NaN or infinity where finite values are required.
class NonFiniteInput : public Error {
public:
    using Error::Error;
};

/// Neumaier-compensated accumulator. Summation order is the call order, so a
/// fixed loop order gives bit-stable results.
class CompensatedSum {
public:
    void add(double v) noexcept
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Deterministic generator: splitmix64-seeded xoshiro256**. Portable across
/// standard libraries, unlike std::*_distribution.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t next() noexcept;
    /// Uniform on [0, 1).
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Standard normal (Box-Muller, no caching).
    double normal() noexcept;

private:
    std::uint64_t s_[4];
};

/// |t|^(p-2) t with the continuous extension 0 at t = 0 (valid for p > 1).
inline double signed_power(double t, double p) noexcept
{
    if (t == 0.0) {
        return 0.0;
    }
    return std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

inline bool all_finite(std::span<const double> values) noexcept
{
    for (double v : values) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

} // namespace vexp
