#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// None of these call into the library under test.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

namespace vexp_test {

/// Frozen reference values (high-precision quadrature and bisection).
inline constexpr double four_over_ln2 = 5.7707801635558536294;
/// inf{s : int_0^2 s^-(2+x) dx = 1}
inline constexpr double luxemburg_one_linear_exponent_0_2 = 1.263755447771092458354184;
/// Smallest eigenvalue of the tridiagonal Laplacian, 256 interior nodes on (0,1).
inline constexpr double laplacian_1d_256 = 9.86948150166892;
/// Smallest eigenvalue of the 5-point Laplacian, 64 x 64 interior nodes on the unit square.
inline constexpr double laplacian_2d_64 = 19.735366533680665;

/// Smallest Dirichlet eigenvalue of the 3-point Laplacian with n interior nodes
/// on an interval of length L.
inline double laplacian_eigenvalue_1d(int n, double L = 1.0)
{
    const double h = L / (n + 1);
    const double s = std::sin(std::numbers::pi * h / (2.0 * L));
    return 4.0 / (h * h) * s * s;
}

/// Root of the continuous Luxemburg equation on (a, b) for
/// u = c and p(x) = p0 + p1 x, by bisection on Simpson quadrature.
inline double luxemburg_constant_linear(double c, double p0, double p1, double a, double b)
{
    auto modular = [&](double s) {
        const int n = 20000;
        const double h = (b - a) / n;
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = a + i * h;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * std::pow(std::abs(c) / s, p0 + p1 * x);
        }
        return acc * h / 3.0;
    };
    double lo = 1e-6;
    double hi = 1e6;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (modular(mid) > 1.0 ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

struct ShootingSolution {
    double slope = 0.0;
    std::vector<double> u; ///< nodal values including both boundary zeros
};

/// Discrete shooting for -u'' = f(u) on (0, 1) with the 3-point scheme and
/// n + 2 nodes: u_{k+1} = 2u_k - u_{k-1} - h^2 f(u_k). Finds the smallest
/// initial slope in [s_lo, s_hi] whose orbit is positive inside and returns
/// to 0 at the right end.
inline std::optional<ShootingSolution> shoot_positive(const std::function<double(double)>& f, int n, double s_lo,
                                                      double s_hi, double ds = 1e-3)
{
    const double h = 1.0 / (n + 1);
    auto orbit = [&](double s) {
        std::vector<double> u(static_cast<std::size_t>(n) + 2, 0.0);
        u[1] = s * h;
        for (int k = 1; k <= n; ++k) {
            u[k + 1] = 2.0 * u[k] - u[k - 1] - h * h * f(u[k]);
        }
        return u;
    };
    auto positive_inside = [&](const std::vector<double>& u) {
        for (int k = 1; k <= n; ++k) {
            if (u[k] <= 0.0) {
                return false;
            }
        }
        return true;
    };
    double a = s_lo;
    std::vector<double> ua = orbit(a);
    for (double b = s_lo + ds; b <= s_hi; b += ds) {
        std::vector<double> ub = orbit(b);
        if (positive_inside(ua) && positive_inside(ub) && (ua.back() > 0.0) != (ub.back() > 0.0)) {
            double lo = a;
            double hi = b;
            const bool lo_positive = ua.back() > 0.0;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((orbit(mid).back() > 0.0) == lo_positive ? lo : hi) = mid;
            }
            ShootingSolution sol{0.5 * (lo + hi), {}};
            sol.u = orbit(sol.slope);
            sol.u.back() = 0.0;
            return sol;
        }
        a = b;
        ua = std::move(ub);
    }
    return std::nullopt;
}

} // namespace vexp_test
