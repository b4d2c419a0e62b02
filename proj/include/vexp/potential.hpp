#pragma once

#include "vexp/exponent.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vexp {

/// Pointwise data a potential may depend on: the exponent value p(x).
/// x-dependence of j is restricted to exponent fields and scalars.
struct Site {
    double p = 2.0;
};

/// A law t -> f(site, t), one per piece.
using PieceLaw = std::function<double(const Site&, double)>;

/// Smooth branch of a potential, valid on the closure of its t-interval.
/// The formulas may be evaluated slightly outside that interval.
struct Piece {
    PieceLaw value;
    PieceLaw slope;     ///< d/dt
    PieceLaw curvature; ///< d^2/dt^2
};

/// Declared bound |v| <= a + c1 |t|^(r(x) - 1) for v in the Clarke interval.
struct GrowthBound {
    double a = 0.0;
    double c1 = 0.0;
    std::function<double(const Site&)> r;
};

/// Generalized gradient of j(x, .) at t: the closed interval between the
/// one-sided derivatives.
struct ClarkeInterval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] bool contains(double v, double tol = 0.0) const noexcept { return v >= lo - tol && v <= hi + tol; }
    /// Distance from v to the interval (0 inside).
    [[nodiscard]] double distance(double v) const noexcept;
    /// Closest point of the interval to v.
    [[nodiscard]] double clamp(double v) const noexcept;
};

/// t-piecewise C^1 potential j(x, t), continuous in t, with j(x, 0) = 0.
///
/// pieces()[i] covers (breakpoints()[i-1], breakpoints()[i]); there is one
/// more piece than breakpoints. Immutable after construction.
class PiecewisePotential {
public:
    /// Breakpoints closer than this to t switch evaluation to interval mode.
    static constexpr double breakpoint_tolerance = 1e-9;

    PiecewisePotential(std::string name, std::vector<double> breakpoints, std::vector<Piece> pieces);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] std::span<const Piece> pieces() const noexcept { return pieces_; }

    /// Index of the piece containing t (the left piece at a breakpoint).
    [[nodiscard]] std::size_t piece_index(double t) const noexcept;
    /// Index of the breakpoint within breakpoint_tolerance of t, if any.
    [[nodiscard]] std::optional<std::size_t> breakpoint_near(double t) const noexcept;

    [[nodiscard]] double value(const Site& x, double t) const;
    /// Derivative of the containing piece; at a breakpoint, the left piece.
    [[nodiscard]] double slope(const Site& x, double t) const;

    /// Metadata used by the hypothesis audits.
    [[nodiscard]] const std::optional<GrowthBound>& growth() const noexcept { return growth_; }
    /// Constant mu with limsup_{t->0} j / |t|^p <= -mu, when known.
    [[nodiscard]] std::optional<double> local_mu() const noexcept { return local_mu_; }
    PiecewisePotential& with_growth(GrowthBound g);
    PiecewisePotential& with_local_mu(double mu);

private:
    std::string name_;
    std::vector<double> breakpoints_;
    std::vector<Piece> pieces_;
    std::optional<GrowthBound> growth_;
    std::optional<double> local_mu_;
};

ClarkeInterval clarke_interval(const PiecewisePotential& j, const Site& x, double t);

/// j0(x, t; h) = max{xi h : xi in the Clarke interval}.
double j0(const PiecewisePotential& j, const Site& x, double t, double h);

/// Three-piece potential with breakpoints |t| = 1, 2:
///   -mu |t|^p                                 |t| <= 1
///   (mu + sigma - 2^q+) |t| - 2 mu - sigma + 2^q+   1 < |t| <= 2
///   sigma - |t|^q+                            |t| > 2
/// Requires mu, sigma > 0 and 1 < p- <= p+ < q+.
PiecewisePotential make_j1(double mu, double sigma, const ExponentField& p, double q_plus);

/// Two-piece potential with breakpoint |t| = 1:
///   -mu |t|^p for |t| <= 1,  |t|^q+ - mu - 1 for |t| > 1.
/// Requires mu > 0 and 1 < p- <= p+ < q+.
PiecewisePotential make_j2(double mu, const ExponentField& p, double q_plus);

/// Smooth benchmark t^4/4 - mu t^2/2.
PiecewisePotential make_quartic(double mu);

PiecewisePotential make_zero();

/// coef |t|^nu with nu >= 1; nu = 1 has a breakpoint at 0.
PiecewisePotential make_power(double coef, double nu);

/// coef |t|^p(x).
PiecewisePotential make_exponent_power(double coef);

/// e^t - 1; grows faster than any polynomial.
PiecewisePotential make_exponential();

/// Pointwise sum; breakpoints are merged.
PiecewisePotential add(const PiecewisePotential& f, const PiecewisePotential& g);
PiecewisePotential negate(const PiecewisePotential& f);

/// Site of node k of an exponent field.
inline Site site_of(const ExponentField& p, std::size_t node) { return Site{p[node]}; }

} // namespace vexp
