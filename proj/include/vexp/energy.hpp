#pragma once

#include "vexp/discrete_operator.hpp"
#include "vexp/potential.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vexp {

/// The functional
///   R(u) = int (1/p) |grad u|^p - int (lambda/p) |u|^p - int j(x, u)
/// on zero-trace grid functions. Zero-order terms use nodal weights, so the
/// nonsmooth part is a sum of per-node terms.
class EnergyModel {
public:
    EnergyModel(ExponentField p, double lambda, PiecewisePotential j);

    [[nodiscard]] const GridPtr& grid() const noexcept { return p_.grid(); }
    [[nodiscard]] const ExponentField& p() const noexcept { return p_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] const PiecewisePotential& j() const noexcept { return j_; }
    [[nodiscard]] Site site(std::size_t node) const { return site_of(p_, node); }

private:
    ExponentField p_;
    double lambda_;
    PiecewisePotential j_;
};

/// R(u). R(0) = 0 exactly. Throws NonFiniteInput or ConstructionError for a
/// non-zero trace.
double eval_R(const EnergyModel& model, const GridFunction& u);

/// Dual vector of the smooth part, Au - lambda |u|^(p-2) u.
DualVector smooth_gradient(const EnergyModel& model, const GridFunction& u);

/// Generalized directional derivative R0(u; v): the smooth part paired with
/// v plus int j0(x, u; -v).
double generalized_derivative(const EnergyModel& model, const GridFunction& u, const GridFunction& v);

enum class SelectionRule { lo, hi, midpoint, nearest_to_residual };

const char* to_string(SelectionRule rule) noexcept;
/// "lo", "hi", "midpoint", "nearest-to-residual"; throws ConstructionError otherwise.
SelectionRule parse_selection_rule(std::string_view name);

struct SubgradientSelection {
    /// v*(x_k) per node, inside the Clarke interval at u(x_k).
    std::vector<double> values;
    SelectionRule rule = SelectionRule::midpoint;
};

SubgradientSelection select_subgradient(const EnergyModel& model, const GridFunction& u, SelectionRule rule);

struct ResidualReport {
    /// u* = Au - lambda |u|^(p-2) u - v*, boundary entries 0.
    DualVector residual;
    /// sqrt(sum u*_k^2 / K_kk) with K the p = 2 stiffness matrix.
    double m_estimate = 0.0;
    /// Distance from the needed pointwise slope to the Clarke interval, per node.
    std::vector<double> gap;
    double max_gap = 0.0;
};

/// Throws ConstructionError when the selection leaves a Clarke interval.
ResidualReport residual(const EnergyModel& model, const GridFunction& u, const SubgradientSelection& selection);

/// residual() under the nearest-to-residual selection.
ResidualReport residual(const EnergyModel& model, const GridFunction& u);

struct PsOptions {
    double m_tol = 1e-6;
    double cauchy_tol = 1e-6;
    /// last / first ratio that counts as growth of a monotone tail.
    double growth_factor = 10.0;
};

struct PsReport {
    std::vector<double> R;
    std::vector<double> m;
    std::vector<double> norm;
    /// Sobolev norms of successive differences.
    std::vector<double> increments;
    bool R_bounded = true;
    bool m_vanishing = false;
    bool norm_unbounded = false;
    bool cauchy_tail = false;
};

/// Discrete shadows of the Palais-Smale conclusion on a sequence of iterates.
PsReport ps_diagnostics(const EnergyModel& model, const std::vector<GridFunction>& sequence, const PsOptions& options = {});

struct GeometryBoundReport {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double gamma = 0.0;   ///< j <= -mu/2 |t|^p + gamma |t|^theta on the sampled range
    double varrho = 0.0;  ///< ||u||_theta <= varrho ||u||, fitted
    double theta = 0.0;
    std::size_t checked = 0;
    std::size_t violations = 0;
    /// min over checked u of R(u) - (beta1 ||u||^p+ - beta2 ||u||^theta).
    double worst_slack = 0.0;
};

/// Default geometry exponent: (p+ + p_hat_star)/2 clipped into (p+, p_hat_star],
/// or the declared growth exponent when p_hat_star is infinite.
double default_theta(const EnergyModel& model, int dimension);

/// Fits gamma by sampling t in [1e-8, t_max], varrho on `fit` functions, and
/// checks R(u) >= beta1 ||u||^p+ - beta2 ||u||^theta on `check` functions
/// with ||u|| < 1 (Phi-Luxemburg norm).
GeometryBoundReport check_geometry_bound(const EnergyModel& model, double lambda_star, double mu, double theta,
                                         const std::vector<GridFunction>& fit, const std::vector<GridFunction>& check,
                                         double t_max = 1e3);

} // namespace vexp
