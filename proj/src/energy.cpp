#include "vexp/energy.hpp"

#include "vexp/audit.hpp"
#include "vexp/common.hpp"
#include "vexp/modular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vexp {

EnergyModel::EnergyModel(ExponentField p, double lambda, PiecewisePotential j)
    : p_(std::move(p)), lambda_(lambda), j_(std::move(j))
{
    if (!std::isfinite(lambda_)) {
        throw ConstructionError("lambda must be finite");
    }
    if (!(p_.p_minus() > 1.0)) {
        throw ConstructionError("energy model needs p_minus > 1");
    }
}

namespace {

void require_admissible(const EnergyModel& model, const GridFunction& u, const char* who)
{
    require_same_grid(model.grid(), u.grid(), who);
    if (!all_finite(u.values())) {
        throw NonFiniteInput(std::string(who) + ": non-finite values");
    }
    if (!u.zero_trace()) {
        throw ConstructionError(std::string(who) + ": function has a non-zero trace");
    }
}

/// Pointwise slope the inclusion needs at an interior node.
double needed_slope(const EnergyModel& model, const DualVector& smooth, std::size_t k)
{
    return smooth[k] / model.grid()->node_weights()[k];
}

} // namespace

double eval_R(const EnergyModel& model, const GridFunction& u)
{
    require_admissible(model, u, "eval_R");
    const auto w = model.grid()->node_weights();
    CompensatedSum sum;
    sum.add(energy_J(u, model.p()));
    for (std::size_t k : model.grid()->interior_nodes()) {
        const double t = u[k];
        if (t == 0.0) {
            continue;
        }
        const Site x = model.site(k);
        sum.add(-w[k] * model.lambda() / x.p * std::pow(std::abs(t), x.p));
        sum.add(-w[k] * model.j().value(x, t));
    }
    return sum.value();
}

DualVector smooth_gradient(const EnergyModel& model, const GridFunction& u)
{
    require_admissible(model, u, "smooth_gradient");
    DualVector d = apply_A(u, model.p());
    const auto w = model.grid()->node_weights();
    for (std::size_t k : model.grid()->interior_nodes()) {
        d[k] -= w[k] * model.lambda() * signed_power(u[k], model.p()[k]);
    }
    return d;
}

double generalized_derivative(const EnergyModel& model, const GridFunction& u, const GridFunction& v)
{
    const DualVector d = smooth_gradient(model, u);
    const auto w = model.grid()->node_weights();
    CompensatedSum sum;
    sum.add(d.pair(v));
    for (std::size_t k : model.grid()->interior_nodes()) {
        sum.add(w[k] * j0(model.j(), model.site(k), u[k], -v[k]));
    }
    return sum.value();
}

const char* to_string(SelectionRule rule) noexcept
{
    switch (rule) {
    case SelectionRule::lo:
        return "lo";
    case SelectionRule::hi:
        return "hi";
    case SelectionRule::midpoint:
        return "midpoint";
    case SelectionRule::nearest_to_residual:
        return "nearest-to-residual";
    }
    return "midpoint";
}

SelectionRule parse_selection_rule(std::string_view name)
{
    for (auto rule : {SelectionRule::lo, SelectionRule::hi, SelectionRule::midpoint, SelectionRule::nearest_to_residual}) {
        if (name == to_string(rule)) {
            return rule;
        }
    }
    throw ConstructionError("unknown selection rule '" + std::string(name) + "'");
}

SubgradientSelection select_subgradient(const EnergyModel& model, const GridFunction& u, SelectionRule rule)
{
    require_admissible(model, u, "select_subgradient");
    std::optional<DualVector> smooth;
    if (rule == SelectionRule::nearest_to_residual) {
        smooth = smooth_gradient(model, u);
    }
    SubgradientSelection sel{std::vector<double>(u.size(), 0.0), rule};
    for (std::size_t k = 0; k < u.size(); ++k) {
        const ClarkeInterval c = clarke_interval(model.j(), model.site(k), u[k]);
        switch (rule) {
        case SelectionRule::lo:
            sel.values[k] = c.lo;
            break;
        case SelectionRule::hi:
            sel.values[k] = c.hi;
            break;
        case SelectionRule::midpoint:
            sel.values[k] = 0.5 * (c.lo + c.hi);
            break;
        case SelectionRule::nearest_to_residual:
            sel.values[k] = model.grid()->is_boundary(k) ? c.clamp(0.0) : c.clamp(needed_slope(model, *smooth, k));
            break;
        }
    }
    return sel;
}

ResidualReport residual(const EnergyModel& model, const GridFunction& u, const SubgradientSelection& selection)
{
    const DualVector smooth = smooth_gradient(model, u);
    if (selection.values.size() != u.size()) {
        throw ConstructionError("selection size does not match the grid");
    }
    const Grid& grid = *model.grid();
    const auto w = grid.node_weights();
    const std::vector<double> diag = stiffness_diagonal(grid);

    ResidualReport report{DualVector(model.grid()), 0.0, std::vector<double>(u.size(), 0.0), 0.0};
    CompensatedSum m2;
    for (std::size_t k : grid.interior_nodes()) {
        const ClarkeInterval c = clarke_interval(model.j(), model.site(k), u[k]);
        const double v = selection.values[k];
        if (!c.contains(v, 1e-12 * (1.0 + std::abs(v)))) {
            throw ConstructionError("selection leaves the Clarke interval");
        }
        const double r = smooth[k] - w[k] * v;
        report.residual[k] = r;
        m2.add(r * r / diag[k]);
        report.gap[k] = c.distance(needed_slope(model, smooth, k));
        report.max_gap = std::max(report.max_gap, report.gap[k]);
    }
    report.m_estimate = std::sqrt(m2.value());
    return report;
}

ResidualReport residual(const EnergyModel& model, const GridFunction& u)
{
    return residual(model, u, select_subgradient(model, u, SelectionRule::nearest_to_residual));
}

namespace {

/// Monotone growth of the second half of a sequence by at least `factor`.
bool grows(const std::vector<double>& s, double factor)
{
    if (s.size() < 2) {
        return false;
    }
    const std::size_t start = s.size() / 2;
    for (std::size_t i = start + 1; i < s.size(); ++i) {
        if (!(s[i] > s[i - 1])) {
            return false;
        }
    }
    const double first = std::max(std::abs(s.front()), 1e-300);
    return std::abs(s.back()) >= factor * first;
}

} // namespace

PsReport ps_diagnostics(const EnergyModel& model, const std::vector<GridFunction>& sequence, const PsOptions& options)
{
    if (sequence.size() < 2) {
        throw ConstructionError("PS diagnostics need at least two iterates");
    }
    PsReport report;
    for (std::size_t n = 0; n < sequence.size(); ++n) {
        const GridFunction& u = sequence[n];
        report.R.push_back(eval_R(model, u));
        report.m.push_back(residual(model, u).m_estimate);
        report.norm.push_back(sobolev_norm(u, model.p()));
        if (n > 0) {
            report.increments.push_back(sobolev_norm(u - sequence[n - 1], model.p()));
        }
    }
    std::vector<double> abs_R;
    for (double r : report.R) {
        abs_R.push_back(std::abs(r));
    }
    report.R_bounded = !grows(abs_R, options.growth_factor);
    report.m_vanishing = report.m.back() <= options.m_tol;
    report.norm_unbounded = grows(report.norm, options.growth_factor);

    const std::size_t tail = std::max<std::size_t>(1, report.increments.size() / 3);
    double worst = 0.0;
    for (std::size_t i = report.increments.size() - tail; i < report.increments.size(); ++i) {
        worst = std::max(worst, report.increments[i]);
    }
    report.cauchy_tail = worst <= options.cauchy_tol * std::max(1.0, report.norm.back());
    return report;
}

double default_theta(const EnergyModel& model, int dimension)
{
    const double pp = model.p().p_plus();
    const double p_hat = sobolev_conjugate(model.p().p_minus(), dimension);
    if (std::isfinite(p_hat)) {
        return p_hat > pp ? 0.5 * (pp + p_hat) : p_hat;
    }
    double r_plus = pp + 1.0;
    if (const auto& g = model.j().growth()) {
        for (double v : model.p().values()) {
            r_plus = std::max(r_plus, g->r(Site{v}));
        }
    }
    return r_plus;
}

GeometryBoundReport check_geometry_bound(const EnergyModel& model, double lambda_star, double mu, double theta,
                                         const std::vector<GridFunction>& fit, const std::vector<GridFunction>& check,
                                         double t_max)
{
    const ExponentField& p = model.p();
    const double pp = p.p_plus();
    const double pm = p.p_minus();
    if (!(theta > pp)) {
        throw ConstructionError("geometry exponent theta must exceed p+");
    }
    if (!(mu > 0.0)) {
        throw ConstructionError("geometry bound needs mu > 0");
    }
    GeometryBoundReport report;
    report.theta = theta;
    report.beta1 = model.lambda() > 0.0 ? std::min(1.0 / pp - model.lambda() / (lambda_star * pm), 0.5 * mu)
                                        : std::min(1.0 / pp, 0.5 * mu);

    const AuditSampling sites = sampling_for(p, 1);
    const int per_decade = 16;
    const int top = static_cast<int>(std::ceil(std::log10(t_max) * per_decade));
    for (const Site& x : sites.sites) {
        for (int k = -8 * per_decade; k <= top; ++k) {
            const double m = std::pow(10.0, static_cast<double>(k) / per_decade);
            for (const double t : {m, -m}) {
                const double excess = model.j().value(x, t) + 0.5 * mu * std::pow(m, x.p);
                report.gamma = std::max(report.gamma, excess / std::pow(m, theta));
            }
        }
    }

    const auto theta_norm = [&](const GridFunction& u) {
        const auto w = u.grid()->node_weights();
        CompensatedSum s;
        for (std::size_t k = 0; k < u.size(); ++k) {
            s.add(w[k] * std::pow(std::abs(u[k]), theta));
        }
        return std::pow(s.value(), 1.0 / theta);
    };
    for (const GridFunction& u : fit) {
        const double n = phi_luxemburg_norm(u, p);
        if (n > 0.0) {
            report.varrho = std::max(report.varrho, theta_norm(u) / n);
        }
    }
    report.beta2 = report.gamma * std::pow(report.varrho, theta);

    report.worst_slack = std::numeric_limits<double>::infinity();
    for (const GridFunction& u : check) {
        const double n = phi_luxemburg_norm(u, p);
        if (!(n > 0.0) || !(n < 1.0)) {
            continue;
        }
        const double r = eval_R(model, u);
        const double slack = r - (report.beta1 * std::pow(n, pp) - report.beta2 * std::pow(n, theta));
        ++report.checked;
        report.worst_slack = std::min(report.worst_slack, slack);
        if (slack < -1e-12 * (1.0 + std::abs(r))) {
            ++report.violations;
        }
    }
    return report;
}

} // namespace vexp
