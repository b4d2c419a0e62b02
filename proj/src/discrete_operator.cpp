#include "vexp/discrete_operator.hpp"

#include "vexp/modular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace vexp {

CellField::CellField(GridPtr grid, std::vector<std::array<double, 2>> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (values_.size() != grid_->elements().size()) {
        throw ConstructionError("cell field size does not match the element count");
    }
}

double CellField::magnitude(std::size_t e) const noexcept { return std::hypot(values_[e][0], values_[e][1]); }

DualVector::DualVector(GridPtr grid) : grid_(std::move(grid)), values_(grid_->node_count(), 0.0) {}

DualVector::DualVector(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values))
{
    if (values_.size() != grid_->node_count()) {
        throw ConstructionError("dual vector size does not match the grid");
    }
}

double DualVector::pair(const GridFunction& v) const
{
    require_same_grid(grid_, v.grid(), "dual pairing");
    CompensatedSum s;
    for (std::size_t k : grid_->interior_nodes()) {
        s.add(values_[k] * v[k]);
    }
    return s.value();
}

CellField gradient(const GridFunction& u)
{
    const auto elements = u.grid()->elements();
    std::vector<std::array<double, 2>> g(elements.size(), {0.0, 0.0});
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const Element& el = elements[e];
        for (std::size_t a = 0; a < el.vertex_count; ++a) {
            const double ua = u[el.nodes[a]];
            g[e][0] += ua * el.basis_gradient[a][0];
            g[e][1] += ua * el.basis_gradient[a][1];
        }
    }
    return CellField(u.grid(), std::move(g));
}

namespace {

DualVector assemble_flux(const GridFunction& u, const ExponentField& p, bool weight_by_exponent)
{
    require_same_grid(u.grid(), p.grid(), "operator A");
    if (!all_finite(u.values())) {
        throw NonFiniteInput("operator A applied to non-finite values");
    }
    const Grid& grid = *u.grid();
    const CellField g = gradient(u);
    const auto pe = p.element_values();
    const auto elements = grid.elements();
    DualVector r(u.grid());
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const double mag = g.magnitude(e);
        if (mag == 0.0) {
            continue;
        }
        double w = std::pow(mag, pe[e] - 2.0) * elements[e].measure;
        if (weight_by_exponent) {
            w *= pe[e];
        }
        const Element& el = elements[e];
        for (std::size_t a = 0; a < el.vertex_count; ++a) {
            const std::size_t k = el.nodes[a];
            if (grid.is_boundary(k)) {
                continue;
            }
            r[k] += w * (g[e][0] * el.basis_gradient[a][0] + g[e][1] * el.basis_gradient[a][1]);
        }
    }
    if (!all_finite(r.values())) {
        throw NonFiniteInput("operator A produced non-finite values");
    }
    return r;
}

} // namespace

DualVector apply_A(const GridFunction& u, const ExponentField& p) { return assemble_flux(u, p, false); }

DualVector apply_A_weighted(const GridFunction& u, const ExponentField& p) { return assemble_flux(u, p, true); }

double energy_J(const GridFunction& u, const ExponentField& p)
{
    const ModularTerms terms = gradient_terms(u, p);
    CompensatedSum s;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double a = terms.magnitudes()[i];
        if (a != 0.0) {
            const double q = terms.exponents()[i];
            s.add(terms.weights()[i] * std::pow(a, q) / q);
        }
    }
    return s.value();
}

Eigen::VectorXd to_interior(const Grid& grid, std::span<const double> nodal)
{
    const auto interior = grid.interior_nodes();
    Eigen::VectorXd x(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t i = 0; i < interior.size(); ++i) {
        x[static_cast<Eigen::Index>(i)] = nodal[interior[i]];
    }
    return x;
}

GridFunction from_interior(const GridPtr& grid, const Eigen::VectorXd& interior)
{
    GridFunction u = GridFunction::zeros(grid);
    const auto nodes = grid->interior_nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        u[nodes[i]] = interior[static_cast<Eigen::Index>(i)];
    }
    return u;
}

namespace {

template <class WeightFn>
Eigen::SparseMatrix<double> assemble_interior(const Grid& grid, WeightFn&& element_matrix)
{
    std::vector<Eigen::Triplet<double>> triplets;
    const auto elements = grid.elements();
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const Element& el = elements[e];
        for (std::size_t a = 0; a < el.vertex_count; ++a) {
            const auto ia = grid.interior_position(el.nodes[a]);
            if (ia < 0) {
                continue;
            }
            for (std::size_t b = 0; b < el.vertex_count; ++b) {
                const auto ib = grid.interior_position(el.nodes[b]);
                if (ib < 0) {
                    continue;
                }
                triplets.emplace_back(static_cast<int>(ia), static_cast<int>(ib), element_matrix(e, a, b));
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(grid.interior_count());
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

} // namespace

Eigen::SparseMatrix<double> stiffness_matrix(const Grid& grid)
{
    const auto elements = grid.elements();
    return assemble_interior(grid, [&](std::size_t e, std::size_t a, std::size_t b) {
        const auto& ga = elements[e].basis_gradient[a];
        const auto& gb = elements[e].basis_gradient[b];
        return (ga[0] * gb[0] + ga[1] * gb[1]) * elements[e].measure;
    });
}

std::vector<double> stiffness_diagonal(const Grid& grid)
{
    std::vector<double> d(grid.node_count(), 0.0);
    for (const Element& el : grid.elements()) {
        for (std::size_t a = 0; a < el.vertex_count; ++a) {
            if (!grid.is_boundary(el.nodes[a])) {
                const auto& g = el.basis_gradient[a];
                d[el.nodes[a]] += (g[0] * g[0] + g[1] * g[1]) * el.measure;
            }
        }
    }
    return d;
}

Eigen::SparseMatrix<double> jacobian_A(const GridFunction& u, const ExponentField& p, double eps)
{
    require_same_grid(u.grid(), p.grid(), "Jacobian of A");
    const Grid& grid = *u.grid();
    const CellField g = gradient(u);
    const auto pe = p.element_values();
    const auto elements = grid.elements();
    return assemble_interior(grid, [&](std::size_t e, std::size_t a, std::size_t b) {
        const auto& ga = elements[e].basis_gradient[a];
        const auto& gb = elements[e].basis_gradient[b];
        const auto& ge = g[e];
        const double q = pe[e];
        const double r2 = ge[0] * ge[0] + ge[1] * ge[1];
        const double m = elements[e].measure;
        if (q == 2.0) {
            return (ga[0] * gb[0] + ga[1] * gb[1]) * m;
        }
        const double reg = r2 + eps * eps;
        const double w = std::pow(reg, 0.5 * (q - 2.0));
        const double w2 = (q - 2.0) * std::pow(reg, 0.5 * (q - 4.0));
        const double dot_a = ge[0] * ga[0] + ge[1] * ga[1];
        const double dot_b = ge[0] * gb[0] + ge[1] * gb[1];
        return (w * (ga[0] * gb[0] + ga[1] * gb[1]) + w2 * dot_a * dot_b) * m;
    });
}

LaplacePreconditioner::LaplacePreconditioner(GridPtr grid)
    : grid_(std::move(grid)), solver_(std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>())
{
    const Eigen::SparseMatrix<double> k = stiffness_matrix(*grid_);
    solver_->compute(k);
    if (solver_->info() != Eigen::Success) {
        throw Error("stiffness factorization failed");
    }
    diagonal_.assign(grid_->node_count(), 0.0);
    const auto interior = grid_->interior_nodes();
    for (std::size_t i = 0; i < interior.size(); ++i) {
        diagonal_[interior[i]] = k.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    }
}

GridFunction LaplacePreconditioner::apply(const DualVector& r) const
{
    require_same_grid(grid_, r.grid(), "preconditioner");
    const Eigen::VectorXd x = solver_->solve(to_interior(*grid_, r.values()));
    return from_interior(grid_, x);
}

double rayleigh_quotient(const GridFunction& u, const ExponentField& p)
{
    const double denom = modular(u, p);
    if (denom == 0.0) {
        throw ConstructionError("Rayleigh quotient of the zero function");
    }
    return gradient_modular(u, p) / denom;
}

namespace {

/// Derivative of u -> int |u|^p dx (nodal quadrature) as a dual vector.
DualVector modular_derivative(const GridFunction& u, const ExponentField& p)
{
    const Grid& grid = *u.grid();
    const auto w = grid.node_weights();
    DualVector d(u.grid());
    for (std::size_t k : grid.interior_nodes()) {
        d[k] = w[k] * p[k] * signed_power(u[k], p[k]);
    }
    return d;
}

GridFunction normalize_modular(GridFunction u, const ExponentField& p)
{
    const double s = luxemburg_norm(u, p);
    u *= 1.0 / s;
    return u;
}

struct DescentRun {
    double value;
    GridFunction u;
    bool converged;
    int iterations;
};

DescentRun minimize_quotient(GridFunction u, const ExponentField& p, const LaplacePreconditioner& precond,
                             const LambdaStarOptions& options)
{
    u = normalize_modular(std::move(u), p);
    double q = gradient_modular(u, p);
    double step = 1.0;
    int quiet = 0;
    for (int it = 1; it <= options.max_iters; ++it) {
        DualVector grad = apply_A_weighted(u, p);
        const DualVector dd = modular_derivative(u, p);
        for (std::size_t k : u.grid()->interior_nodes()) {
            grad[k] -= q * dd[k];
        }
        GridFunction dir = precond.apply(grad);
        dir *= -1.0;
        const double slope = grad.pair(dir);
        if (!(slope < 0.0)) {
            return {q, std::move(u), true, it};
        }
        bool accepted = false;
        step = std::min(step * 2.0, 1e6);
        while (step > 1e-20) {
            GridFunction trial = u;
            trial.axpy(step, dir);
            if (!trial.is_zero()) {
                trial = normalize_modular(std::move(trial), p);
                const double qt = gradient_modular(trial, p);
                if (qt < q) {
                    const double decrease = q - qt;
                    u = std::move(trial);
                    q = qt;
                    accepted = true;
                    quiet = decrease <= options.tol * q ? quiet + 1 : 0;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted || quiet >= 3) {
            return {q, std::move(u), true, it};
        }
    }
    return {q, std::move(u), false, options.max_iters};
}

} // namespace

LambdaStarEstimate estimate_lambda_star(const ExponentField& p, const LambdaStarOptions& options)
{
    if (options.restarts < 1) {
        throw ConstructionError("lambda_* estimation needs restarts >= 1");
    }
    const GridPtr& grid = p.grid();
    const LaplacePreconditioner precond(grid);
    std::optional<DescentRun> best;
    std::vector<double> per_start;
    bool any_converged = false;
    int iterations = 0;
    for (int r = 0; r <= options.restarts; ++r) {
        GridFunction start = first_eigenvector(grid);
        if (r > 0) {
            Rng rng(options.seed + static_cast<std::uint64_t>(r));
            start = random_zero_trace(grid, rng);
        }
        DescentRun run = minimize_quotient(std::move(start), p, precond, options);
        iterations += run.iterations;
        per_start.push_back(run.value);
        any_converged = any_converged || run.converged;
        if (!best || run.value < best->value) {
            best = std::move(run);
        }
    }
    if (!any_converged) {
        throw NonConvergence("lambda_* descent did not converge within the iteration cap", best->value);
    }
    return LambdaStarEstimate{best->value, std::move(best->u), true, iterations, std::move(per_start)};
}

namespace {

/// Gradient of a Luxemburg norm by implicit differentiation of
/// sum w (a/s)^p = 1, with da/du supplied as sparse (node, coefficient) pairs.
struct LuxemburgDerivative {
    double norm = 0.0;
    DualVector derivative;
};

LuxemburgDerivative function_norm_derivative(const GridFunction& u, const ExponentField& p)
{
    const ModularTerms terms = function_terms(u, p);
    const double s = terms.luxemburg();
    DualVector d(u.grid());
    double dg_ds = 0.0;
    const auto w = u.grid()->node_weights();
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u[k] == 0.0) {
            continue;
        }
        const double r = std::abs(u[k]) / s;
        dg_ds -= w[k] * p[k] * std::pow(r, p[k]) / s;
        if (!u.grid()->is_boundary(k)) {
            d[k] = w[k] * p[k] * std::pow(r, p[k] - 1.0) / s * std::copysign(1.0, u[k]);
        }
    }
    for (double& v : d.values()) {
        v = -v / dg_ds;
    }
    return {s, std::move(d)};
}

LuxemburgDerivative gradient_norm_derivative(const GridFunction& u, const ExponentField& p)
{
    const Grid& grid = *u.grid();
    const ModularTerms terms = gradient_terms(u, p);
    const double s = terms.luxemburg();
    const CellField g = gradient(u);
    const auto pe = p.element_values();
    const auto elements = grid.elements();
    DualVector d(u.grid());
    double dg_ds = 0.0;
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const double mag = g.magnitude(e);
        if (mag == 0.0) {
            continue;
        }
        const double r = mag / s;
        const double m = elements[e].measure;
        dg_ds -= m * pe[e] * std::pow(r, pe[e]) / s;
        const double coef = m * pe[e] * std::pow(r, pe[e] - 1.0) / s / mag;
        const Element& el = elements[e];
        for (std::size_t a = 0; a < el.vertex_count; ++a) {
            if (grid.is_boundary(el.nodes[a])) {
                continue;
            }
            d[el.nodes[a]] += coef * (g[e][0] * el.basis_gradient[a][0] + g[e][1] * el.basis_gradient[a][1]);
        }
    }
    for (double& v : d.values()) {
        v = -v / dg_ds;
    }
    return {s, std::move(d)};
}

double poincare_ratio(const GridFunction& u, const ExponentField& p)
{
    return luxemburg_norm(u, p) / gradient_luxemburg_norm(u, p);
}

} // namespace

PoincareEstimate estimate_poincare(const ExponentField& p, const PoincareOptions& options)
{
    const GridPtr& grid = p.grid();
    const LaplacePreconditioner precond(grid);
    std::optional<GridFunction> best_u;
    double best = -1.0;
    bool converged_any = false;
    int iterations = 0;
    for (int r = 0; r <= options.restarts; ++r) {
        GridFunction u = first_eigenvector(grid);
        if (r > 0) {
            Rng rng(options.seed + static_cast<std::uint64_t>(r));
            u = random_zero_trace(grid, rng);
        }
        u *= 1.0 / gradient_luxemburg_norm(u, p);
        double ratio = poincare_ratio(u, p);
        double step = 1.0;
        bool converged = false;
        int quiet = 0;
        for (int it = 1; it <= options.max_iters; ++it) {
            ++iterations;
            // Ascent on log(||u|| / ||grad u||).
            const LuxemburgDerivative fn = function_norm_derivative(u, p);
            const LuxemburgDerivative gr = gradient_norm_derivative(u, p);
            DualVector grad(grid);
            for (std::size_t k : grid->interior_nodes()) {
                grad[k] = fn.derivative[k] / fn.norm - gr.derivative[k] / gr.norm;
            }
            const GridFunction dir = precond.apply(grad);
            const double slope = grad.pair(dir);
            if (!(slope > 0.0)) {
                converged = true;
                break;
            }
            bool accepted = false;
            step = std::min(step * 2.0, 1e6);
            while (step > 1e-20) {
                GridFunction trial = u;
                trial.axpy(step, dir);
                const double gn = gradient_luxemburg_norm(trial, p);
                if (gn > 0.0) {
                    trial *= 1.0 / gn;
                    const double rt = poincare_ratio(trial, p);
                    if (rt > ratio) {
                        quiet = (rt - ratio) <= options.tol * rt ? quiet + 1 : 0;
                        ratio = rt;
                        u = std::move(trial);
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if (!accepted || quiet >= 3) {
                converged = true;
                break;
            }
        }
        converged_any = converged_any || converged;
        if (ratio > best) {
            best = ratio;
            best_u = u;
        }
    }
    return PoincareEstimate{best, std::move(*best_u), converged_any, iterations};
}

} // namespace vexp
