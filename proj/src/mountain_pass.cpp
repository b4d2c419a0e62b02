#include "vexp/mountain_pass.hpp"

#include "vexp/common.hpp"
#include "vexp/modular.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vexp {

namespace {

GridFunction scaled_to(const GridFunction& d, double rho, const ExponentField& p)
{
    const double n = sobolev_norm(d, p);
    return (rho / n) * d;
}

/// Projected descent of R on the sphere ||u|| = rho.
std::pair<GridFunction, double> refine_on_sphere(const EnergyModel& model, GridFunction u, double R, double rho,
                                                 const LaplacePreconditioner& precond, int steps)
{
    double s = 0.1 * rho;
    for (int it = 0; it < steps; ++it) {
        const ResidualReport rep = residual(model, u);
        GridFunction d = -1.0 * precond.apply(rep.residual);
        const double dn = sobolev_norm(d, model.p());
        if (dn == 0.0) {
            break;
        }
        d *= 1.0 / dn;
        bool moved = false;
        for (int h = 0; h < 30 && !moved; ++h, s *= 0.5) {
            GridFunction trial = scaled_to(u + s * d, rho, model.p());
            const double Rt = eval_R(model, trial);
            if (Rt < R) {
                u = std::move(trial);
                R = Rt;
                moved = true;
            }
        }
        if (!moved) {
            break;
        }
        s *= 4.0;
        s = std::min(s, rho);
    }
    return {std::move(u), R};
}

} // namespace

GeometryCertificate verify_geometry(const EnergyModel& model, const GeometryOptions& options)
{
    if (options.rho_grid.empty() || options.samples_per_sphere < 1) {
        throw ConstructionError("geometry check needs a rho grid and at least one sample per sphere");
    }
    const GridPtr& grid = model.grid();
    const LaplacePreconditioner precond(grid);
    Rng rng(options.seed);
    std::vector<GridFunction> directions{first_eigenvector(grid)};
    for (int s = 1; s < options.samples_per_sphere; ++s) {
        directions.push_back(random_zero_trace(grid, rng));
    }

    GeometryCertificate cert;
    double best = -std::numeric_limits<double>::infinity();
    for (double rho : options.rho_grid) {
        if (!(rho > 0.0)) {
            throw ConstructionError("sphere radii must be positive");
        }
        std::vector<std::pair<double, std::size_t>> ranked;
        std::vector<GridFunction> points;
        for (std::size_t i = 0; i < directions.size(); ++i) {
            points.push_back(scaled_to(directions[i], rho, model.p()));
            ranked.emplace_back(eval_R(model, points.back()), i);
            ++cert.samples_used;
        }
        std::sort(ranked.begin(), ranked.end());
        double inf_R = ranked.front().first;
        const auto starts = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(options.refine_starts));
        for (std::size_t r = 0; r < starts; ++r) {
            const auto [u, R] = refine_on_sphere(model, points[ranked[r].second], ranked[r].first, rho, precond,
                                                 options.refine_steps);
            inf_R = std::min(inf_R, R);
        }
        cert.spheres.push_back({rho, inf_R});
        if (inf_R > 0.0 && inf_R > best) {
            best = inf_R;
            cert.rho = rho;
            cert.eta = inf_R;
        }
    }
    if (!(best > 0.0)) {
        throw GeometryNotFound("no sampled sphere has a positive infimum of R; lower lambda or check the local negativity audit (Hj_iv)");
    }
    cert.valid = true;
    return cert;
}

void attach_far_point(GeometryCertificate& cert, const EnergyModel& model, const GridFunction& u_bar)
{
    cert.R_far = eval_R(model, u_bar);
    cert.valid = cert.eta > std::max(0.0, cert.R_far);
}

GridFunction find_far_point(const EnergyModel& model, const GridFunction& u0, double rho, double t_max)
{
    if (u0.is_zero() || !u0.zero_trace()) {
        throw ConstructionError("far point scan needs a non-zero zero-trace profile");
    }
    for (double t = 1.0; t <= t_max; t *= 2.0) {
        GridFunction u = t * u0;
        if (eval_R(model, u) <= 0.0 && sobolev_norm(u, model.p()) > rho) {
            return u;
        }
    }
    throw FarPointNotFound("R(t u0) stays positive up to t_max; the potential may not be superlinear "
                           "(raise t_max or change the profile)");
}

GridFunction far_point_from_audit(const EnergyModel& model, const GridFunction& u_bar)
{
    HypothesisAudit audit = audit_far_point(model.j(), u_bar, model.lambda(), model.p());
    if (!audit.passed()) {
        throw AuditFailure("configured far point fails the far-point hypothesis", std::move(audit));
    }
    return u_bar;
}

namespace {

struct NewtonState {
    const EnergyModel& model;
    std::vector<int> pin;            // breakpoint index or -1
    std::vector<std::size_t> piece;  // piece followed by a free node

    /// Pointwise residual (Au)_k / w_k - lambda |u|^(p-2) u - j'(u) on free nodes.
    std::vector<double> residual(const GridFunction& u) const
    {
        const DualVector s = smooth_gradient(model, u);
        const auto w = model.grid()->node_weights();
        std::vector<double> f(u.size(), 0.0);
        for (std::size_t k : model.grid()->interior_nodes()) {
            if (pin[k] < 0) {
                f[k] = s[k] / w[k] - model.j().pieces()[model.j().piece_index(u[k])].slope(model.site(k), u[k]);
            }
        }
        return f;
    }

    Eigen::SparseMatrix<double> jacobian(const GridFunction& u) const
    {
        const Grid& grid = *model.grid();
        Eigen::SparseMatrix<double> J = jacobian_A(u, model.p());
        const auto w = grid.node_weights();
        const auto interior = grid.interior_nodes();
        std::vector<double> row_scale(interior.size());
        std::vector<char> pinned(interior.size(), 0);
        for (std::size_t i = 0; i < interior.size(); ++i) {
            const std::size_t k = interior[i];
            row_scale[i] = 1.0 / w[k];
            pinned[i] = pin[k] >= 0 ? 1 : 0;
        }
        for (int c = 0; c < J.outerSize(); ++c) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(J, c); it; ++it) {
                const auto r = static_cast<std::size_t>(it.row());
                it.valueRef() = (pinned[r] || pinned[static_cast<std::size_t>(c)]) ? 0.0 : it.value() * row_scale[r];
            }
        }
        for (std::size_t i = 0; i < interior.size(); ++i) {
            const std::size_t k = interior[i];
            const auto ii = static_cast<Eigen::Index>(i);
            if (pinned[i]) {
                J.coeffRef(ii, ii) = 1.0;
                continue;
            }
            const Site x = model.site(k);
            const double t = u[k];
            double lam = 0.0;
            if (model.lambda() != 0.0) {
                if (x.p == 2.0) {
                    lam = model.lambda();
                } else if (t != 0.0) {
                    lam = model.lambda() * (x.p - 1.0) * std::pow(std::abs(t), x.p - 2.0);
                }
            }
            double curv = model.j().pieces()[model.j().piece_index(t)].curvature(x, t);
            if (!std::isfinite(curv)) {
                curv = 0.0;
            }
            J.coeffRef(ii, ii) -= lam + curv;
        }
        return J;
    }
};

double merit(const std::vector<double>& f)
{
    CompensatedSum s;
    for (double v : f) {
        s.add(v * v);
    }
    return s.value();
}

double max_abs(const std::vector<double>& f)
{
    double m = 0.0;
    for (double v : f) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

} // namespace

NewtonResult newton_polish(const EnergyModel& model, const GridFunction& u0, const NewtonOptions& options)
{
    require_same_grid(model.grid(), u0.grid(), "newton_polish");
    const Grid& grid = *model.grid();
    const PiecewisePotential& j = model.j();
    const auto bps = j.breakpoints();
    const auto interior = grid.interior_nodes();

    GridFunction u = u0;
    NewtonState state{model, std::vector<int>(u.size(), -1), std::vector<std::size_t>(u.size(), 0)};
    std::vector<int> switches(u.size(), 0);
    std::vector<int> releases(u.size(), 0);
    for (std::size_t k : interior) {
        state.piece[k] = j.piece_index(u[k]);
    }

    NewtonResult result{u, false, 0, 0, 0.0, 0.0};
    bool settled = false;
    for (int round = 0; round < options.max_rounds && !settled; ++round) {
        bool solved = false;
        int stalled = 0;
        for (int it = 0; it < options.max_iters; ++it) {
            ++result.iterations;
            for (std::size_t k : interior) {
                if (state.pin[k] >= 0) {
                    continue;
                }
                const std::size_t np = j.piece_index(u[k]);
                if (np == state.piece[k]) {
                    continue;
                }
                ++switches[k];
                const std::size_t lo = std::min(np, state.piece[k]);
                if (switches[k] > options.pin_after && releases[k] < 2 && std::max(np, state.piece[k]) == lo + 1) {
                    state.pin[k] = static_cast<int>(lo);
                    u[k] = bps[lo];
                }
                state.piece[k] = np;
            }
            std::vector<double> f = state.residual(u);
            const double phi = merit(f);
            if (max_abs(f) <= options.tol) {
                solved = true;
                break;
            }
            const Eigen::SparseMatrix<double> J = state.jacobian(u);
            Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
            lu.compute(J);
            if (lu.info() != Eigen::Success) {
                break;
            }
            Eigen::VectorXd rhs(static_cast<Eigen::Index>(interior.size()));
            for (std::size_t i = 0; i < interior.size(); ++i) {
                rhs[static_cast<Eigen::Index>(i)] = -f[interior[i]];
            }
            const Eigen::VectorXd dx = lu.solve(rhs);
            if (lu.info() != Eigen::Success || !dx.allFinite()) {
                break;
            }
            const GridFunction step = from_interior(model.grid(), dx);
            double t = 1.0;
            GridFunction trial = u + step;
            bool decreased = false;
            for (int h = 0; h < 30 && !decreased; ++h) {
                trial = u;
                trial.axpy(t, step);
                decreased = merit(state.residual(trial)) < (1.0 - 1e-4 * t) * phi;
                t *= 0.5;
            }
            // A failed line search right after a piece switch is expected;
            // repeated failures mean the start is outside the Newton basin.
            stalled = decreased ? 0 : stalled + 1;
            u = std::move(trial);
            if (stalled > options.pin_after + 2) {
                break;
            }
        }

        // Release pinned nodes whose needed slope left the Clarke interval.
        bool released = false;
        if (solved) {
            const DualVector s = smooth_gradient(model, u);
            const auto w = grid.node_weights();
            for (std::size_t k : interior) {
                if (state.pin[k] < 0) {
                    continue;
                }
                const auto b = static_cast<std::size_t>(state.pin[k]);
                const Site x = model.site(k);
                const double g = s[k] / w[k];
                const ClarkeInterval c = clarke_interval(j, x, bps[b]);
                if (c.contains(g, options.tol)) {
                    continue;
                }
                const double left = j.pieces()[b].slope(x, bps[b]);
                const double right = j.pieces()[b + 1].slope(x, bps[b]);
                const double nudge = 10.0 * PiecewisePotential::breakpoint_tolerance;
                u[k] = std::abs(left - g) < std::abs(right - g) ? bps[b] - nudge : bps[b] + nudge;
                state.pin[k] = -1;
                state.piece[k] = j.piece_index(u[k]);
                switches[k] = 0;
                ++releases[k];
                released = true;
            }
        }
        settled = solved && !released;
    }

    const ResidualReport rep = residual(model, u);
    result.u = u;
    result.pinned = static_cast<std::size_t>(std::count_if(state.pin.begin(), state.pin.end(), [](int b) { return b >= 0; }));
    result.max_gap = rep.max_gap;
    result.m_estimate = rep.m_estimate;
    result.converged = settled && all_finite(u.values());
    return result;
}

namespace {

struct PathMax {
    std::size_t index = 0;
    double value = -std::numeric_limits<double>::infinity();
};

PathMax path_max(const EnergyModel& model, const std::vector<GridFunction>& path, const std::vector<double>& R)
{
    PathMax best;
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        if (R[i] > best.value) {
            best = {i, R[i]};
        }
    }
    // Ties: deform the node with the largest m estimate.
    double best_m = -1.0;
    std::size_t chosen = best.index;
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        if (R[i] >= best.value - 1e-12) {
            const double m = residual(model, path[i]).m_estimate;
            if (m > best_m) {
                best_m = m;
                chosen = i;
            }
        }
    }
    return {chosen, best.value};
}

double interior_max(const std::vector<double>& R)
{
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < R.size(); ++i) {
        m = std::max(m, R[i]);
    }
    return m;
}

std::vector<GridFunction> redistribute(const std::vector<GridFunction>& path, const ExponentField& p)
{
    const std::size_t n = path.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        cum[i] = cum[i - 1] + sobolev_norm(path[i] - path[i - 1], p);
    }
    std::vector<GridFunction> out{path.front()};
    std::size_t seg = 1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double target = cum.back() * static_cast<double>(i) / static_cast<double>(n - 1);
        while (seg + 1 < n && cum[seg] < target) {
            ++seg;
        }
        const double len = cum[seg] - cum[seg - 1];
        const double t = len > 0.0 ? std::clamp((target - cum[seg - 1]) / len, 0.0, 1.0) : 0.0;
        GridFunction v = path[seg - 1];
        v *= 1.0 - t;
        v.axpy(t, path[seg]);
        out.push_back(std::move(v));
    }
    out.push_back(path.back());
    return out;
}

} // namespace

MountainPassResult minimax_solve(const EnergyModel& model, const GridFunction& u_bar, const GeometryCertificate& geometry,
                                 const MinimaxOptions& options)
{
    require_same_grid(model.grid(), u_bar.grid(), "minimax_solve");
    if (options.path_nodes < 3) {
        throw ConstructionError("a path needs at least 3 nodes");
    }
    const double R_far = eval_R(model, u_bar);
    if (options.check_preconditions) {
        if (!(geometry.eta > 0.0)) {
            throw ConstructionError("minimax needs a geometry certificate with eta > 0");
        }
        if (R_far > 0.0) {
            throw ConstructionError("far point has R > 0");
        }
        if (!(sobolev_norm(u_bar, model.p()) > geometry.rho)) {
            throw ConstructionError("far point lies inside the sphere of radius rho");
        }
    }

    const auto n = static_cast<std::size_t>(options.path_nodes);
    const Grid& grid = *model.grid();
    const LaplacePreconditioner precond(model.grid());
    const Eigen::SparseMatrix<double> K = stiffness_matrix(grid);
    std::vector<GridFunction> path;
    std::vector<double> R;
    for (std::size_t i = 0; i < n; ++i) {
        path.push_back((static_cast<double>(i) / static_cast<double>(n - 1)) * u_bar);
        R.push_back(i == 0 ? 0.0 : eval_R(model, path.back()));
    }
    path.back() = u_bar;
    R.back() = R_far;

    // Every path from 0 to u_bar passes the level c, so a finely sampled
    // maximum of the initial segment bounds the mountain-pass level.
    double level_bound = 0.0;
    for (int i = 1; i < 8 * options.path_nodes; ++i) {
        level_bound = std::max(level_bound, eval_R(model, (static_cast<double>(i) / (8.0 * options.path_nodes)) * u_bar));
    }

    MountainPassResult result{GridFunction::zeros(model.grid()), 0.0, 0.0, 0.0, geometry, {}, {}, {}, false, false, 0, ""};
    result.geometry.R_far = R_far;
    result.geometry.valid = geometry.eta > std::max(0.0, R_far);

    const double eta_tol = 1e-8 * (1.0 + std::abs(geometry.eta));
    std::vector<double> step(n, 1.0);
    std::optional<GridFunction> polished;
    for (int iter = 1; iter <= options.max_iters; ++iter) {
        result.iterations = iter;
        const PathMax top = path_max(model, path, R);
        const ResidualReport top_rep = residual(model, path[top.index]);
        if (top_rep.m_estimate <= options.tol && top_rep.max_gap <= options.certify_tol) {
            result.converged = true;
            break;
        }

        // Descent of every interior node with the tangential component
        // removed (stiffness inner product), so nodes cannot slide along the
        // path across the ridge.
        const std::vector<GridFunction> frozen = path;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const GridFunction& u = frozen[i];
            const ResidualReport rep = i == top.index ? top_rep : residual(model, u);
            GridFunction d = -1.0 * precond.apply(rep.residual);
            const GridFunction tangent = frozen[i + 1] - frozen[i - 1];
            const Eigen::VectorXd tv = to_interior(grid, tangent.values());
            const Eigen::VectorXd Ktv = K * tv;
            const double tt = tv.dot(Ktv);
            if (tt > 0.0) {
                d.axpy(-to_interior(grid, d.values()).dot(Ktv) / tt, tangent);
            }
            const double slope = rep.residual.pair(d);
            const double dn = sobolev_norm(d, model.p());
            if (!(dn > 0.0) || !(slope < 0.0)) {
                continue;
            }
            const double spacing = std::min(sobolev_norm(frozen[i + 1] - u, model.p()),
                                            sobolev_norm(frozen[i - 1] - u, model.p()));
            const double cap = 0.5 * std::max(spacing, 1e-12) / dn;
            double s = std::min(2.0 * step[i], cap);
            for (int h = 0; h < 40; ++h, s *= 0.5) {
                GridFunction trial = u;
                trial.axpy(s, d);
                const double Rt = eval_R(model, trial);
                if (Rt <= R[i] + options.armijo * s * slope) {
                    path[i] = std::move(trial);
                    R[i] = Rt;
                    step[i] = s;
                    break;
                }
            }
        }
        result.path_history.push_back(interior_max(R));

        if (iter % options.redistribute_every == 0) {
            std::vector<GridFunction> moved = redistribute(path, model.p());
            std::vector<double> R_moved(n);
            R_moved.front() = R.front();
            R_moved.back() = R.back();
            for (std::size_t i = 1; i + 1 < n; ++i) {
                R_moved[i] = eval_R(model, moved[i]);
            }
            if (interior_max(R_moved) <= interior_max(R) + 1e-12) {
                path = std::move(moved);
                R = std::move(R_moved);
            }
            result.iterates.push_back(path[path_max(model, path, R).index]);
        }

        if (options.polish_every > 0 && iter % options.polish_every == 0) {
            const PathMax now = path_max(model, path, R);
            const NewtonResult nr = newton_polish(model, path[now.index], options.newton);
            if (nr.converged && nr.max_gap <= options.certify_tol && nr.m_estimate <= options.tol) {
                const double Rp = eval_R(model, nr.u);
                const bool nontrivial = Rp >= geometry.eta - eta_tol && sobolev_norm(nr.u, model.p()) >= 0.5 * geometry.rho;
                if (nontrivial && Rp <= level_bound + 1e-8 * (1.0 + std::abs(level_bound))) {
                    polished = nr.u;
                    result.polished = true;
                    result.converged = true;
                    break;
                }
            }
        }
    }

    const PathMax top = path_max(model, path, R);
    result.u_candidate = polished ? *polished : path[top.index];
    const ResidualReport rep = residual(model, result.u_candidate);
    result.m_estimate = rep.m_estimate;
    result.max_gap = rep.max_gap;
    result.c_estimate = polished ? eval_R(model, *polished) : interior_max(R);
    result.path = std::move(path);
    if (result.converged) {
        const double Ru = eval_R(model, result.u_candidate);
        result.converged = rep.m_estimate <= options.tol && rep.max_gap <= options.certify_tol
                           && Ru >= geometry.eta - eta_tol;
    }
    result.status = result.converged ? "converged"
                                     : "not converged after " + std::to_string(result.iterations) + " iterations";
    return result;
}

Certification certify_solution(const EnergyModel& model, const GridFunction& u, double tol)
{
    require_same_grid(model.grid(), u.grid(), "certify_solution");
    Certification cert{ResidualReport{DualVector(model.grid()), 0.0, {}, 0.0}, false, false, u.zero_trace()};
    GridFunction v = u;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (model.grid()->is_boundary(k)) {
            v[k] = 0.0;
        }
    }
    cert.report = residual(model, v);
    cert.trivial = v.is_zero();
    cert.pass = cert.boundary_zero && cert.report.max_gap <= tol;
    return cert;
}

} // namespace vexp
