#pragma once

#include "vexp/audit.hpp"
#include "vexp/energy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vexp {

class GeometryNotFound : public Error {
public:
    using Error::Error;
};

class FarPointNotFound : public Error {
public:
    using Error::Error;
};

/// Thrown when a hypothesis required by the requested pipeline fails.
class AuditFailure : public Error {
public:
    AuditFailure(const std::string& what, HypothesisAudit audit) : Error(what), audit_(std::move(audit)) {}
    [[nodiscard]] const HypothesisAudit& audit() const noexcept { return audit_; }

private:
    HypothesisAudit audit_;
};

struct SphereSample {
    double rho = 0.0;
    /// Smallest R found on the sphere ||u|| = rho (an upper bound on the infimum).
    double inf_R = 0.0;
};

struct GeometryCertificate {
    double rho = 0.0;
    double eta = 0.0;
    /// R at the far point; 0 (= R(0)) until a far point is attached.
    double R_far = 0.0;
    int samples_used = 0;
    bool valid = false;
    std::vector<SphereSample> spheres;
};

struct GeometryOptions {
    std::vector<double> rho_grid{0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9};
    int samples_per_sphere = 16;
    /// Projected descent steps from the best few samples of each sphere.
    int refine_steps = 30;
    int refine_starts = 3;
    std::uint64_t seed = 11;
};

/// Samples R on Sobolev spheres (additive norm) and refines the minimum by
/// projected descent; picks the rho with the largest positive sampled inf.
/// Throws GeometryNotFound when no sphere has a positive sampled inf.
GeometryCertificate verify_geometry(const EnergyModel& model, const GeometryOptions& options = {});

/// Records R(u_bar) and revalidates eta > max{0, R_far}.
void attach_far_point(GeometryCertificate& cert, const EnergyModel& model, const GridFunction& u_bar);

/// Smallest doubling t in {1, 2, 4, ..., t_max} with R(t u0) <= 0 and
/// ||t u0|| > rho; returns t u0. Throws FarPointNotFound when exhausted.
GridFunction find_far_point(const EnergyModel& model, const GridFunction& u0, double rho, double t_max = 1024.0);

/// Far point supplied with the model: runs audit_far_point and returns u_bar
/// when it passes, else throws AuditFailure carrying the audit.
GridFunction far_point_from_audit(const EnergyModel& model, const GridFunction& u_bar);

struct NewtonOptions {
    int max_iters = 60;
    int max_rounds = 12;
    /// Pointwise residual target, in the units of the inclusion gap.
    double tol = 1e-11;
    /// Piece switches of one node before it is pinned at the breakpoint.
    int pin_after = 2;
};

struct NewtonResult {
    GridFunction u;
    bool converged = false;
    int iterations = 0;
    std::size_t pinned = 0;
    double max_gap = 0.0;
    double m_estimate = 0.0;
};

/// Active-set semismooth Newton for the inclusion. Each node follows the
/// smooth piece containing it; nodes that keep switching pieces are pinned
/// at the breakpoint and released when the needed slope leaves the Clarke
/// interval.
NewtonResult newton_polish(const EnergyModel& model, const GridFunction& u0, const NewtonOptions& options = {});

struct MinimaxOptions {
    int path_nodes = 17;
    int max_iters = 2000;
    /// Convergence target for the m estimate.
    double tol = 1e-8;
    /// Pointwise inclusion gap accepted by certification.
    double certify_tol = 1e-6;
    int redistribute_every = 10;
    /// 0 disables the Newton polish.
    int polish_every = 10;
    double armijo = 1e-4;
    /// Reject a far point with R > 0 or ||u_bar|| <= rho.
    bool check_preconditions = true;
    NewtonOptions newton{};
};

struct MountainPassResult {
    GridFunction u_candidate;
    double c_estimate = 0.0;
    double m_estimate = 0.0;
    double max_gap = 0.0;
    GeometryCertificate geometry;
    /// Max of R over the path after each iteration.
    std::vector<double> path_history;
    std::vector<GridFunction> path;
    /// Path maximum every redistribute_every iterations, for PS diagnostics.
    std::vector<GridFunction> iterates;
    bool converged = false;
    bool polished = false;
    int iterations = 0;
    std::string status;
};

/// Discretized path deformation between 0 and u_bar. Every iteration moves
/// each interior path node along the preconditioned negative residual with
/// its component along the path removed (Armijo step); the path is
/// redistributed by arc length and its maximum is periodically polished by
/// newton_polish. A polished point is accepted only at a level no higher than
/// the maximum over the initial straight path.
MountainPassResult minimax_solve(const EnergyModel& model, const GridFunction& u_bar, const GeometryCertificate& geometry,
                                 const MinimaxOptions& options = {});

struct Certification {
    ResidualReport report;
    bool pass = false;
    bool trivial = false;
    bool boundary_zero = false;
};

/// Pass iff every per-node gap <= tol and the boundary values are exactly 0.
Certification certify_solution(const EnergyModel& model, const GridFunction& u, double tol = 1e-6);

} // namespace vexp
