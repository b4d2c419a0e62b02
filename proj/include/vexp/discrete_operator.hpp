#pragma once

#include "vexp/exponent.hpp"
#include "vexp/grid_function.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace vexp {

/// One gradient vector per grid element.
class CellField {
public:
    CellField(GridPtr grid, std::vector<std::array<double, 2>> values);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] const std::array<double, 2>& operator[](std::size_t e) const { return values_[e]; }
    [[nodiscard]] double magnitude(std::size_t e) const noexcept;

private:
    GridPtr grid_;
    std::vector<std::array<double, 2>> values_;
};

/// Action of a functional on the nodal basis. Boundary entries are 0.
class DualVector {
public:
    explicit DualVector(GridPtr grid);
    DualVector(GridPtr grid, std::vector<double> values);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t node) const { return values_[node]; }
    [[nodiscard]] double& operator[](std::size_t node) { return values_[node]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    /// <this, v> over interior nodes, compensated and in node order.
    [[nodiscard]] double pair(const GridFunction& v) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Exact gradient of the piecewise-linear interpolant on every element.
CellField gradient(const GridFunction& u);

/// <Au, phi_k> = int |grad u|^(p-2) grad u . grad phi_k dx for interior k.
/// The flux is 0 where grad u = 0. Throws NonFiniteInput on non-finite data.
DualVector apply_A(const GridFunction& u, const ExponentField& p);

/// Same as apply_A with each element flux multiplied by its exponent; the
/// derivative of u -> int |grad u|^p dx.
DualVector apply_A_weighted(const GridFunction& u, const ExponentField& p);

/// J(u) = int (1/p) |grad u|^p dx
double energy_J(const GridFunction& u, const ExponentField& p);

/// Interior-node vector helpers (interior_nodes() order).
Eigen::VectorXd to_interior(const Grid& grid, std::span<const double> nodal);
GridFunction from_interior(const GridPtr& grid, const Eigen::VectorXd& interior);

/// p = 2 stiffness matrix on interior unknowns.
Eigen::SparseMatrix<double> stiffness_matrix(const Grid& grid);

/// Diagonal of stiffness_matrix() per node, 0 on the boundary.
std::vector<double> stiffness_diagonal(const Grid& grid);

/// Jacobian of u -> Au on interior unknowns. The degenerate weight at small
/// gradients is regularised as (|g|^2 + eps^2)^((p-2)/2).
Eigen::SparseMatrix<double> jacobian_A(const GridFunction& u, const ExponentField& p, double eps = 1e-10);

/// Solves with the p = 2 stiffness matrix; maps a dual vector to a
/// zero-trace function. Used to precondition descent directions.
class LaplacePreconditioner {
public:
    explicit LaplacePreconditioner(GridPtr grid);

    [[nodiscard]] GridFunction apply(const DualVector& r) const;
    /// Diagonal of the stiffness matrix per node (0 on the boundary).
    [[nodiscard]] std::span<const double> diagonal() const noexcept { return diagonal_; }
    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }

private:
    GridPtr grid_;
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> solver_;
    std::vector<double> diagonal_;
};

/// int |grad u|^p dx / int |u|^p dx for u != 0.
double rayleigh_quotient(const GridFunction& u, const ExponentField& p);

struct LambdaStarOptions {
    int restarts = 4;
    std::uint64_t seed = 1;
    int max_iters = 2000;
    /// Relative decrease of the quotient below which a start has converged.
    double tol = 1e-13;
};

struct LambdaStarEstimate {
    /// Running minimum over all starts; a discrete upper bound on lambda_*.
    double value = 0.0;
    GridFunction witness;
    bool converged = false;
    int iterations = 0;
    /// Converged quotient of each start: eigenvector start first.
    std::vector<double> per_start;
};

/// Thrown when no start converges within the iteration cap.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double best_so_far) : Error(what), best_so_far_(best_so_far) {}
    [[nodiscard]] double best_so_far() const noexcept { return best_so_far_; }

private:
    double best_so_far_;
};

/// Minimizes the Rayleigh quotient over zero-trace functions by
/// preconditioned projected descent on {phi(u) = 1}, from the sine start and
/// `restarts` random starts.
LambdaStarEstimate estimate_lambda_star(const ExponentField& p, const LambdaStarOptions& options = {});

struct PoincareOptions {
    int restarts = 2;
    std::uint64_t seed = 7;
    int max_iters = 400;
    double tol = 1e-12;
};

struct PoincareEstimate {
    /// max ||u||_p / ||grad u||_p found; a lower bound on the true constant.
    double constant = 0.0;
    GridFunction witness;
    bool converged = false;
    int iterations = 0;
};

PoincareEstimate estimate_poincare(const ExponentField& p, const PoincareOptions& options = {});

} // namespace vexp
