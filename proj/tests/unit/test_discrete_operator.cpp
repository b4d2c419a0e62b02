#include "vexp/discrete_operator.hpp"
#include "vexp/modular.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace vexp;

namespace {

GridFunction perturb(const GridFunction& u, double s, const GridFunction& v)
{
    GridFunction w = u;
    w.axpy(s, v);
    return w;
}

} // namespace

TEST_CASE("gradient of linear interpolants")
{
    const GridPtr g = build_grid(2, {{0.0, 1.0}, {0.0, 2.0}}, {5, 7});
    const GridFunction u = GridFunction::sample(g, [](std::span<const double> x) { return 3.0 * x[0] - 0.5 * x[1]; });
    const CellField grad = gradient(u);
    CHECK(grad.size() == g->elements().size());
    for (std::size_t e = 0; e < grad.size(); ++e) {
        CHECK(grad[e][0] == doctest::Approx(3.0));
        CHECK(grad[e][1] == doctest::Approx(-0.5));
    }
}

TEST_CASE("hat function operator values")
{
    const GridPtr g = build_grid(1, {{0.0, 1.0}}, {5});
    const GridFunction u = function_from_preset(g, "hat(1)");
    const ExponentField p = ExponentField::constant(g, 2.0);
    CHECK(apply_A(u, p).pair(u) == doctest::Approx(4.0));
    CHECK(energy_J(u, p) == doctest::Approx(2.0));
    CHECK(apply_A(GridFunction::zeros(g), p).pair(u) == 0.0);
}

TEST_CASE("p = 2 operator equals the stiffness matrix")
{
    for (const GridPtr& g : {build_grid(1, {{0, 1}}, {21}), build_grid(2, {{0, 1}, {0, 1}}, {9, 11})}) {
        Rng rng(3);
        const GridFunction u = random_zero_trace(g, rng);
        const ExponentField p = ExponentField::constant(g, 2.0);
        const Eigen::VectorXd ku = stiffness_matrix(*g) * to_interior(*g, u.values());
        const Eigen::VectorXd au = to_interior(*g, apply_A(u, p).values());
        CHECK((ku - au).norm() <= 1e-12 * ku.norm());
        const std::vector<double> diag = stiffness_diagonal(*g);
        const LaplacePreconditioner pre(g);
        for (std::size_t k = 0; k < diag.size(); ++k) {
            CHECK(diag[k] == pre.diagonal()[k]);
        }
        const GridFunction back = pre.apply(apply_A(u, p));
        for (std::size_t k = 0; k < u.size(); ++k) {
            CHECK(back[k] == doctest::Approx(u[k]).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("2D stiffness is the 5-point Laplacian")
{
    const GridPtr g = build_grid(2, {{0, 1}, {0, 1}}, {6, 6});
    const Eigen::SparseMatrix<double> k = stiffness_matrix(*g);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(k);
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
        CHECK(dense(i, i) == doctest::Approx(4.0));
        int off = 0;
        for (Eigen::Index j = 0; j < dense.cols(); ++j) {
            if (i != j && dense(i, j) != 0.0) {
                CHECK(dense(i, j) == doctest::Approx(-1.0));
                ++off;
            }
        }
        CHECK(off <= 4);
    }
}

TEST_CASE("operator consistency, derivative and monotonicity")
{
    Rng rng(17);
    for (const char* preset : {"constant(2)", "linear(1.6,1.5)", "sin(2.5,1)"}) {
        for (const GridPtr& g : {build_grid(1, {{0, 1}}, {41}), build_grid(2, {{0, 1}, {0, 1}}, {11, 11})}) {
            const ExponentField p = exponent_from_preset(g, preset);
            for (int trial = 0; trial < 5; ++trial) {
                const GridFunction u = random_zero_trace(g, rng);
                const GridFunction v = random_zero_trace(g, rng);
                const double direct = gradient_modular(u, p);
                CHECK(std::abs(apply_A(u, p).pair(u) - direct) <= 1e-12 * std::max(1.0, direct));

                const double h = 1e-6;
                const double fd = (energy_J(perturb(u, h, v), p) - energy_J(perturb(u, -h, v), p)) / (2.0 * h);
                const double exact = apply_A(u, p).pair(v);
                CHECK(std::abs(fd - exact) <= 1e-5 * std::max(1.0, std::abs(exact)));

                const double mono = apply_A(u, p).pair(u - v) - apply_A(v, p).pair(u - v);
                CHECK(mono > 0.0);
            }
        }
    }
}

TEST_CASE("weighted operator is the derivative of the gradient modular")
{
    const GridPtr g = build_grid(1, {{0, 1}}, {33});
    const ExponentField p = exponent_from_preset(g, "linear(1.5,2)");
    Rng rng(9);
    const GridFunction u = random_zero_trace(g, rng);
    const GridFunction v = random_zero_trace(g, rng);
    const double h = 1e-6;
    const double fd = (gradient_modular(perturb(u, h, v), p) - gradient_modular(perturb(u, -h, v), p)) / (2.0 * h);
    CHECK(apply_A_weighted(u, p).pair(v) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("Jacobian matches finite differences of the operator")
{
    const GridPtr g = build_grid(2, {{0, 1}, {0, 1}}, {8, 8});
    const ExponentField p = exponent_from_preset(g, "linear(2.2,1)");
    Rng rng(4);
    const GridFunction u = random_zero_trace(g, rng);
    const GridFunction v = random_zero_trace(g, rng);
    const Eigen::VectorXd jv = jacobian_A(u, p) * to_interior(*g, v.values());
    const double h = 1e-6;
    const Eigen::VectorXd fd = (to_interior(*g, apply_A(perturb(u, h, v), p).values())
                                - to_interior(*g, apply_A(perturb(u, -h, v), p).values()))
                               / (2.0 * h);
    CHECK((jv - fd).norm() <= 1e-5 * fd.norm());
}

TEST_CASE("operator rejects bad input")
{
    const GridPtr g = build_grid(1, {{0, 1}}, {9});
    GridFunction u = GridFunction::zeros(g);
    u[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(apply_A(u, ExponentField::constant(g, 2.0)), NonFiniteInput);
    CHECK_THROWS_AS(apply_A(GridFunction::zeros(g), ExponentField::constant(build_grid(1, {{0, 1}}, {7}), 2.0)),
                    GridMismatch);
    CHECK_THROWS_AS(rayleigh_quotient(GridFunction::zeros(g), ExponentField::constant(g, 2.0)), ConstructionError);
}

TEST_CASE("lambda_* for p = 2 matches the discrete eigenvalue")
{
    const GridPtr g = build_grid(1, {{0, 1}}, {34});
    const LambdaStarEstimate est = estimate_lambda_star(ExponentField::constant(g, 2.0));
    CHECK(est.converged);
    CHECK(est.per_start.size() == 5);
    const double oracle = vexp_test::laplacian_eigenvalue_1d(32);
    CHECK(est.value >= oracle * (1.0 - 1e-12));
    CHECK(est.value == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(rayleigh_quotient(est.witness, ExponentField::constant(g, 2.0)) == doctest::Approx(est.value));
}

TEST_CASE("lambda_* estimate is bounded by every sampled quotient")
{
    const GridPtr g = build_grid(1, {{0, 1}}, {33});
    const ExponentField p = exponent_from_preset(g, "linear(1.8,0.8)");
    const LambdaStarEstimate est = estimate_lambda_star(p, {.restarts = 2, .seed = 3});
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        GridFunction u = random_zero_trace(g, rng);
        u *= 1.0 / luxemburg_norm(u, p);
        CHECK(rayleigh_quotient(u, p) >= est.value);
    }
}

TEST_CASE("Poincare constant for p = 2")
{
    const GridPtr g = build_grid(1, {{0, 1}}, {33});
    const PoincareEstimate est = estimate_poincare(ExponentField::constant(g, 2.0));
    CHECK(est.constant == doctest::Approx(1.0 / std::sqrt(vexp_test::laplacian_eigenvalue_1d(31))).epsilon(1e-6));
}
