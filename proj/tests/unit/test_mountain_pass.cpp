#include "vexp/modular.hpp"
#include "vexp/mountain_pass.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace vexp;

namespace {

struct SmoothSetup {
    GridPtr grid = build_grid(1, {{0.0, 1.0}}, {33});
    EnergyModel model{ExponentField::constant(grid, 2.0), 0.0, make_quartic(1.0)};
};

} // namespace

TEST_CASE("geometry certificate for the smooth benchmark")
{
    const SmoothSetup s;
    const GeometryCertificate cert = verify_geometry(s.model);
    CHECK(cert.valid);
    CHECK(cert.eta > 0.0);
    CHECK(cert.rho > 0.0);
    CHECK(cert.spheres.size() == GeometryOptions{}.rho_grid.size());
    CHECK(cert.samples_used > 0);
    for (const SphereSample& sp : cert.spheres) {
        if (sp.rho == cert.rho) {
            CHECK(sp.inf_R == cert.eta);
        }
    }
}

TEST_CASE("geometry fails without local negativity")
{
    const GridPtr g = build_grid(1, {{0.0, 1.0}}, {17});
    // R = J - int |u|^2 with lambda = 0 is negative along the sine direction.
    const EnergyModel model(ExponentField::constant(g, 2.0), 0.0, make_power(20.0, 2.0));
    CHECK_THROWS_AS(verify_geometry(model), GeometryNotFound);
    CHECK_THROWS_AS(verify_geometry(model, {.rho_grid = {}}), ConstructionError);
}

TEST_CASE("far point search")
{
    const SmoothSetup s;
    const GridFunction u0 = function_from_preset(s.grid, "sine(1)");
    const GridFunction far = find_far_point(s.model, u0, 0.5);
    CHECK(eval_R(s.model, far) <= 0.0);
    CHECK(sobolev_norm(far, s.model.p()) > 0.5);
    CHECK_THROWS_AS(find_far_point(s.model, GridFunction::zeros(s.grid), 0.5), ConstructionError);

    const EnergyModel flat(ExponentField::constant(s.grid, 2.0), 0.0, make_zero());
    CHECK_THROWS_AS(find_far_point(flat, u0, 0.5, 64.0), FarPointNotFound);
    CHECK_THROWS_AS(far_point_from_audit(flat, u0), AuditFailure);

    GeometryCertificate cert = verify_geometry(s.model);
    attach_far_point(cert, s.model, far);
    CHECK(cert.R_far == eval_R(s.model, far));
    CHECK(cert.valid);
}

TEST_CASE("Newton polish converges from a nearby guess")
{
    const SmoothSetup s;
    const auto oracle = vexp_test::shoot_positive([](double u) { return u * u * u - u; }, 31, 1.0, 20.0);
    REQUIRE(oracle.has_value());
    GridFunction guess = GridFunction::zeros(s.grid);
    for (std::size_t k = 0; k < guess.size(); ++k) {
        guess[k] = oracle->u[k] * (1.0 + 0.05 * std::sin(7.0 * static_cast<double>(k)));
    }
    guess[0] = 0.0;
    guess[guess.size() - 1] = 0.0;
    const NewtonResult r = newton_polish(s.model, guess);
    CHECK(r.converged);
    CHECK(r.max_gap < 1e-9);
    for (std::size_t k = 0; k < guess.size(); ++k) {
        CHECK(std::abs(r.u[k] - oracle->u[k]) < 1e-8);
    }
}

TEST_CASE("minimax on a coarse smooth benchmark")
{
    const SmoothSetup s;
    GeometryCertificate cert = verify_geometry(s.model);
    const GridFunction far = find_far_point(s.model, function_from_preset(s.grid, "sine(1)"), cert.rho);
    attach_far_point(cert, s.model, far);
    const MountainPassResult r = minimax_solve(s.model, far, cert);
    CHECK(r.converged);
    CHECK(r.status == "converged");
    CHECK(r.m_estimate <= 1e-8);
    CHECK(r.c_estimate >= cert.eta);
    CHECK(r.c_estimate == doctest::Approx(eval_R(s.model, r.u_candidate)));
    CHECK(sobolev_norm(r.u_candidate, s.model.p()) > 0.5 * cert.rho);
    CHECK_FALSE(r.path_history.empty());
    CHECK(r.path.size() == static_cast<std::size_t>(MinimaxOptions{}.path_nodes));

    const auto oracle = vexp_test::shoot_positive([](double u) { return u * u * u - u; }, 31, 1.0, 20.0);
    REQUIRE(oracle.has_value());
    double sup = 0.0;
    for (std::size_t k = 0; k < r.u_candidate.size(); ++k) {
        sup = std::max(sup, std::abs(std::abs(r.u_candidate[k]) - oracle->u[k]));
    }
    CHECK(sup < 1e-6);

    const Certification c = certify_solution(s.model, r.u_candidate);
    CHECK(c.pass);
    CHECK_FALSE(c.trivial);
    CHECK(c.boundary_zero);
}

TEST_CASE("minimax preconditions")
{
    const SmoothSetup s;
    GeometryCertificate cert = verify_geometry(s.model);
    const GridFunction small = function_from_preset(s.grid, "sine(0.01)");
    CHECK_THROWS_AS(minimax_solve(s.model, small, cert), ConstructionError);
    GeometryCertificate empty;
    const GridFunction far = find_far_point(s.model, function_from_preset(s.grid, "sine(1)"), cert.rho);
    CHECK_THROWS_AS(minimax_solve(s.model, far, empty), ConstructionError);
    CHECK_THROWS_AS(minimax_solve(s.model, far, cert, {.path_nodes = 2}), ConstructionError);
}

TEST_CASE("certification flags")
{
    const SmoothSetup s;
    const Certification zero = certify_solution(s.model, GridFunction::zeros(s.grid));
    CHECK(zero.pass);
    CHECK(zero.trivial);
    GridFunction bad = function_from_preset(s.grid, "sine(1)");
    bad[0] = 0.5;
    const Certification c = certify_solution(s.model, bad);
    CHECK_FALSE(c.boundary_zero);
    CHECK_FALSE(c.pass);
}
