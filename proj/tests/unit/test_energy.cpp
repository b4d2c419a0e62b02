#include "vexp/energy.hpp"
#include "vexp/modular.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace vexp;

namespace {

GridPtr unit_interval(std::size_t nodes) { return build_grid(1, {{0.0, 1.0}}, {nodes}); }

} // namespace

TEST_CASE("R on the hat function")
{
    const GridPtr g = build_grid(1, {{0.0, 1.0}}, {5});
    const EnergyModel model(ExponentField::constant(g, 2.0), 1.0, make_quartic(1.0));
    CHECK(eval_R(model, function_from_preset(g, "hat(1)")) == doctest::Approx(1.9296875).epsilon(1e-14));
    CHECK(eval_R(model, GridFunction::zeros(g)) == 0.0);
}

TEST_CASE("R input checks")
{
    const GridPtr g = unit_interval(9);
    const EnergyModel model(ExponentField::constant(g, 2.0), 0.0, make_zero());
    CHECK_THROWS_AS(eval_R(model, function_from_preset(g, "constant(1)")), ConstructionError);
    GridFunction u = GridFunction::zeros(g);
    u[3] = std::nan("");
    CHECK_THROWS_AS(eval_R(model, u), NonFiniteInput);
    CHECK_THROWS_AS(eval_R(model, GridFunction::zeros(unit_interval(7))), GridMismatch);
    CHECK_THROWS_AS(EnergyModel(ExponentField::constant(g, 1.0), 0.0, make_zero()), ConstructionError);
}

TEST_CASE("generalized derivative matches difference quotients at smooth points")
{
    const GridPtr g = unit_interval(33);
    const EnergyModel model(exponent_from_preset(g, "linear(2,0.5)"), 3.0, make_quartic(2.0));
    Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction u = random_zero_trace(g, rng);
        const GridFunction v = random_zero_trace(g, rng);
        const double h = 1e-6;
        GridFunction up = u;
        up.axpy(h, v);
        GridFunction um = u;
        um.axpy(-h, v);
        const double fd = (eval_R(model, up) - eval_R(model, um)) / (2.0 * h);
        CHECK(generalized_derivative(model, u, v) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("generalized derivative dominates one-sided quotients across breakpoints")
{
    const GridPtr g = unit_interval(17);
    const ExponentField p = ExponentField::constant(g, 2.0);
    const EnergyModel model(p, 0.0, make_j2(1.0, p, 4.0));
    GridFunction u = function_from_preset(g, "sine(1.2)");
    // Put two nodes on the breakpoint.
    u[5] = 1.0;
    u[11] = -1.0;
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction v = random_zero_trace(g, rng);
        const double h = 1e-7;
        GridFunction up = u;
        up.axpy(h, v);
        const double quotient = (eval_R(model, up) - eval_R(model, u)) / h;
        CHECK(quotient <= generalized_derivative(model, u, v) + 1e-5);
    }
}

TEST_CASE("selection rules stay in the Clarke interval")
{
    const GridPtr g = unit_interval(17);
    const ExponentField p = ExponentField::constant(g, 2.0);
    const EnergyModel model(p, 0.0, make_j2(1.0, p, 4.0));
    GridFunction u = function_from_preset(g, "sine(1.5)");
    u[4] = 1.0;
    for (SelectionRule rule :
         {SelectionRule::lo, SelectionRule::hi, SelectionRule::midpoint, SelectionRule::nearest_to_residual}) {
        const SubgradientSelection sel = select_subgradient(model, u, rule);
        const ClarkeInterval c = clarke_interval(model.j(), model.site(4), 1.0);
        CHECK(c.contains(sel.values[4], 1e-14));
        CHECK(parse_selection_rule(to_string(rule)) == rule);
        CHECK_NOTHROW(residual(model, u, sel));
    }
    CHECK(select_subgradient(model, u, SelectionRule::lo).values[4] == doctest::Approx(-2.0));
    CHECK(select_subgradient(model, u, SelectionRule::hi).values[4] == doctest::Approx(4.0));
    SubgradientSelection outside = select_subgradient(model, u, SelectionRule::midpoint);
    outside.values[4] = 10.0;
    CHECK_THROWS_AS(residual(model, u, outside), ConstructionError);
    CHECK_THROWS_AS(parse_selection_rule("nearest"), ConstructionError);
}

TEST_CASE("residual of a smooth model")
{
    const GridPtr g = unit_interval(33);
    const ExponentField p = ExponentField::constant(g, 2.0);
    SUBCASE("zero is critical")
    {
        const EnergyModel model(p, 0.0, make_quartic(1.0));
        const ResidualReport r = residual(model, GridFunction::zeros(g));
        CHECK(r.m_estimate == 0.0);
        CHECK(r.max_gap == 0.0);
    }
    SUBCASE("eigenvector of the discrete Laplacian")
    {
        // Au = lambda_1 u for the sine vector, so R with lambda = lambda_1 is critical there.
        const double h = 1.0 / 32.0;
        const double s = std::sin(std::numbers::pi * h / 2.0);
        const double lambda1 = 4.0 / (h * h) * s * s;
        const EnergyModel model(p, lambda1, make_zero());
        const ResidualReport r = residual(model, first_eigenvector(g));
        CHECK(r.m_estimate < 1e-11);
        CHECK(r.max_gap < 1e-10);
    }
    SUBCASE("residual equals smooth gradient minus weighted slope")
    {
        const EnergyModel model(p, 1.0, make_quartic(1.0));
        const GridFunction u = function_from_preset(g, "sine(2)");
        const ResidualReport r = residual(model, u);
        const DualVector sg = smooth_gradient(model, u);
        const auto w = g->node_weights();
        for (std::size_t k : g->interior_nodes()) {
            CHECK(r.residual[k] == doctest::Approx(sg[k] - w[k] * (u[k] * u[k] * u[k] - u[k])));
        }
        CHECK(r.m_estimate > 0.0);
    }
}

TEST_CASE("nearest selection closes the gap when the slope is feasible")
{
    const GridPtr g = unit_interval(9);
    const ExponentField p = ExponentField::constant(g, 2.0);
    const EnergyModel model(p, 0.0, make_power(5.0, 1.0));
    // |t| has Clarke interval [-5, 5] at 0, wide enough to absorb a small smooth gradient.
    const GridFunction u = GridFunction::zeros(g);
    const ResidualReport r = residual(model, u);
    CHECK(r.max_gap == 0.0);
}

TEST_CASE("PS diagnostics on model sequences")
{
    const GridPtr g = unit_interval(33);
    const ExponentField p = ExponentField::constant(g, 2.0);
    const EnergyModel model(p, 0.0, make_quartic(1.0));
    const GridFunction u = function_from_preset(g, "sine(1)");
    SUBCASE("shrinking")
    {
        std::vector<GridFunction> seq;
        for (int n = 1; n <= 4096; n *= 4) {
            GridFunction v = u;
            v *= 1.0 / n;
            seq.push_back(std::move(v));
        }
        const PsReport r = ps_diagnostics(model, seq);
        CHECK(r.R_bounded);
        CHECK_FALSE(r.norm_unbounded);
        CHECK(r.m.back() < r.m.front());
        CHECK(r.increments.size() == seq.size() - 1);
    }
    SUBCASE("growing")
    {
        std::vector<GridFunction> seq;
        for (int n = 1; n <= 256; n *= 2) {
            GridFunction v = u;
            v *= n;
            seq.push_back(std::move(v));
        }
        const PsReport r = ps_diagnostics(model, seq);
        CHECK(r.norm_unbounded);
        CHECK_FALSE(r.R_bounded);
        CHECK_FALSE(r.m_vanishing);
        CHECK_FALSE(r.cauchy_tail);
    }
    CHECK_THROWS_AS(ps_diagnostics(model, {u}), ConstructionError);
}

TEST_CASE("geometry lower bound on small balls")
{
    const GridPtr g = unit_interval(33);
    const ExponentField p = ExponentField::constant(g, 2.0);
    const EnergyModel model(p, 0.0, make_j2(1.0, p, 4.0));
    const double theta = default_theta(model, 1);
    CHECK(theta == doctest::Approx(4.0));
    Rng rng(13);
    std::vector<GridFunction> fit;
    std::vector<GridFunction> check;
    for (int i = 0; i < 40; ++i) {
        GridFunction u = random_zero_trace(g, rng);
        u *= rng.uniform(0.01, 0.9) / phi_luxemburg_norm(u, p);
        (i % 2 ? check : fit).push_back(std::move(u));
    }
    fit.insert(fit.end(), check.begin(), check.end());
    const GeometryBoundReport r = check_geometry_bound(model, 9.8, 1.0, theta, fit, check);
    CHECK(r.beta1 == doctest::Approx(0.5));
    CHECK(r.gamma > 0.0);
    CHECK(r.checked == check.size());
    CHECK(r.violations == 0);
    CHECK(r.worst_slack >= 0.0);
    CHECK_THROWS_AS(check_geometry_bound(model, 9.8, 1.0, 2.0, fit, check), ConstructionError);
}
