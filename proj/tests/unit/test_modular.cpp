#include "vexp/modular.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace vexp;

namespace {

GridPtr unit_interval(std::size_t nodes) { return build_grid(1, {{0.0, 1.0}}, {nodes}); }

} // namespace

TEST_CASE("ModularTerms root finding")
{
    ModularTerms t;
    CHECK(t.luxemburg() == 0.0);
    t.add(0.0, 2.0, 1.0);
    CHECK(t.luxemburg() == 0.0);
    t.add(3.0, 2.0, 0.5);
    // 0.5 (3/s)^2 = 1
    CHECK(t.luxemburg() == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(t.value_scaled(t.luxemburg()) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("constant functions with constant exponents")
{
    const GridPtr g = build_grid(1, {{0.0, 2.0}}, {33});
    for (double p : {1.5, 2.0, 3.7}) {
        for (double c : {0.25, 1.0, -4.0}) {
            const GridFunction u = function_from_preset(g, "constant(" + std::to_string(c) + ")");
            const ExponentField pf = ExponentField::constant(g, p);
            CHECK(modular(u, pf) == doctest::Approx(std::pow(std::abs(c), p) * 2.0).epsilon(1e-13));
            CHECK(std::abs(luxemburg_norm(u, pf) - std::abs(c) * std::pow(2.0, 1.0 / p)) < 1e-10);
        }
    }
}

TEST_CASE("unit constant with exponent 2 + x")
{
    SUBCASE("on (0,1) the norm is one")
    {
        const GridPtr g = unit_interval(2049);
        const GridFunction u = function_from_preset(g, "constant(1)");
        CHECK(luxemburg_norm(u, exponent_from_preset(g, "linear(2,1)")) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("on (0,2) against the closed-form root")
    {
        const GridPtr g = build_grid(1, {{0.0, 2.0}}, {8193});
        const GridFunction u = function_from_preset(g, "constant(1)");
        const double norm = luxemburg_norm(u, exponent_from_preset(g, "linear(2,1)"));
        CHECK(std::abs(norm - vexp_test::luxemburg_one_linear_exponent_0_2) < 1e-8);
        CHECK(std::abs(vexp_test::luxemburg_constant_linear(1.0, 2.0, 1.0, 0.0, 2.0)
                       - vexp_test::luxemburg_one_linear_exponent_0_2)
              < 1e-12);
    }
}

TEST_CASE("hat function bundle")
{
    const GridPtr g = build_grid(1, {{0.0, 1.0}}, {5});
    const GridFunction u = function_from_preset(g, "hat(1)");
    const ExponentField p = ExponentField::constant(g, 2.0);
    const NormBundle b = norm_bundle(u, p);
    CHECK(b.modular == doctest::Approx(0.375));
    CHECK(b.luxemburg == doctest::Approx(std::sqrt(0.375)));
    CHECK(gradient_modular(u, p) == doctest::Approx(4.0));
    CHECK(gradient_luxemburg_norm(u, p) == doctest::Approx(2.0));
    CHECK(b.phi == doctest::Approx(4.375));
    CHECK(b.sobolev == doctest::Approx(2.0 + std::sqrt(0.375)));
    CHECK(phi_luxemburg_norm(u, p) == doctest::Approx(std::sqrt(4.375)));
}

TEST_CASE("zero function and errors")
{
    const GridPtr g = unit_interval(9);
    const ExponentField p = exponent_from_preset(g, "linear(2,1)");
    const GridFunction z = GridFunction::zeros(g);
    const NormBundle b = norm_bundle(z, p);
    CHECK(b.modular == 0.0);
    CHECK(b.luxemburg == 0.0);
    CHECK(b.phi == 0.0);
    CHECK(b.sobolev == 0.0);
    GridFunction bad = z;
    bad[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(luxemburg_norm(bad, p), NonFiniteInput);
    CHECK_THROWS_AS(modular(bad, p), NonFiniteInput);
    CHECK_THROWS_AS(modular(z, ExponentField::constant(unit_interval(11), 2.0)), GridMismatch);
}

TEST_CASE("norm and modular sandwich on random functions")
{
    Rng rng(2024);
    for (const char* preset : {"constant(2)", "linear(1.5,2)", "sin(2,1.5)"}) {
        for (const GridPtr& g : {unit_interval(65), build_grid(2, {{0, 1}, {0, 1}}, {17, 17})}) {
            const ExponentField p = exponent_from_preset(g, preset);
            for (int trial = 0; trial < 20; ++trial) {
                GridFunction u = random_zero_trace(g, rng);
                u *= std::exp(rng.uniform(-3.0, 3.0));
                const double a = luxemburg_norm(u, p);
                const double rho = modular(u, p);
                GridFunction scaled = u;
                scaled *= 1.0 / a;
                CHECK(modular(scaled, p) == doctest::Approx(1.0).epsilon(1e-8));
                if (a > 1.0 + 1e-8) {
                    CHECK(rho > 1.0);
                    CHECK(std::pow(a, p.p_minus()) <= rho * (1.0 + 1e-8));
                    CHECK(rho <= std::pow(a, p.p_plus()) * (1.0 + 1e-8));
                } else if (a < 1.0 - 1e-8) {
                    CHECK(rho < 1.0);
                    CHECK(std::pow(a, p.p_plus()) <= rho * (1.0 + 1e-8));
                    CHECK(rho <= std::pow(a, p.p_minus()) * (1.0 + 1e-8));
                }
                const double phi_norm = phi_luxemburg_norm(u, p);
                const double phi = gradient_full_modular(u, p);
                if (phi_norm > 1.0) {
                    CHECK(std::pow(phi_norm, p.p_minus()) <= phi * (1.0 + 1e-8));
                    CHECK(phi <= std::pow(phi_norm, p.p_plus()) * (1.0 + 1e-8));
                } else {
                    CHECK(std::pow(phi_norm, p.p_plus()) <= phi * (1.0 + 1e-8));
                    CHECK(phi <= std::pow(phi_norm, p.p_minus()) * (1.0 + 1e-8));
                }
                const double S = sobolev_norm(u, p);
                CHECK(phi_norm >= 0.5 * S * (1.0 - 1e-12));
                CHECK(phi_norm <= S * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("norm and modular vanish and blow up together")
{
    const GridPtr g = unit_interval(65);
    const ExponentField p = exponent_from_preset(g, "linear(1.5,2)");
    const GridFunction u = function_from_preset(g, "sine(1)");
    double last_norm = luxemburg_norm(u, p);
    double last_mod = modular(u, p);
    for (int n = 2; n <= 4096; n *= 2) {
        GridFunction small = u;
        small *= 1.0 / n;
        const double norm = luxemburg_norm(small, p);
        const double mod = modular(small, p);
        CHECK(norm < last_norm);
        CHECK(mod < last_mod);
        last_norm = norm;
        last_mod = mod;
    }
    CHECK(last_norm < 1e-3);
    CHECK(last_mod < 1e-6);
    GridFunction big = u;
    big *= 4096.0;
    CHECK(luxemburg_norm(big, p) > 1e3);
    CHECK(gradient_full_modular(big, p) > 1e6);
}

TEST_CASE("Hoelder pairing")
{
    const GridPtr g = unit_interval(33);
    SUBCASE("equality for constants and p = 2")
    {
        const GridFunction one = function_from_preset(g, "constant(1)");
        const HolderPairing h = holder_pairing(one, one, ExponentField::constant(g, 2.0));
        CHECK(h.lhs == doctest::Approx(1.0));
        CHECK(h.rhs == doctest::Approx(1.0));
    }
    SUBCASE("zero")
    {
        const GridFunction z = GridFunction::zeros(g);
        const HolderPairing h = holder_pairing(z, function_from_preset(g, "sine(1)"), ExponentField::constant(g, 2.0));
        CHECK(h.lhs == 0.0);
        CHECK(h.rhs == 0.0);
    }
    SUBCASE("random pairs")
    {
        Rng rng(5);
        const ExponentField p = exponent_from_preset(g, "linear(2,1)");
        for (int trial = 0; trial < 100; ++trial) {
            const GridFunction u = random_zero_trace(g, rng);
            const GridFunction v = random_zero_trace(g, rng);
            const HolderPairing h = holder_pairing(u, v, p);
            CHECK(h.lhs <= h.rhs + 1e-9);
        }
    }
}
