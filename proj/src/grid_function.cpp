#include "vexp/grid_function.hpp"

#include "vexp/preset.hpp"

#include <algorithm>
#include <array>
#include <numbers>

namespace vexp {

GridFunction::GridFunction(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values))
{
    if (!grid_) {
        throw ConstructionError("grid function needs a grid");
    }
    if (values_.size() != grid_->node_count()) {
        throw ConstructionError("grid function size does not match the grid");
    }
}

GridFunction GridFunction::zeros(GridPtr grid)
{
    const std::size_t n = grid->node_count();
    return GridFunction(std::move(grid), std::vector<double>(n, 0.0));
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(std::span<const double>)>& f)
{
    std::vector<double> values(grid->node_count());
    std::array<double, 2> x{};
    for (std::size_t k = 0; k < values.size(); ++k) {
        for (int a = 0; a < grid->dimension(); ++a) {
            x[a] = grid->coordinate(k, a);
        }
        values[k] = f(std::span<const double>(x.data(), static_cast<std::size_t>(grid->dimension())));
    }
    return GridFunction(std::move(grid), std::move(values));
}

bool GridFunction::zero_trace() const noexcept
{
    const auto mask = grid_->boundary_mask();
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (mask[k] && values_[k] != 0.0) {
            return false;
        }
    }
    return true;
}

bool GridFunction::is_zero() const noexcept
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double GridFunction::max_abs() const noexcept
{
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) { return axpy(1.0, other); }

GridFunction& GridFunction::operator-=(const GridFunction& other) { return axpy(-1.0, other); }

GridFunction& GridFunction::operator*=(double s) noexcept
{
    for (double& v : values_) {
        v *= s;
    }
    return *this;
}

GridFunction& GridFunction::axpy(double s, const GridFunction& other)
{
    require_same_grid(grid_, other.grid_, "grid function arithmetic");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] += s * other.values_[k];
    }
    return *this;
}

namespace {

std::array<double, 2> unit_coordinates(const Grid& grid, std::span<const double> x)
{
    std::array<double, 2> s{0.5, 0.5};
    for (int a = 0; a < grid.dimension(); ++a) {
        const auto [lo, hi] = grid.bounds(a);
        s[a] = (x[a] - lo) / (hi - lo);
    }
    return s;
}

template <class Profile>
GridFunction product_profile(const GridPtr& grid, double amplitude, Profile profile)
{
    GridFunction u = GridFunction::sample(grid, [&](std::span<const double> x) {
        const auto s = unit_coordinates(*grid, x);
        double v = amplitude;
        for (int a = 0; a < grid->dimension(); ++a) {
            v *= profile(s[a]);
        }
        return v;
    });
    // Pin the trace exactly; sin(pi) is not exactly zero in floating point.
    const auto mask = grid->boundary_mask();
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (mask[k]) {
            u[k] = 0.0;
        }
    }
    return u;
}

} // namespace

GridFunction function_from_preset(GridPtr grid, std::string_view preset)
{
    const PresetCall call = parse_preset(preset);
    if (call.name == "zero") {
        call.expect_arity(0);
        return GridFunction::zeros(std::move(grid));
    }
    if (call.name == "constant") {
        call.expect_arity(1);
        const double c = call.args[0];
        return GridFunction::sample(std::move(grid), [c](std::span<const double>) { return c; });
    }
    if (call.name == "hat") {
        call.expect_arity(1);
        return product_profile(grid, call.args[0], [](double s) { return 1.0 - std::abs(2.0 * s - 1.0); });
    }
    if (call.name == "sine") {
        call.expect_arity(1);
        return product_profile(grid, call.args[0], [](double s) { return std::sin(std::numbers::pi * s); });
    }
    if (call.name == "plateau") {
        call.expect_arity(2);
        const double ramp = call.args[1];
        if (!(ramp > 0.0 && ramp <= 0.5)) {
            throw ConstructionError("plateau ramp must lie in (0, 0.5]");
        }
        return product_profile(grid, call.args[0],
                               [ramp](double s) { return std::clamp(std::min(s, 1.0 - s) / ramp, 0.0, 1.0); });
    }
    throw ConstructionError("unknown function preset '" + call.name + "'");
}

GridFunction random_zero_trace(GridPtr grid, Rng& rng, int modes, double noise)
{
    const int dim = grid->dimension();
    std::vector<double> coeff(static_cast<std::size_t>(modes * (dim == 2 ? modes : 1)));
    for (std::size_t m = 0; m < coeff.size(); ++m) {
        const int kx = static_cast<int>(m % static_cast<std::size_t>(modes)) + 1;
        const int ky = static_cast<int>(m / static_cast<std::size_t>(modes)) + 1;
        coeff[m] = rng.normal() / static_cast<double>(kx * ky);
    }
    GridFunction u = GridFunction::zeros(grid);
    const auto mask = grid->boundary_mask();
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (mask[k]) {
            continue;
        }
        std::array<double, 2> s{0.5, 0.5};
        for (int a = 0; a < dim; ++a) {
            const auto [lo, hi] = grid->bounds(a);
            s[a] = (grid->coordinate(k, a) - lo) / (hi - lo);
        }
        double v = 0.0;
        for (std::size_t m = 0; m < coeff.size(); ++m) {
            const int kx = static_cast<int>(m % static_cast<std::size_t>(modes)) + 1;
            const int ky = static_cast<int>(m / static_cast<std::size_t>(modes)) + 1;
            double basis = std::sin(std::numbers::pi * kx * s[0]);
            if (dim == 2) {
                basis *= std::sin(std::numbers::pi * ky * s[1]);
            }
            v += coeff[m] * basis;
        }
        u[k] = v + noise * rng.normal();
    }
    return u;
}

GridFunction first_eigenvector(GridPtr grid) { return function_from_preset(std::move(grid), "sine(1)"); }

} // namespace vexp
