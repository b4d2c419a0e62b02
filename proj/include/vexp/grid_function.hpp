#pragma once

#include "vexp/common.hpp"
#include "vexp/grid.hpp"

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace vexp {

/// Nodal values of a continuous piecewise-linear function on a grid.
class GridFunction {
public:
    GridFunction(GridPtr grid, std::vector<double> values);
    static GridFunction zeros(GridPtr grid);
    static GridFunction sample(GridPtr grid, const std::function<double(std::span<const double>)>& f);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t node) const { return values_[node]; }
    [[nodiscard]] double& operator[](std::size_t node) { return values_[node]; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    /// Every boundary node holds exactly 0.
    [[nodiscard]] bool zero_trace() const noexcept;
    [[nodiscard]] bool is_zero() const noexcept;
    [[nodiscard]] double max_abs() const noexcept;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double s) noexcept;
    /// this += s * other
    GridFunction& axpy(double s, const GridFunction& other);

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(double s, GridFunction a) noexcept { return a *= s; }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Function presets on the reference box of the grid, with s the coordinate
/// mapped to [0, 1] per axis:
///   "zero", "constant(c)", "hat(a)" = a * prod(1 - |2s - 1|),
///   "sine(a)" = a * prod(sin(pi s)),
///   "plateau(a, ramp)" = a * prod(clamp(min(s, 1 - s) / ramp, 0, 1)).
GridFunction function_from_preset(GridPtr grid, std::string_view preset);

/// Random zero-trace function: a sum of `modes` sine modes per axis with
/// N(0,1)/k coefficients plus `noise` times N(0,1) nodal perturbations.
GridFunction random_zero_trace(GridPtr grid, Rng& rng, int modes = 6, double noise = 0.05);

/// Sine bump of unit amplitude, the discrete first Dirichlet eigenvector.
GridFunction first_eigenvector(GridPtr grid);

} // namespace vexp
