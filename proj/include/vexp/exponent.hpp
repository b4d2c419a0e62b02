#pragma once

#include "vexp/grid.hpp"

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vexp {

/// Continuous variable exponent p(x) sampled at grid nodes.
///
/// Values on elements are the vertex average, i.e. the linear interpolant
/// evaluated at the element barycentre.
class ExponentField {
public:
    ExponentField(GridPtr grid, std::vector<double> values);

    /// Samples `p` at every node; `p` receives the node coordinates.
    static ExponentField sample(GridPtr grid, const std::function<double(std::span<const double>)>& p);
    static ExponentField constant(GridPtr grid, double c);

    [[nodiscard]] const GridPtr& grid() const noexcept { return grid_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t node) const { return values_[node]; }
    [[nodiscard]] double p_minus() const noexcept { return p_minus_; }
    [[nodiscard]] double p_plus() const noexcept { return p_plus_; }
    [[nodiscard]] bool is_constant() const noexcept { return p_minus_ == p_plus_; }
    /// One value per grid element.
    [[nodiscard]] std::span<const double> element_values() const noexcept { return element_values_; }

private:
    GridPtr grid_;
    std::vector<double> values_;
    std::vector<double> element_values_;
    double p_minus_ = 0.0;
    double p_plus_ = 0.0;
};

/// Builds a field from a preset string: "constant(c)", "linear(a,b)" for
/// a + b*x1, or "sin(a,b)" for a + b*sin(pi*x1).
ExponentField exponent_from_preset(GridPtr grid, std::string_view preset);

/// Clause identifiers of the exponent admissibility condition.
namespace clause {
inline constexpr const char* p_minus_above_one = "p_minus_gt_1";
inline constexpr const char* p_plus_below_dimension = "p_plus_lt_N";
inline constexpr const char* p_plus_subcritical = "p_plus_le_p_hat_star";
} // namespace clause

struct ValidityReport {
    /// All clauses hold (the strict, dimension-dependent condition).
    bool admissible = false;
    /// 1 < p_minus: enough for the discretized solvers, which accept
    /// p_plus >= N in low-dimensional experiments.
    bool solver_usable = false;
    double p_minus = 0.0;
    double p_plus = 0.0;
    /// N p_minus / (N - p_minus), +infinity when p_minus >= N.
    double p_hat_star = 0.0;
    /// NaN when p_minus <= 1.
    double tilde_p = 0.0;
    std::vector<std::string> violated_clauses;
};

ValidityReport validate_exponents(const ExponentField& p, int N);

/// p' = p / (p - 1) pointwise. Throws ConstructionError if any value <= 1.
ExponentField conjugate_exponent(const ExponentField& p);

/// min{(p- - 1) p+ / ((p+ - 1) p-), p- / p+}; requires 1 < p_minus <= p_plus.
double tilde_p(double p_minus, double p_plus);
double tilde_p(const ExponentField& p);

/// Critical Sobolev exponent N p / (N - p), infinity when p >= N.
double sobolev_conjugate(double p, int N) noexcept;

} // namespace vexp
