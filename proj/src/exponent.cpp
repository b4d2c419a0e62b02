#include "vexp/exponent.hpp"

#include "vexp/common.hpp"
#include "vexp/preset.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace vexp {

ExponentField::ExponentField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values))
{
    if (!grid_) {
        throw ConstructionError("exponent field needs a grid");
    }
    if (values_.size() != grid_->node_count()) {
        throw ConstructionError("exponent field size does not match the grid");
    }
    if (!all_finite(values_)) {
        throw NonFiniteInput("exponent field has non-finite values");
    }
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    p_minus_ = *lo;
    p_plus_ = *hi;
    element_values_.reserve(grid_->elements().size());
    for (const Element& e : grid_->elements()) {
        double s = 0.0;
        for (std::size_t a = 0; a < e.vertex_count; ++a) {
            s += values_[e.nodes[a]];
        }
        element_values_.push_back(s / static_cast<double>(e.vertex_count));
    }
}

ExponentField ExponentField::sample(GridPtr grid, const std::function<double(std::span<const double>)>& p)
{
    std::vector<double> values(grid->node_count());
    std::array<double, 2> x{};
    for (std::size_t k = 0; k < values.size(); ++k) {
        for (int a = 0; a < grid->dimension(); ++a) {
            x[a] = grid->coordinate(k, a);
        }
        values[k] = p(std::span<const double>(x.data(), static_cast<std::size_t>(grid->dimension())));
    }
    return ExponentField(std::move(grid), std::move(values));
}

ExponentField ExponentField::constant(GridPtr grid, double c)
{
    std::vector<double> values(grid->node_count(), c);
    return ExponentField(std::move(grid), std::move(values));
}

ExponentField exponent_from_preset(GridPtr grid, std::string_view preset)
{
    const PresetCall call = parse_preset(preset);
    if (call.name == "constant") {
        call.expect_arity(1);
        return ExponentField::constant(std::move(grid), call.args[0]);
    }
    if (call.name == "linear") {
        call.expect_arity(2);
        const double a = call.args[0];
        const double b = call.args[1];
        return ExponentField::sample(std::move(grid), [a, b](std::span<const double> x) { return a + b * x[0]; });
    }
    if (call.name == "sin") {
        call.expect_arity(2);
        const double a = call.args[0];
        const double b = call.args[1];
        return ExponentField::sample(std::move(grid), [a, b](std::span<const double> x) {
            return a + b * std::sin(std::numbers::pi * x[0]);
        });
    }
    throw ConstructionError("unknown exponent preset '" + call.name + "'");
}

double sobolev_conjugate(double p, int N) noexcept
{
    const double n = static_cast<double>(N);
    if (p >= n) {
        return std::numeric_limits<double>::infinity();
    }
    return n * p / (n - p);
}

ValidityReport validate_exponents(const ExponentField& p, int N)
{
    ValidityReport r;
    r.p_minus = p.p_minus();
    r.p_plus = p.p_plus();
    r.p_hat_star = sobolev_conjugate(r.p_minus, N);
    r.solver_usable = r.p_minus > 1.0;
    r.tilde_p = r.solver_usable ? tilde_p(r.p_minus, r.p_plus) : std::numeric_limits<double>::quiet_NaN();
    if (!(r.p_minus > 1.0)) {
        r.violated_clauses.emplace_back(clause::p_minus_above_one);
    }
    if (!(r.p_plus < static_cast<double>(N))) {
        r.violated_clauses.emplace_back(clause::p_plus_below_dimension);
    }
    if (!(r.p_plus <= r.p_hat_star)) {
        r.violated_clauses.emplace_back(clause::p_plus_subcritical);
    }
    r.admissible = r.violated_clauses.empty();
    return r;
}

ExponentField conjugate_exponent(const ExponentField& p)
{
    if (!(p.p_minus() > 1.0)) {
        throw ConstructionError("conjugate exponent needs p > 1 everywhere");
    }
    std::vector<double> values;
    values.reserve(p.values().size());
    for (double v : p.values()) {
        values.push_back(v / (v - 1.0));
    }
    return ExponentField(p.grid(), std::move(values));
}

double tilde_p(double p_minus, double p_plus)
{
    if (!(p_minus > 1.0) || p_plus < p_minus) {
        throw ConstructionError("tilde_p needs 1 < p_minus <= p_plus");
    }
    const double first = (p_minus - 1.0) * p_plus / ((p_plus - 1.0) * p_minus);
    const double second = p_minus / p_plus;
    return std::min(first, second);
}

double tilde_p(const ExponentField& p) { return tilde_p(p.p_minus(), p.p_plus()); }

} // namespace vexp
