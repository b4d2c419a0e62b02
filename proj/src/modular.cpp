#include "vexp/modular.hpp"

#include "vexp/discrete_operator.hpp"

#include <algorithm>
#include <cmath>

namespace vexp {

void ModularTerms::add(double magnitude, double exponent, double weight)
{
    magnitude_.push_back(std::abs(magnitude));
    exponent_.push_back(exponent);
    weight_.push_back(weight);
}

void ModularTerms::append(const ModularTerms& other)
{
    magnitude_.insert(magnitude_.end(), other.magnitude_.begin(), other.magnitude_.end());
    exponent_.insert(exponent_.end(), other.exponent_.begin(), other.exponent_.end());
    weight_.insert(weight_.end(), other.weight_.begin(), other.weight_.end());
}

double ModularTerms::value() const { return value_scaled(1.0); }

double ModularTerms::value_scaled(double scale) const
{
    CompensatedSum sum;
    for (std::size_t i = 0; i < magnitude_.size(); ++i) {
        if (magnitude_[i] != 0.0) {
            sum.add(weight_[i] * std::pow(magnitude_[i] / scale, exponent_[i]));
        }
    }
    return sum.value();
}

double ModularTerms::luxemburg(double rel_tol) const
{
    double max_a = 0.0;
    double total_w = 0.0;
    double p_min = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < magnitude_.size(); ++i) {
        if (!std::isfinite(magnitude_[i])) {
            throw NonFiniteInput("Luxemburg norm of a function with non-finite values");
        }
        max_a = std::max(max_a, magnitude_[i]);
        total_w += weight_[i];
        p_min = first ? exponent_[i] : std::min(p_min, exponent_[i]);
        first = false;
    }
    if (max_a == 0.0) {
        return 0.0;
    }

    // In tau = log s the map tau -> log(value_scaled(e^tau)) is convex and
    // decreasing, so Newton converges monotonically from any start.
    double s = std::max(max_a, max_a * std::pow(total_w, 1.0 / p_min));
    for (int it = 0; it < 200; ++it) {
        CompensatedSum v;
        CompensatedSum dv;
        for (std::size_t i = 0; i < magnitude_.size(); ++i) {
            if (magnitude_[i] != 0.0) {
                const double term = weight_[i] * std::pow(magnitude_[i] / s, exponent_[i]);
                v.add(term);
                dv.add(exponent_[i] * term);
            }
        }
        const double value = v.value();
        const double step = std::log(value) * value / dv.value();
        s *= std::exp(step);
        if (std::abs(step) <= 0.5 * rel_tol) {
            return s;
        }
    }

    // Fallback: bisection on a bracket of the crossing of 1.
    double hi = std::max(1.0, 2.0 * max_a * std::pow(total_w, 1.0 / p_min));
    while (value_scaled(hi) > 1.0) {
        hi *= 2.0;
    }
    double lo = 0.5 * hi;
    while (value_scaled(lo) <= 1.0) {
        hi = lo;
        lo *= 0.5;
    }
    for (int it = 0; it < 400 && hi - lo > rel_tol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (value_scaled(mid) > 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ModularTerms function_terms(const GridFunction& u, const ExponentField& p)
{
    require_same_grid(u.grid(), p.grid(), "modular");
    if (!all_finite(u.values())) {
        throw NonFiniteInput("grid function has non-finite values");
    }
    const auto w = u.grid()->node_weights();
    ModularTerms terms;
    for (std::size_t k = 0; k < u.size(); ++k) {
        terms.add(u[k], p[k], w[k]);
    }
    return terms;
}

ModularTerms gradient_terms(const GridFunction& u, const ExponentField& p)
{
    require_same_grid(u.grid(), p.grid(), "gradient modular");
    if (!all_finite(u.values())) {
        throw NonFiniteInput("grid function has non-finite values");
    }
    const CellField g = gradient(u);
    const auto elements = u.grid()->elements();
    const auto pe = p.element_values();
    ModularTerms terms;
    for (std::size_t e = 0; e < elements.size(); ++e) {
        terms.add(g.magnitude(e), pe[e], elements[e].measure);
    }
    return terms;
}

double modular(const GridFunction& u, const ExponentField& p) { return function_terms(u, p).value(); }

double luxemburg_norm(const GridFunction& u, const ExponentField& p) { return function_terms(u, p).luxemburg(); }

double gradient_modular(const GridFunction& u, const ExponentField& p) { return gradient_terms(u, p).value(); }

double gradient_luxemburg_norm(const GridFunction& u, const ExponentField& p)
{
    return gradient_terms(u, p).luxemburg();
}

double gradient_full_modular(const GridFunction& u, const ExponentField& p)
{
    return gradient_modular(u, p) + modular(u, p);
}

double phi_luxemburg_norm(const GridFunction& u, const ExponentField& p)
{
    ModularTerms terms = gradient_terms(u, p);
    terms.append(function_terms(u, p));
    return terms.luxemburg();
}

double sobolev_norm(const GridFunction& u, const ExponentField& p)
{
    return luxemburg_norm(u, p) + gradient_luxemburg_norm(u, p);
}

NormBundle norm_bundle(const GridFunction& u, const ExponentField& p)
{
    NormBundle b;
    const ModularTerms fn = function_terms(u, p);
    const ModularTerms gr = gradient_terms(u, p);
    b.modular = fn.value();
    b.luxemburg = fn.luxemburg();
    b.phi = gr.value() + b.modular;
    b.sobolev = b.luxemburg + gr.luxemburg();
    return b;
}

HolderPairing holder_pairing(const GridFunction& u, const GridFunction& v, const ExponentField& p)
{
    require_same_grid(u.grid(), v.grid(), "Hoelder pairing");
    require_same_grid(u.grid(), p.grid(), "Hoelder pairing");
    const ExponentField pc = conjugate_exponent(p);
    const auto w = u.grid()->node_weights();
    CompensatedSum lhs;
    for (std::size_t k = 0; k < u.size(); ++k) {
        lhs.add(w[k] * std::abs(u[k] * v[k]));
    }
    HolderPairing r;
    r.lhs = lhs.value();
    const double constant = 1.0 / p.p_minus() + 1.0 / pc.p_minus();
    r.rhs = constant * luxemburg_norm(u, p) * luxemburg_norm(v, pc);
    return r;
}

} // namespace vexp
