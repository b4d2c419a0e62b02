#pragma once

#include "vexp/exponent.hpp"
#include "vexp/grid_function.hpp"

#include <span>
#include <vector>

namespace vexp {

/// Discrete modular  s -> sum_i w_i (a_i / s)^(p_i)  over a list of
/// non-negative magnitudes. Nodal samples of |u| and element samples of
/// |grad u| are both expressed this way, so every Luxemburg-type norm in the
/// library shares one root finder.
class ModularTerms {
public:
    void add(double magnitude, double exponent, double weight);
    void append(const ModularTerms& other);

    /// sum_i w_i a_i^(p_i)
    [[nodiscard]] double value() const;
    /// sum_i w_i (a_i / scale)^(p_i), scale > 0
    [[nodiscard]] double value_scaled(double scale) const;
    /// Unique s > 0 with value_scaled(s) = 1, or 0 when every magnitude is 0.
    /// Newton in log-scale until the step is below `rel_tol`, with a bisection
    /// fallback.
    [[nodiscard]] double luxemburg(double rel_tol = 1e-14) const;

    [[nodiscard]] std::span<const double> magnitudes() const noexcept { return magnitude_; }
    [[nodiscard]] std::span<const double> exponents() const noexcept { return exponent_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weight_; }
    [[nodiscard]] std::size_t size() const noexcept { return magnitude_.size(); }

private:
    std::vector<double> magnitude_;
    std::vector<double> exponent_;
    std::vector<double> weight_;
};

/// |u| at nodes with trapezoidal weights.
ModularTerms function_terms(const GridFunction& u, const ExponentField& p);
/// |grad u| per element with element measure and element-averaged exponent.
ModularTerms gradient_terms(const GridFunction& u, const ExponentField& p);

/// phi(u) = int |u|^p(x) dx
double modular(const GridFunction& u, const ExponentField& p);
/// inf{s > 0 : phi(u / s) <= 1}. Throws NonFiniteInput on NaN/inf values.
double luxemburg_norm(const GridFunction& u, const ExponentField& p);
/// int |grad u|^p(x) dx
double gradient_modular(const GridFunction& u, const ExponentField& p);
/// Luxemburg norm of |grad u| as an element function.
double gradient_luxemburg_norm(const GridFunction& u, const ExponentField& p);
/// Phi(u) = int (|grad u|^p + |u|^p) dx
double gradient_full_modular(const GridFunction& u, const ExponentField& p);
/// inf{s > 0 : Phi(u / s) <= 1}; the norm for which the Phi/norm sandwich
/// holds literally. Lies in [S/2, S] for S = sobolev_norm(u).
double phi_luxemburg_norm(const GridFunction& u, const ExponentField& p);
/// ||u||_p + ||grad u||_p
double sobolev_norm(const GridFunction& u, const ExponentField& p);

struct NormBundle {
    double modular = 0.0;
    double luxemburg = 0.0;
    double phi = 0.0;
    double sobolev = 0.0;
};

NormBundle norm_bundle(const GridFunction& u, const ExponentField& p);

struct HolderPairing {
    double lhs = 0.0; ///< int |u v| dx
    double rhs = 0.0; ///< (1/p- + 1/p'-) ||u||_p ||v||_p'
};

/// Both sides of the variable-exponent Hoelder inequality. The conjugate
/// exponent is taken node by node, so the discrete inequality holds exactly.
HolderPairing holder_pairing(const GridFunction& u, const GridFunction& v, const ExponentField& p);

} // namespace vexp
