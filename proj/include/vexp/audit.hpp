#pragma once

#include "vexp/grid_function.hpp"
#include "vexp/potential.hpp"

#include <map>
#include <string>
#include <vector>

namespace vexp {

/// Sampled checks of the structural hypotheses on a potential.
///
/// Pointwise hypotheses return pass or fail. Asymptotic (limsup) hypotheses
/// return fail or inconclusive: finite sampling never proves a limit.

enum class Verdict { pass, fail, inconclusive };

const char* to_string(Verdict v) noexcept;

namespace hypothesis {
inline constexpr const char* growth = "Hj_iii";
inline constexpr const char* local_negativity = "Hj_iv";
inline constexpr const char* tang = "Hj1_v";
inline constexpr const char* far_point = "Hj1_vi";
inline constexpr const char* superlinear = "Hj2_v";
inline constexpr const char* lower_bound = "lower_bound_nu";
} // namespace hypothesis

struct Witness {
    double p = 0.0;        ///< exponent value at the sampled x
    double t = 0.0;
    double measured = 0.0; ///< left-hand side of the checked inequality
    double bound = 0.0;    ///< right-hand side
    std::string what;
};

struct HypothesisAudit {
    std::string id;
    Verdict verdict = Verdict::inconclusive;
    std::vector<Witness> witnesses;
    std::map<std::string, double> parameters;
    std::vector<std::string> notes;

    /// Not refuted by sampling.
    [[nodiscard]] bool passed() const noexcept { return verdict != Verdict::fail; }
};

struct AuditSampling {
    std::vector<Site> sites;
    /// Upper |t| for the growth and superlinear scans.
    double t_max = 1e3;
    /// Outer decade of the shells used by the limsup at infinity.
    int far_decades = 6;
    /// Inner decade of the shells used by the limsup at zero.
    int near_decades = 8;
    int samples_per_decade = 8;
    /// Innermost/outermost shells that decide a limsup verdict.
    int tail_shells = 3;
    double tol = 1e-9;
    /// Space dimension N, for the subcritical exponent p_hat_star.
    int dimension = 3;
};

/// Up to `max_sites` nodes of `p`, always including a minimiser and a
/// maximiser of p.
AuditSampling sampling_for(const ExponentField& p, int dimension, std::size_t max_sites = 9);

/// |v| <= a + c1 |t|^(r-1) for v in the Clarke interval. Throws
/// ConstructionError when the potential declares no growth bound.
HypothesisAudit audit_growth(const PiecewisePotential& j, const AuditSampling& s);

/// limsup_{t->0} j / |t|^p <= -mu_claim, sampled on shells 10^-1 ... 10^-near.
HypothesisAudit audit_local_negativity(const PiecewisePotential& j, double mu_claim, const AuditSampling& s);

/// limsup_{|t|->inf} (v t - j) / |t|^p <= -c_claim over the Clarke interval.
HypothesisAudit audit_tang_condition(const PiecewisePotential& j, double c_claim, const AuditSampling& s);

/// nu j <= -j0(t; -t) and j > 0 for |t| > M, plus the implied lower bound
/// j >= l |t|^nu with l = M^-nu min(j(M), j(-M)). Returns {Hj2_v,
/// lower_bound_nu}. Throws ConstructionError when nu <= p+.
std::vector<HypothesisAudit> audit_superlinear(const PiecewisePotential& j, double nu, double M, const AuditSampling& s);

/// (1/p-) int |grad u|^p + (lambda_-/p-) int |u|^p <= int j(x, u), with the
/// stronger norm form and a scaling probe t in {1, 2, 4, 8} recorded as
/// witnesses. Throws ConstructionError for u = 0 or a non-zero trace.
HypothesisAudit audit_far_point(const PiecewisePotential& j, const GridFunction& u_bar, double lambda,
                                const ExponentField& p);

/// int j(x, u(x)) dx with nodal weights.
double integrate_potential(const PiecewisePotential& j, const GridFunction& u, const ExponentField& p);

} // namespace vexp
