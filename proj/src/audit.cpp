#include "vexp/audit.hpp"

#include "vexp/common.hpp"
#include "vexp/modular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vexp {

const char* to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::fail:
        return "fail";
    case Verdict::inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

namespace {

constexpr std::size_t max_witnesses = 8;

/// Keeps the witnesses with the largest violation measured - bound.
void keep_worst(std::vector<Witness>& w)
{
    std::stable_sort(w.begin(), w.end(), [](const Witness& a, const Witness& b) {
        return (a.measured - a.bound) > (b.measured - b.bound);
    });
    if (w.size() > max_witnesses) {
        w.resize(max_witnesses);
    }
}

bool violates(double lhs, double rhs, double tol)
{
    return lhs > rhs + tol * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

/// Magnitudes 10^(k/n) for k in [k0, k1], both ends included.
std::vector<double> log_samples(int decade_lo, int decade_hi, int per_decade)
{
    std::vector<double> out;
    for (int k = decade_lo * per_decade; k <= decade_hi * per_decade; ++k) {
        out.push_back(std::pow(10.0, static_cast<double>(k) / per_decade));
    }
    return out;
}

std::string shell_key(const char* prefix, int decade)
{
    std::ostringstream os;
    os << prefix << decade;
    return os.str();
}

double max_site_p(const AuditSampling& s)
{
    double m = 0.0;
    for (const Site& x : s.sites) {
        m = std::max(m, x.p);
    }
    return m;
}

double min_site_p(const AuditSampling& s)
{
    double m = std::numeric_limits<double>::infinity();
    for (const Site& x : s.sites) {
        m = std::min(m, x.p);
    }
    return m;
}

void require_sites(const AuditSampling& s)
{
    if (s.sites.empty()) {
        throw ConstructionError("audit sampling has no sites");
    }
}

/// Shell audit of a limsup: `ratio(site, t)` is compared against `bound` on
/// decades [first, last]; only the `tail` shells nearest the limit decide.
HypothesisAudit shell_audit(const char* id, const AuditSampling& s, int first, int last, bool limit_at_first,
                            double bound, const std::function<double(const Site&, double)>& ratio)
{
    HypothesisAudit audit;
    audit.id = id;
    bool tail_violation = false;
    for (int d = first; d <= last; ++d) {
        const bool in_tail = limit_at_first ? d < first + s.tail_shells : d > last - s.tail_shells;
        double worst = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < s.samples_per_decade; ++k) {
            const double mag = std::pow(10.0, d + static_cast<double>(k) / s.samples_per_decade);
            for (const double t : {mag, -mag}) {
                for (const Site& x : s.sites) {
                    const double r = ratio(x, t);
                    worst = std::max(worst, r);
                    if (!std::isfinite(r) || violates(r, bound, s.tol)) {
                        audit.witnesses.push_back({x.p, t, r, bound, in_tail ? "tail shell" : "outer shell"});
                        tail_violation = tail_violation || in_tail;
                    }
                }
            }
        }
        audit.parameters[shell_key("shell_worst_1e", d)] = worst;
    }
    keep_worst(audit.witnesses);
    audit.verdict = tail_violation ? Verdict::fail : Verdict::inconclusive;
    if (!tail_violation && !audit.witnesses.empty()) {
        audit.notes.emplace_back("violations away from the limit do not decide a limsup");
    }
    audit.notes.emplace_back("sampled limsup: no violation is not a proof");
    return audit;
}

} // namespace

AuditSampling sampling_for(const ExponentField& p, int dimension, std::size_t max_sites)
{
    AuditSampling s;
    s.dimension = dimension;
    const auto values = p.values();
    std::vector<double> picked{p.p_minus(), p.p_plus()};
    const std::size_t n = values.size();
    const std::size_t stride = std::max<std::size_t>(1, n / std::max<std::size_t>(1, max_sites));
    for (std::size_t k = 0; k < n && picked.size() < std::max<std::size_t>(2, max_sites); k += stride) {
        picked.push_back(values[k]);
    }
    std::sort(picked.begin(), picked.end());
    picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
    for (double v : picked) {
        s.sites.push_back(Site{v});
    }
    return s;
}

HypothesisAudit audit_growth(const PiecewisePotential& j, const AuditSampling& s)
{
    require_sites(s);
    if (!j.growth()) {
        throw ConstructionError("potential '" + j.name() + "' declares no growth bound");
    }
    const GrowthBound& g = *j.growth();
    HypothesisAudit audit;
    audit.id = hypothesis::growth;

    std::vector<double> ts;
    for (double m : log_samples(-6, static_cast<int>(std::floor(std::log10(s.t_max))), s.samples_per_decade)) {
        ts.push_back(m);
        ts.push_back(-m);
    }
    for (double b : j.breakpoints()) {
        ts.insert(ts.end(), {b, b - 1e-7, b + 1e-7});
    }
    ts.push_back(0.0);

    double r_plus = 0.0;
    for (const Site& x : s.sites) {
        const double r = g.r(x);
        r_plus = std::max(r_plus, r);
        for (double t : ts) {
            const ClarkeInterval c = clarke_interval(j, x, t);
            const double measured = std::max(std::abs(c.lo), std::abs(c.hi));
            const double bound = g.a + g.c1 * std::pow(std::abs(t), r - 1.0);
            if (!std::isfinite(measured) || violates(measured, bound, s.tol)) {
                audit.witnesses.push_back({x.p, t, measured, bound, "|v| above a + c1 |t|^(r-1)"});
            }
        }
    }
    keep_worst(audit.witnesses);
    audit.verdict = audit.witnesses.empty() ? Verdict::pass : Verdict::fail;

    const double p_plus = max_site_p(s);
    const double p_hat = sobolev_conjugate(min_site_p(s), s.dimension);
    audit.parameters = {{"a", g.a}, {"c1", g.c1}, {"r_plus", r_plus}, {"t_max", s.t_max}, {"p_plus", p_plus}};
    if (std::isfinite(p_hat)) {
        audit.parameters["p_hat_star"] = p_hat;
    }
    if (!(p_plus <= r_plus)) {
        audit.notes.emplace_back("declared r+ is below p+");
    }
    audit.notes.emplace_back(r_plus < p_hat ? "r+ < p_hat_star holds" : "r+ < p_hat_star does not hold");
    return audit;
}

HypothesisAudit audit_local_negativity(const PiecewisePotential& j, double mu_claim, const AuditSampling& s)
{
    require_sites(s);
    if (!(mu_claim > 0.0)) {
        throw ConstructionError("local negativity audit needs mu_claim > 0");
    }
    HypothesisAudit audit = shell_audit(hypothesis::local_negativity, s, -s.near_decades, -1, true, -mu_claim,
                                        [&j](const Site& x, double t) { return j.value(x, t) / std::pow(std::abs(t), x.p); });
    audit.parameters["mu_claim"] = mu_claim;
    return audit;
}

HypothesisAudit audit_tang_condition(const PiecewisePotential& j, double c_claim, const AuditSampling& s)
{
    require_sites(s);
    if (!(c_claim > 0.0)) {
        throw ConstructionError("Tang condition audit needs c_claim > 0");
    }
    HypothesisAudit audit = shell_audit(hypothesis::tang, s, 1, s.far_decades, false, -c_claim,
                                        [&j](const Site& x, double t) {
                                            const ClarkeInterval c = clarke_interval(j, x, t);
                                            const double jt = j.value(x, t);
                                            const double worst = std::max(c.lo * t, c.hi * t) - jt;
                                            return worst / std::pow(std::abs(t), x.p);
                                        });
    audit.parameters["c_claim"] = c_claim;
    return audit;
}

std::vector<HypothesisAudit> audit_superlinear(const PiecewisePotential& j, double nu, double M, const AuditSampling& s)
{
    require_sites(s);
    const double p_plus = max_site_p(s);
    if (!(nu > p_plus)) {
        throw ConstructionError("superlinear audit needs nu > p+");
    }
    if (!(M > 0.0)) {
        throw ConstructionError("superlinear audit needs M > 0");
    }
    const double t_hi = std::max(s.t_max, 10.0 * M);
    const int decades = static_cast<int>(std::ceil(std::log10(t_hi / M)));
    std::vector<double> mags;
    for (int k = 1; k <= decades * s.samples_per_decade; ++k) {
        const double m = M * std::pow(10.0, static_cast<double>(k) / s.samples_per_decade);
        if (m > t_hi) {
            break;
        }
        mags.push_back(m);
    }
    for (double b : j.breakpoints()) {
        if (std::abs(b) > M) {
            mags.push_back(std::abs(b));
        }
    }

    HypothesisAudit main;
    main.id = hypothesis::superlinear;
    for (const Site& x : s.sites) {
        for (double m : mags) {
            for (const double t : {m, -m}) {
                const double jt = j.value(x, t);
                const double lhs = nu * jt;
                const double rhs = -j0(j, x, t, -t);
                if (violates(lhs, rhs, s.tol)) {
                    main.witnesses.push_back({x.p, t, lhs, rhs, "nu j > -j0(t; -t)"});
                }
                if (!(jt > 0.0)) {
                    main.witnesses.push_back({x.p, t, 0.0, jt, "j <= 0"});
                }
            }
        }
    }
    keep_worst(main.witnesses);
    main.verdict = main.witnesses.empty() ? Verdict::pass : Verdict::fail;
    main.parameters = {{"nu", nu}, {"M", M}, {"t_max", t_hi}, {"p_plus", p_plus}};

    HypothesisAudit lower;
    lower.id = hypothesis::lower_bound;
    double inf_jm = std::numeric_limits<double>::infinity();
    for (const Site& x : s.sites) {
        inf_jm = std::min({inf_jm, j.value(x, M), j.value(x, -M)});
    }
    const double l = std::pow(M, -nu) * inf_jm;
    lower.parameters = {{"nu", nu}, {"M", M}, {"l", l}, {"t_max", t_hi}};
    if (!(l > 0.0)) {
        lower.witnesses.push_back({0.0, M, l, 0.0, "l = M^-nu min j(+-M) is not positive"});
    } else {
        for (const Site& x : s.sites) {
            for (double m : mags) {
                for (const double t : {m, -m}) {
                    const double jt = j.value(x, t);
                    const double bound = l * std::pow(m, nu);
                    if (violates(bound, jt, s.tol)) {
                        lower.witnesses.push_back({x.p, t, jt, bound, "j < l |t|^nu"});
                    }
                }
            }
        }
    }
    keep_worst(lower.witnesses);
    lower.verdict = lower.witnesses.empty() ? Verdict::pass : Verdict::fail;
    return {main, lower};
}

double integrate_potential(const PiecewisePotential& j, const GridFunction& u, const ExponentField& p)
{
    require_same_grid(u.grid(), p.grid(), "integrate_potential");
    const auto w = u.grid()->node_weights();
    CompensatedSum sum;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (w[k] != 0.0) {
            sum.add(w[k] * j.value(site_of(p, k), u[k]));
        }
    }
    return sum.value();
}

HypothesisAudit audit_far_point(const PiecewisePotential& j, const GridFunction& u_bar, double lambda,
                                const ExponentField& p)
{
    require_same_grid(u_bar.grid(), p.grid(), "audit_far_point");
    if (!u_bar.zero_trace()) {
        throw ConstructionError("far point must have zero trace");
    }
    if (u_bar.is_zero()) {
        throw ConstructionError("far point must not vanish identically");
    }
    const double pm = p.p_minus();
    const double lambda_minus = std::max(0.0, -lambda);
    const auto sides = [&](const GridFunction& u) {
        const double lhs = gradient_modular(u, p) / pm + lambda_minus / pm * modular(u, p);
        return std::pair{lhs, integrate_potential(j, u, p)};
    };

    HypothesisAudit audit;
    audit.id = hypothesis::far_point;
    const auto [lhs, rhs] = sides(u_bar);
    const double tol = 1e-9;
    audit.verdict = violates(lhs, rhs, tol) ? Verdict::fail : Verdict::pass;
    if (audit.verdict == Verdict::fail) {
        audit.witnesses.push_back({0.0, 1.0, lhs, rhs, "lhs above int j(x, u_bar)"});
    }
    for (const double t : {2.0, 4.0, 8.0}) {
        const auto [l, r] = sides(t * u_bar);
        audit.witnesses.push_back({0.0, t, l, r, "scaling probe"});
    }

    const double norm = sobolev_norm(u_bar, p);
    const double c_bar = std::max(1.0 / pm, lambda_minus / pm);
    const double prime_lhs = c_bar * std::pow(norm, norm >= 1.0 ? p.p_plus() : pm);
    audit.parameters = {{"lhs", lhs},
                        {"rhs", rhs},
                        {"lambda_minus", lambda_minus},
                        {"c_bar", c_bar},
                        {"sobolev_norm", norm},
                        {"vi_prime_lhs", prime_lhs},
                        {"vi_prime_holds", violates(prime_lhs, rhs, tol) ? 0.0 : 1.0}};
    return audit;
}

} // namespace vexp
