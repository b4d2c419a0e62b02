#include "vexp/potential.hpp"

#include "vexp/common.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace vexp {

double ClarkeInterval::distance(double v) const noexcept
{
    if (v < lo) {
        return lo - v;
    }
    if (v > hi) {
        return v - hi;
    }
    return 0.0;
}

double ClarkeInterval::clamp(double v) const noexcept { return std::clamp(v, lo, hi); }

PiecewisePotential::PiecewisePotential(std::string name, std::vector<double> breakpoints, std::vector<Piece> pieces)
    : name_(std::move(name)), breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces))
{
    if (pieces_.size() != breakpoints_.size() + 1) {
        throw ConstructionError("potential '" + name_ + "' needs exactly one more piece than breakpoints");
    }
    if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end())
        || std::adjacent_find(breakpoints_.begin(), breakpoints_.end()) != breakpoints_.end()) {
        throw ConstructionError("potential '" + name_ + "' breakpoints must be strictly increasing");
    }
    for (const Piece& piece : pieces_) {
        if (!piece.value || !piece.slope || !piece.curvature) {
            throw ConstructionError("potential '" + name_ + "' has an incomplete piece");
        }
    }
}

std::size_t PiecewisePotential::piece_index(double t) const noexcept
{
    // First breakpoint >= t: t on a breakpoint belongs to the left piece.
    return static_cast<std::size_t>(std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t) - breakpoints_.begin());
}

std::optional<std::size_t> PiecewisePotential::breakpoint_near(double t) const noexcept
{
    const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
    std::optional<std::size_t> best;
    double best_d = breakpoint_tolerance;
    if (it != breakpoints_.end() && std::abs(*it - t) < best_d) {
        best = static_cast<std::size_t>(it - breakpoints_.begin());
        best_d = std::abs(*it - t);
    }
    if (it != breakpoints_.begin() && std::abs(*(it - 1) - t) < best_d) {
        best = static_cast<std::size_t>(it - 1 - breakpoints_.begin());
    }
    return best;
}

double PiecewisePotential::value(const Site& x, double t) const { return pieces_[piece_index(t)].value(x, t); }

double PiecewisePotential::slope(const Site& x, double t) const { return pieces_[piece_index(t)].slope(x, t); }

PiecewisePotential& PiecewisePotential::with_growth(GrowthBound g)
{
    growth_ = std::move(g);
    return *this;
}

PiecewisePotential& PiecewisePotential::with_local_mu(double mu)
{
    local_mu_ = mu;
    return *this;
}

ClarkeInterval clarke_interval(const PiecewisePotential& j, const Site& x, double t)
{
    if (const auto b = j.breakpoint_near(t)) {
        const double tb = j.breakpoints()[*b];
        const double left = j.pieces()[*b].slope(x, tb);
        const double right = j.pieces()[*b + 1].slope(x, tb);
        return {std::min(left, right), std::max(left, right)};
    }
    const double s = j.slope(x, t);
    return {s, s};
}

double j0(const PiecewisePotential& j, const Site& x, double t, double h)
{
    const ClarkeInterval c = clarke_interval(j, x, t);
    return h >= 0.0 ? c.hi * h : c.lo * h;
}

namespace {

/// Lifts an even profile f(|t|) with derivatives to a piece in t.
Piece even_piece(PieceLaw f, PieceLaw df, PieceLaw d2f)
{
    return Piece{
        [f](const Site& x, double t) { return f(x, std::abs(t)); },
        [df](const Site& x, double t) { return std::copysign(1.0, t) * df(x, std::abs(t)); },
        [d2f](const Site& x, double t) { return d2f(x, std::abs(t)); },
    };
}

/// c s^e for s >= 0 with its derivatives, e read from the site or fixed.
Piece even_power(double c, std::function<double(const Site&)> e)
{
    return even_piece(
        [c, e](const Site& x, double s) { return s == 0.0 ? 0.0 : c * std::pow(s, e(x)); },
        [c, e](const Site& x, double s) { return s == 0.0 ? 0.0 : c * e(x) * std::pow(s, e(x) - 1.0); },
        [c, e](const Site& x, double s) {
            const double q = e(x);
            if (s == 0.0) {
                return q == 2.0 ? 2.0 * c : 0.0;
            }
            return c * q * (q - 1.0) * std::pow(s, q - 2.0);
        });
}

void require_ordering(const ExponentField& p, double q_plus, const char* who)
{
    if (!(p.p_minus() > 1.0)) {
        throw ConstructionError(std::string(who) + ": needs p_minus > 1");
    }
    if (!(p.p_plus() < q_plus)) {
        throw ConstructionError(std::string(who) + ": needs p_plus < q_plus");
    }
}

} // namespace

PiecewisePotential make_j1(double mu, double sigma, const ExponentField& p, double q_plus)
{
    if (!(mu > 0.0) || !(sigma > 0.0)) {
        throw ConstructionError("j1: needs mu > 0 and sigma > 0");
    }
    require_ordering(p, q_plus, "j1");
    const double two_q = std::pow(2.0, q_plus);
    const double slope2 = mu + sigma - two_q;
    const double offset2 = -2.0 * mu - sigma + two_q;
    const auto p_of = [](const Site& x) { return x.p; };
    const Piece inner = even_power(-mu, p_of);
    const Piece middle = even_piece([slope2, offset2](const Site&, double s) { return slope2 * s + offset2; },
                                    [slope2](const Site&, double) { return slope2; },
                                    [](const Site&, double) { return 0.0; });
    Piece outer = even_power(-1.0, [q_plus](const Site&) { return q_plus; });
    outer.value = [sigma, q_plus](const Site&, double t) { return sigma - std::pow(std::abs(t), q_plus); };

    PiecewisePotential j("j1", {-2.0, -1.0, 1.0, 2.0}, {outer, middle, inner, middle, outer});
    j.with_growth(GrowthBound{mu * p.p_plus() + sigma + two_q, q_plus, [q_plus](const Site&) { return q_plus; }});
    j.with_local_mu(mu);
    return j;
}

PiecewisePotential make_j2(double mu, const ExponentField& p, double q_plus)
{
    if (!(mu > 0.0)) {
        throw ConstructionError("j2: needs mu > 0");
    }
    require_ordering(p, q_plus, "j2");
    const Piece inner = even_power(-mu, [](const Site& x) { return x.p; });
    Piece outer = even_power(1.0, [q_plus](const Site&) { return q_plus; });
    outer.value = [mu, q_plus](const Site&, double t) { return std::pow(std::abs(t), q_plus) - mu - 1.0; };

    PiecewisePotential j("j2", {-1.0, 1.0}, {outer, inner, outer});
    j.with_growth(GrowthBound{mu * p.p_plus(), q_plus, [q_plus](const Site&) { return q_plus; }});
    j.with_local_mu(mu);
    return j;
}

PiecewisePotential make_quartic(double mu)
{
    Piece piece{
        [mu](const Site&, double t) { return 0.25 * t * t * t * t - 0.5 * mu * t * t; },
        [mu](const Site&, double t) { return t * t * t - mu * t; },
        [mu](const Site&, double t) { return 3.0 * t * t - mu; },
    };
    PiecewisePotential j("quartic", {}, {piece});
    // |t^3 - mu t| <= mu + (1 + mu) |t|^3
    j.with_growth(GrowthBound{std::abs(mu), 1.0 + std::abs(mu), [](const Site&) { return 4.0; }});
    if (mu > 0.0) {
        // j / t^2 -> -mu/2 at p = 2
        j.with_local_mu(0.5 * mu);
    }
    return j;
}

PiecewisePotential make_zero()
{
    const auto zero = [](const Site&, double) { return 0.0; };
    PiecewisePotential j("zero", {}, {Piece{zero, zero, zero}});
    j.with_growth(GrowthBound{0.0, 1.0, [](const Site& x) { return x.p; }});
    return j;
}

PiecewisePotential make_power(double coef, double nu)
{
    if (!(nu >= 1.0)) {
        throw ConstructionError("power potential needs nu >= 1");
    }
    const Piece piece = even_power(coef, [nu](const Site&) { return nu; });
    if (nu == 1.0) {
        // Explicit one-sided branches: the even lift cannot tell 0 from -0.
        const auto zero = [](const Site&, double) { return 0.0; };
        const Piece left{[coef](const Site&, double t) { return -coef * t; },
                         [coef](const Site&, double) { return -coef; }, zero};
        const Piece right{[coef](const Site&, double t) { return coef * t; },
                          [coef](const Site&, double) { return coef; }, zero};
        PiecewisePotential j("power", {0.0}, {left, right});
        j.with_growth(GrowthBound{std::abs(coef), 1.0, [](const Site& x) { return x.p; }});
        return j;
    }
    PiecewisePotential j("power", {}, {piece});
    j.with_growth(GrowthBound{0.0, std::abs(coef) * nu, [nu](const Site&) { return nu; }});
    return j;
}

PiecewisePotential make_exponent_power(double coef)
{
    const Piece piece = even_power(coef, [](const Site& x) { return x.p; });
    PiecewisePotential j("exponent_power", {}, {piece});
    if (coef < 0.0) {
        j.with_local_mu(-coef);
    }
    return j;
}

PiecewisePotential make_exponential()
{
    Piece piece{
        [](const Site&, double t) { return std::expm1(t); },
        [](const Site&, double t) { return std::exp(t); },
        [](const Site&, double t) { return std::exp(t); },
    };
    return PiecewisePotential("exponential", {}, {piece});
}

PiecewisePotential add(const PiecewisePotential& f, const PiecewisePotential& g)
{
    std::vector<double> merged;
    std::set_union(f.breakpoints().begin(), f.breakpoints().end(), g.breakpoints().begin(), g.breakpoints().end(),
                   std::back_inserter(merged));
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i <= merged.size(); ++i) {
        // Any interior point of the merged interval identifies the source pieces.
        double probe = 0.0;
        if (merged.empty()) {
            probe = 0.0;
        } else if (i == 0) {
            probe = merged.front() - 1.0;
        } else if (i == merged.size()) {
            probe = merged.back() + 1.0;
        } else {
            probe = 0.5 * (merged[i - 1] + merged[i]);
        }
        const Piece a = f.pieces()[f.piece_index(probe)];
        const Piece b = g.pieces()[g.piece_index(probe)];
        pieces.push_back(Piece{
            [a, b](const Site& x, double t) { return a.value(x, t) + b.value(x, t); },
            [a, b](const Site& x, double t) { return a.slope(x, t) + b.slope(x, t); },
            [a, b](const Site& x, double t) { return a.curvature(x, t) + b.curvature(x, t); },
        });
    }
    return PiecewisePotential(f.name() + "+" + g.name(), std::move(merged), std::move(pieces));
}

PiecewisePotential negate(const PiecewisePotential& f)
{
    std::vector<Piece> pieces;
    for (const Piece& a : f.pieces()) {
        pieces.push_back(Piece{
            [a](const Site& x, double t) { return -a.value(x, t); },
            [a](const Site& x, double t) { return -a.slope(x, t); },
            [a](const Site& x, double t) { return -a.curvature(x, t); },
        });
    }
    std::vector<double> bps(f.breakpoints().begin(), f.breakpoints().end());
    return PiecewisePotential("-" + f.name(), std::move(bps), std::move(pieces));
}

} // namespace vexp
