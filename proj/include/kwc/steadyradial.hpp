#pragma once

// Radial steady states on the annulus r0 < r < R with piecewise-constant theta.
//
// On every band between consecutive interior jump radii
//   eta = 1 + A I0(r) + B K0(r)
// solves -eta'' - eta'/r + eta - 1 = 0. With alpha'(eta) = eta the coupling
// conditions are linear in (A, B):
//   inner wall   -eta'(r0) + eta(r0) |theta(r0+) - gamma(r0)| = 0
//   outer wall    eta'(R)  + eta(R)  |theta(R-)  - gamma(R)|  = 0
//   interior jump rho: eta continuous, [eta'](rho) = eta(rho) |[theta](rho)|
// so a band solve is one small dense linear system. The dual field is
// w = C / (r alpha(eta)), and every jump radius rho must share the same
// C = rho alpha(eta(rho)); with one free middle theta level (two jumps) that
// constraint is solved for the level by bisection.
//
// The closed-form existence conditions (f, F, G, the two-jump C1..C4 system)
// are evaluated in the delta0 = 0 reduction.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kwc/bessel.hpp"
#include "kwc/errors.hpp"
#include "kwc/grid.hpp"
#include "kwc/model.hpp"
#include "kwc/stepper.hpp"

namespace kwc::radial {

struct RadialConfig {
    DomainRadial domain;
    /// sorted, within [r0, R]; r0 / R entries denote boundary mismatch jumps
    std::vector<double> jumpRadii;
    /// theta per band (bands are separated by the interior jump radii); empty
    /// selects the canonical levels: gamma(r0) inside the first jump,
    /// gamma(R) outside the last, and a free middle level fixed by w-compatibility
    std::vector<double> thetaLevels;
    MaterialLaws laws{0.0};
};

/// eta = 1 + A I0(r)/I0(hi) + B K0(r)/K0(lo) on [lo, hi] (scaled basis).
struct Band {
    double lo, hi;
    double A = 0.0, B = 0.0;
    double level = 0.0;
    double i0hi = 1.0, k0lo = 1.0;

    double eta(double r) const {
        const auto e = bessel::evalAll(r);
        return 1.0 + A * e.i0 / i0hi + B * e.k0 / k0lo;
    }
    double etaPrime(double r) const {
        const auto e = bessel::evalAll(r);
        return A * e.i1 / i0hi - B * e.k1 / k0lo;
    }
    /// -eta'' - eta'/r + eta - 1 from the Bessel derivative identities.
    double odeResidual(double r) const {
        const auto e = bessel::evalAll(r);
        const double i0pp = e.i0 - e.i1 / r, k0pp = e.k0 + e.k1 / r;
        const double epp = A * i0pp / i0hi + B * k0pp / k0lo;
        const double ep = A * e.i1 / i0hi - B * e.k1 / k0lo;
        const double et = 1.0 + A * e.i0 / i0hi + B * e.k0 / k0lo;
        return -epp - ep / r + et - 1.0;
    }
};

struct Jump {
    double radius;
    double height; ///< signed theta(r+) - theta(r-), with gamma outside the walls
    double eta;    ///< eta at the jump radius
};

struct RadialSteadyState {
    bool found = false;
    std::string message;
    DomainRadial domain;
    MaterialLaws laws{0.0};
    std::vector<Band> bands;
    std::vector<Jump> jumps;
    double fluxConstant = 0.0; ///< C in w = C / (r alpha(eta))
    bool admissible = false;
    double wMax = 0.0;
    std::map<std::string, double> conditionReport;

    const Band& bandAt(double r) const {
        for (const auto& b : bands)
            if (r <= b.hi) return b;
        return bands.back();
    }
    double eta(double r) const { return bandAt(r).eta(r); }
    double etaPrime(double r) const { return bandAt(r).etaPrime(r); }
    double theta(double r) const { return bandAt(r).level; }
    double w(double r) const {
        if (jumps.empty()) return 0.0;
        return fluxConstant / (r * laws.alpha(eta(r)));
    }
};

namespace detail {

inline std::vector<double> interiorRadii(const RadialConfig& c) {
    std::vector<double> out;
    for (double r : c.jumpRadii)
        if (r > c.domain.r0 && r < c.domain.R) out.push_back(r);
    return out;
}

inline void validate(const RadialConfig& c) {
    c.domain.validate();
    c.laws.validate();
    for (std::size_t k = 0; k < c.jumpRadii.size(); ++k) {
        const double r = c.jumpRadii[k];
        if (!(r >= c.domain.r0 && r <= c.domain.R)) throw ValidationError("jump radius outside [r0, R]");
        if (k > 0 && !(r > c.jumpRadii[k - 1])) throw ValidationError("jump radii must be strictly increasing");
    }
    if (c.domain.R > bessel::kMaxX || c.domain.r0 < bessel::kMinX)
        throw ValidationError("annulus radii must lie in the Bessel range [1e-3, 50]");
    const std::size_t bands = interiorRadii(c).size() + 1;
    if (!c.thetaLevels.empty() && c.thetaLevels.size() != bands)
        throw ValidationError("thetaLevels needs one value per band (" + std::to_string(bands) + ")");
}

/// Linear band solve for fixed per-band theta levels.
inline std::vector<Band> solveLinear(const RadialConfig& c, const std::vector<double>& levels) {
    const auto inner = interiorRadii(c);
    const std::size_t nb = inner.size() + 1;
    std::vector<Band> bands(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        bands[k].lo = k == 0 ? c.domain.r0 : inner[k - 1];
        bands[k].hi = k + 1 == nb ? c.domain.R : inner[k];
        bands[k].level = levels[k];
        bands[k].i0hi = bessel::evalAll(bands[k].hi).i0;
        bands[k].k0lo = bessel::evalAll(bands[k].lo).k0;
    }
    const std::size_t m = 2 * nb;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(Eigen::Index(m), Eigen::Index(m));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Eigen::Index(m));
    // basis values and slopes of band k at r
    auto basis = [&](std::size_t k, double r, double& p, double& q, double& dp, double& dq) {
        const auto e = bessel::evalAll(r);
        p = e.i0 / bands[k].i0hi;
        q = e.k0 / bands[k].k0lo;
        dp = e.i1 / bands[k].i0hi;
        dq = -e.k1 / bands[k].k0lo;
    };
    double p, q, dp, dq;
    Eigen::Index row = 0;
    {
        // -eta' + mu eta = 0 at r0, eta = 1 + A p + B q
        const double mu = std::abs(levels.front() - c.domain.gammaInner);
        basis(0, c.domain.r0, p, q, dp, dq);
        M(row, 0) = -dp + mu * p;
        M(row, 1) = -dq + mu * q;
        rhs(row) = -mu;
        ++row;
    }
    for (std::size_t k = 0; k + 1 < nb; ++k) {
        const double rho = inner[k];
        const double mu = std::abs(levels[k + 1] - levels[k]);
        double pl, ql, dpl, dql, pr, qr, dpr, dqr;
        basis(k, rho, pl, ql, dpl, dql);
        basis(k + 1, rho, pr, qr, dpr, dqr);
        const Eigen::Index a = Eigen::Index(2 * k), b = a + 2;
        // continuity
        M(row, a) = pl;
        M(row, a + 1) = ql;
        M(row, b) = -pr;
        M(row, b + 1) = -qr;
        ++row;
        // eta'_+ - eta'_- - mu eta_- = 0
        M(row, b) = dpr;
        M(row, b + 1) = dqr;
        M(row, a) = -dpl - mu * pl;
        M(row, a + 1) = -dql - mu * ql;
        rhs(row) = mu;
        ++row;
    }
    {
        const double mu = std::abs(levels.back() - c.domain.gammaOuter);
        const std::size_t k = nb - 1;
        basis(k, c.domain.R, p, q, dp, dq);
        const Eigen::Index a = Eigen::Index(2 * k);
        M(row, a) = dp + mu * p;
        M(row, a + 1) = dq + mu * q;
        rhs(row) = -mu;
    }
    const Eigen::VectorXd x = M.fullPivLu().solve(rhs);
    for (std::size_t k = 0; k < nb; ++k) {
        bands[k].A = x(Eigen::Index(2 * k));
        bands[k].B = x(Eigen::Index(2 * k + 1));
    }
    return bands;
}

inline std::vector<Jump> collectJumps(const RadialConfig& c, const std::vector<Band>& bands) {
    std::vector<Jump> out;
    const double tiny = 0.0;
    if (std::abs(bands.front().level - c.domain.gammaInner) > tiny)
        out.push_back({c.domain.r0, bands.front().level - c.domain.gammaInner, bands.front().eta(c.domain.r0)});
    for (std::size_t k = 0; k + 1 < bands.size(); ++k)
        out.push_back({bands[k].hi, bands[k + 1].level - bands[k].level, bands[k].eta(bands[k].hi)});
    if (std::abs(c.domain.gammaOuter - bands.back().level) > tiny)
        out.push_back({c.domain.R, c.domain.gammaOuter - bands.back().level, bands.back().eta(c.domain.R)});
    return out;
}

} // namespace detail

/// Band solve plus w-compatibility, admissibility and residual checks.
inline RadialSteadyState solveBands(const RadialConfig& c) {
    detail::validate(c);
    RadialSteadyState s;
    s.domain = c.domain;
    s.laws = c.laws;
    const auto inner = detail::interiorRadii(c);
    const std::size_t nb = inner.size() + 1;
    const double gin = c.domain.gammaInner, gout = c.domain.gammaOuter;
    const std::size_t m = c.jumpRadii.size();

    std::vector<double> levels = c.thetaLevels;
    if (levels.empty()) {
        // segment index of each band = number of jump radii at or below its lower end
        auto segmentOf = [&](double lo) {
            std::size_t cnt = 0;
            for (double r : c.jumpRadii)
                if (r <= lo) ++cnt;
            return cnt;
        };
        if (m == 0) {
            if (gin != gout) {
                s.message = "no jump radii but gamma(r0) != gamma(R)";
                return s;
            }
        } else if (m > 2) {
            throw ValidationError("more than two jumps need explicit thetaLevels");
        }
        auto levelsFor = [&](double middle) {
            std::vector<double> lv(nb);
            for (std::size_t k = 0; k < nb; ++k) {
                const std::size_t seg = segmentOf(k == 0 ? c.domain.r0 : inner[k - 1]);
                lv[k] = seg == 0 ? gin : seg == m ? gout : middle;
            }
            return lv;
        };
        if (m <= 1) {
            levels = levelsFor(0.0);
        } else {
            // w-compatibility r1 alpha(eta(r1)) = r2 alpha(eta(r2)) for the middle level
            const double r1 = c.jumpRadii[0], r2 = c.jumpRadii[1];
            auto mismatch = [&](double t0) {
                const auto lv = levelsFor(t0);
                const auto bands = detail::solveLinear(c, lv);
                RadialSteadyState tmp;
                tmp.bands = bands;
                return r1 * c.laws.alpha(tmp.eta(r1)) - r2 * c.laws.alpha(tmp.eta(r2));
            };
            double lo = std::min(gin, gout), hi = std::max(gin, gout);
            double flo = mismatch(lo), fhi = mismatch(hi);
            if (flo == 0.0) hi = lo;
            else if (fhi == 0.0) lo = hi;
            else if ((flo > 0) == (fhi > 0)) {
                s.message = "no middle theta level in [gamma(r0), gamma(R)] makes w compatible at both jumps";
                s.conditionReport["compatibilityAtLow"] = flo;
                s.conditionReport["compatibilityAtHigh"] = fhi;
                return s;
            }
            for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = mismatch(mid);
                if ((fm > 0) == (flo > 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            levels = levelsFor(0.5 * (lo + hi));
            s.conditionReport["theta0"] = 0.5 * (lo + hi);
        }
    }
    s.bands = detail::solveLinear(c, levels);
    s.jumps = detail::collectJumps(c, s.bands);

    // residuals of the conditions the solve imposed
    double ode = 0.0, cont = 0.0, jump = 0.0, wall = 0.0;
    for (const auto& b : s.bands)
        for (int i = 0; i <= 8; ++i) ode = std::max(ode, std::abs(b.odeResidual(b.lo + (b.hi - b.lo) * i / 8.0)));
    for (std::size_t k = 0; k + 1 < s.bands.size(); ++k) {
        const double rho = s.bands[k].hi;
        const double el = s.bands[k].eta(rho), er = s.bands[k + 1].eta(rho);
        cont = std::max(cont, std::abs(el - er));
        const double mu = std::abs(s.bands[k + 1].level - s.bands[k].level);
        jump = std::max(jump, std::abs(s.bands[k + 1].etaPrime(rho) - s.bands[k].etaPrime(rho) - el * mu));
    }
    {
        const auto& b0 = s.bands.front();
        const auto& b1 = s.bands.back();
        wall = std::max(std::abs(-b0.etaPrime(c.domain.r0) + b0.eta(c.domain.r0) * std::abs(b0.level - gin)),
                        std::abs(b1.etaPrime(c.domain.R) + b1.eta(c.domain.R) * std::abs(b1.level - gout)));
    }
    s.conditionReport["bandResidual"] = ode;
    s.conditionReport["continuityResidual"] = cont;
    s.conditionReport["jumpResidual"] = jump;
    s.conditionReport["wallResidual"] = wall;

    // dual field
    bool signsAgree = true;
    double compat = 0.0;
    if (!s.jumps.empty()) {
        const double sign = s.jumps.front().height >= 0 ? 1.0 : -1.0;
        s.fluxConstant = sign * s.jumps.front().radius * c.laws.alpha(s.jumps.front().eta);
        for (const auto& j : s.jumps) {
            if ((j.height >= 0) != (sign > 0)) signsAgree = false;
            const double Cj = sign * j.radius * c.laws.alpha(j.eta);
            compat = std::max(compat, std::abs(Cj - s.fluxConstant) / std::abs(s.fluxConstant));
        }
    }
    s.conditionReport["wCompatibility"] = compat;
    double etaMin = 1.0, etaMax = 0.0;
    const int samples = 2000;
    for (int i = 0; i <= samples; ++i) {
        const double r = c.domain.r0 + (c.domain.R - c.domain.r0) * double(i) / samples;
        const double e = s.eta(r);
        etaMin = std::min(etaMin, e);
        etaMax = std::max(etaMax, e);
        s.wMax = std::max(s.wMax, std::abs(s.w(r)));
    }
    s.conditionReport["etaMin"] = etaMin;
    s.conditionReport["wMax"] = s.wMax;
    s.found = true;
    s.admissible = signsAgree && compat <= 1e-8 && s.wMax <= 1.0 + 1e-12 && etaMin > 0.0 && etaMax <= 1.0 + 1e-12;
    if (!s.admissible) {
        s.message = !signsAgree ? "theta jumps change direction"
                    : compat > 1e-8 ? "w = C/(r alpha(eta)) cannot equal 1 at every jump"
                    : s.wMax > 1.0 + 1e-12 ? "|w| exceeds 1"
                                           : "eta leaves (0, 1]";
    }
    return s;
}

// ---------------------------------------------------------------------------
// Closed-form conditions (delta0 = 0)

/// f(r0, R) = gamma (r0 b(r0,R) - 1) - sqrt(r0)(sqrt(R) - sqrt(r0)) db/dR(r0,R);
/// an outer-wall jump is admissible iff f >= 0.
inline double outerJumpF(double r0, double R, double gammaR) {
    return gammaR * (r0 * bessel::bCombo(r0, R) - 1.0) -
           std::sqrt(r0) * (std::sqrt(R) - std::sqrt(r0)) * bessel::dbdy(r0, R);
}

struct OuterJumpCondition {
    double f;
    bool exists;
};

inline OuterJumpCondition conditionOuterJump(double r0, double R, double gammaR) {
    if (!(r0 > 0.0 && R > r0)) throw ValidationError("conditionOuterJump: need 0 < r0 < R");
    const double f = outerJumpF(r0, R, gammaR);
    return {f, f >= 0.0};
}

/// Admissible outer radii for an outer-wall jump: f(r0, .) >= 0 on [lower, upper].
struct RStarResult {
    double lower; ///< r0 when f >= 0 right from r0, otherwise R_*
    double upper; ///< R*, or kMaxX when f stays nonnegative up to the Bessel range
    bool bounded; ///< false when no sign change back to f < 0 was found before kMaxX
    int signChanges;
};

namespace detail {
template <class F> double bisect(F&& f, double a, double b, double relTol = 1e-12) {
    double fa = f(a);
    for (int i = 0; i < 200 && (b - a) > relTol * std::abs(b); ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm >= 0) == (fa >= 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}
} // namespace detail

/// Scans f(r0, R) on a geometric grid of R in (r0, 50] and refines the sign
/// changes by bisection. Returns none when f < 0 on the whole scan.
inline std::optional<RStarResult> findRStar(double r0, double gammaR, int samples = 4000) {
    if (!(r0 >= bessel::kMinX && r0 < bessel::kMaxX)) throw ValidationError("findRStar: r0 out of range");
    auto f = [&](double R) { return outerJumpF(r0, R, gammaR); };
    const double top = bessel::kMaxX;
    const double start = r0 * (1.0 + 1e-4);
    const double ratio = std::pow(top / start, 1.0 / double(samples));
    std::vector<std::pair<double, double>> changes; // (root, direction: +1 up, -1 down)
    double prevR = start, prevF = f(start);
    bool anyNonneg = prevF >= 0.0;
    for (int i = 1; i <= samples; ++i) {
        const double R = i == samples ? top : start * std::pow(ratio, double(i));
        const double v = f(R);
        if ((v >= 0.0) != (prevF >= 0.0)) changes.push_back({detail::bisect(f, prevR, R), v >= 0.0 ? 1.0 : -1.0});
        anyNonneg = anyNonneg || v >= 0.0;
        prevR = R;
        prevF = v;
    }
    if (!anyNonneg) return std::nullopt;
    RStarResult res{r0, top, false, int(changes.size())};
    const bool startsNonneg = f(start) >= 0.0;
    std::size_t k = 0;
    if (!startsNonneg) res.lower = changes[k++].first;
    if (k < changes.size()) {
        res.upper = changes[k].first;
        res.bounded = true;
    }
    return res;
}

/// Critical points of g(x) = f(r0, x) on (r0, xmax], counted by sign changes
/// of a centered difference of g.
inline int outerJumpCriticalPoints(double r0, double gammaR, double xmax, int samples = 4000) {
    auto g = [&](double x) { return outerJumpF(r0, x, gammaR); };
    int count = 0;
    double prev = 0.0;
    bool havePrev = false;
    for (int i = 1; i <= samples; ++i) {
        const double x = r0 + (xmax - r0) * double(i) / samples;
        const double hstep = 1e-5 * x;
        const double dg = (g(x + hstep) - g(x - hstep)) / (2.0 * hstep);
        if (havePrev && (dg > 0) != (prev > 0) && std::abs(dg) > 1e-12 && std::abs(prev) > 1e-12) ++count;
        if (std::abs(dg) > 1e-12) {
            prev = dg;
            havePrev = true;
        }
    }
    return count;
}

/// F(r0, r1, R); w(r0) <= 1 for the interior-jump state iff F <= gamma(R).
inline double interiorJumpF(double r0, double r1, double R) {
    return std::sqrt(r0) * (std::sqrt(r1) - std::sqrt(r0)) * bessel::dbdy(r0, R) /
           (r1 * bessel::bCombo(R, r1) * (r0 * bessel::bCombo(r0, r1) - 1.0));
}

inline double interiorJumpG(double r0, double r1, double R, double gammaR) {
    return gammaR * r1 * bessel::bCombo(R, r1) * (r0 * bessel::bCombo(r0, r1) - 1.0) -
           std::sqrt(r0) * (std::sqrt(r1) - std::sqrt(r0)) * bessel::dbdy(r0, R);
}

/// The sufficient condition: lim_{R->inf} G / I1(R) >= 0.
inline double interiorJumpSufficient(double r0, double r1, double gammaR) {
    const auto e0 = bessel::evalAll(r0), e1 = bessel::evalAll(r1);
    return gammaR * r1 * e1.k0 * (r0 * bessel::bCombo(r0, r1) - 1.0) -
           std::sqrt(r0) * (std::sqrt(r1) - std::sqrt(r0)) * e0.k1;
}

/// dF/dR = T1'(R)(T0(r1) + T1(r0)) F / ((T1(R) - T1(r0))(T0(r1) + T1(R))).
inline double monotonicityFinR(double r0, double r1, double R) {
    const double t0r1 = bessel::ratioT(0, r1), t1r0 = bessel::ratioT(1, r0), t1R = bessel::ratioT(1, R);
    return bessel::ratioT1Prime(R) * (t0r1 + t1r0) * interiorJumpF(r0, r1, R) / ((t1R - t1r0) * (t0r1 + t1R));
}

struct InteriorJumpReport {
    double F, G;
    double f;              ///< f(r0, r1): the necessary condition is f >= 0
    bool necessary;
    double sufficientValue;
    bool sufficient;
    double d;              ///< eta(r1)
    double dBound;         ///< (r0 b - 1)/(sqrt(r1 r0) b - 1), b = b(r0, r1)
    double etaR0;
    double wAtR0;          ///< r1 d^2 / (r0 eta(r0)^2)
    bool wOk;
    double printedRelationResidual; ///< residual of the printed d relation at d
};

/// One jump at r0 < r1 <= R with theta = gamma(R) on [r1, R] (delta0 = 0).
inline InteriorJumpReport conditionInteriorJump(double r0, double r1, double R, double gammaR) {
    if (!(r0 > 0.0 && r1 >= r0 && R >= r1)) throw ValidationError("conditionInteriorJump: need r0 <= r1 <= R");
    InteriorJumpReport rep{};
    const auto e0 = bessel::evalAll(r0), e1 = bessel::evalAll(r1), eR = bessel::evalAll(R);
    const double b01 = e1.i0 * e0.k1 + e0.i1 * e1.k0;
    // u' (r0) = 0 on [r0, r1], v'(R) = 0 on [r1, R]
    const double u = b01, up = e1.i1 * e0.k1 - e1.k1 * e0.i1;
    const double v = e1.i0 * eR.k1 + e1.k0 * eR.i1, vp = e1.i1 * eR.k1 - e1.k1 * eR.i1;
    const double J = vp / v - up / u; // (d - 1) J = d gamma
    rep.d = J / (J - gammaR);
    rep.etaR0 = 1.0 + (rep.d - 1.0) / (r0 * b01);
    rep.wAtR0 = r1 * rep.d * rep.d / (r0 * rep.etaR0 * rep.etaR0);
    rep.wOk = rep.wAtR0 <= 1.0;
    rep.dBound = (r0 * b01 - 1.0) / (std::sqrt(r1 * r0) * b01 - 1.0);
    if (r1 > r0 && R > r1) {
        rep.F = interiorJumpF(r0, r1, R);
        rep.f = outerJumpF(r0, r1, gammaR);
    } else {
        rep.F = 0.0;
        rep.f = 0.0;
    }
    rep.G = interiorJumpG(r0, r1, R, gammaR);
    rep.necessary = rep.f >= 0.0;
    rep.sufficientValue = interiorJumpSufficient(r0, r1, gammaR);
    rep.sufficient = rep.sufficientValue >= 0.0;
    const double t0 = e1.i0 / e1.k0, t1r1 = e1.i1 / e1.k1, t1r0 = e0.i1 / e0.k1, t1R = eR.i1 / eR.k1;
    const double coef = e1.k1 / e1.k0 * (t1r0 - t1R) * (t1r1 + t0) / ((t0 + t1R) * (t0 + t1r0));
    rep.printedRelationResidual = (rep.d - 1.0) * coef - rep.d * gammaR;
    return rep;
}

struct TwoJumpReport {
    double C1, C2, C3, C4;
    double d1Raw;                  ///< value of the (condition2jumps) quotient
    std::optional<double> d1;      ///< set when 0 < d1 <= d1bar
    double d1bar;
    double d2;                     ///< d1 sqrt(r1/r2)
    double theta0;                 ///< middle level from the first compatibility equation
    std::optional<double> wAtR0;   ///< (condition3), only for r1 > r0 and admissible d1
    bool condition3 = false;
    /// margins that are >= 0 when the always-true inequalities hold
    std::map<std::string, double> inequalities;
};

inline TwoJumpReport twoJumpSystem(double r0, double r1, double r2, double R, double gammaR) {
    if (!(r0 > 0.0 && r1 >= r0 && r2 > r1 && R >= r2))
        throw ValidationError("twoJumpSystem: need r0 <= r1 < r2 <= R");
    const auto e0 = bessel::evalAll(r0), e1 = bessel::evalAll(r1), e2 = bessel::evalAll(r2), eR = bessel::evalAll(R);
    const double T0r1 = e1.i0 / e1.k0, T0r2 = e2.i0 / e2.k0, T1r0 = e0.i1 / e0.k1, T1R = eR.i1 / eR.k1;
    const double D = T0r2 - T0r1;
    TwoJumpReport rep{};
    rep.C1 = -(T1r0 + T0r2) / (r1 * e1.k0 * e1.k0 * (T1r0 + T0r1) * D);
    rep.C2 = 1.0 / (r1 * e1.k0 * e2.k0 * D);
    rep.C3 = 1.0 / (r2 * e1.k0 * e2.k0 * D);
    rep.C4 = -(T1R + T0r1) / (r2 * e2.k0 * e2.k0 * (T1R + T0r2) * D);
    const double C1 = rep.C1, C2 = rep.C2, C3 = rep.C3, C4 = rep.C4;
    const double s = std::sqrt(r1 / r2), S = 1.0 / s;
    const double mixed = C1 + s * C2 + S * C3 + C4;
    rep.d1Raw = -(C1 + C2 + S * (C3 + C4)) / (gammaR - mixed);
    rep.d1bar = (C1 + C2) / (C1 + s * C2);
    rep.d2 = rep.d1Raw * s;
    rep.theta0 = (C1 * (rep.d1Raw - 1.0) + C2 * (rep.d2 - 1.0)) / rep.d1Raw;
    if (rep.d1Raw > 0.0 && rep.d1Raw <= rep.d1bar) rep.d1 = rep.d1Raw;
    if (rep.d1 && r1 > r0) {
        const double etaR0 = 1.0 + (*rep.d1 - 1.0) / (r0 * bessel::bCombo(r0, r1));
        rep.wAtR0 = r1 * (*rep.d1) * (*rep.d1) / (r0 * etaR0 * etaR0);
        rep.condition3 = *rep.wAtR0 <= 1.0;
    } else if (rep.d1) {
        rep.condition3 = true;
    }
    // relative margins, scaled by the magnitude of the terms involved
    const double lhs = (C1 + C2 + S * (C3 + C4)) / mixed;
    rep.inequalities["notAlways"] = lhs - rep.d1bar;
    rep.inequalities["productC1C4minusC2C3"] = (C1 * C4 - C2 * C3) / std::max(std::abs(C1 * C4), std::abs(C2 * C3));
    rep.inequalities["d1barAtMostOne"] = 1.0 - rep.d1bar;
    const double scale = std::abs(C1) + std::abs(C2) + std::abs(C3) + std::abs(C4);
    rep.inequalities["chainMixedBelowSum"] = ((C1 + C2 + C3 + C4) - mixed) / scale;
    rep.inequalities["chainSumNonpositive"] = -(C1 + C2 + C3 + C4) / scale;
    return rep;
}

/// Smallest gamma in [lo, hi] where pred switches from false to true, located
/// by a uniform scan with the given step followed by bisection.
template <class Pred>
std::optional<double> thresholdGamma(Pred&& pred, double lo, double hi, double step, double tol = 1e-10) {
    bool prev = pred(lo);
    if (prev) return lo;
    for (double g = lo + step; g <= hi + 1e-12; g += step) {
        const bool cur = pred(g);
        if (cur) {
            double a = g - step, b = g;
            while (b - a > tol) {
                const double m = 0.5 * (a + b);
                if (pred(m)) b = m;
                else a = m;
            }
            return b;
        }
    }
    return std::nullopt;
}

/// rho for (condition2jumps): smallest gamma(R) admitting d1 in (0, d1bar].
inline std::optional<double> thresholdCondition2(double r0, double r1, double r2, double R, double hi = 20.0) {
    return thresholdGamma([&](double g) { return twoJumpSystem(r0, r1, r2, R, g).d1.has_value(); }, 0.0, hi, 0.01);
}

/// rho for (condition3): smallest gamma(R) with w(r0) <= 1 (and an admissible d1).
inline std::optional<double> thresholdCondition3(double r0, double r1, double r2, double R, double hi = 20.0) {
    return thresholdGamma([&](double g) { return twoJumpSystem(r0, r1, r2, R, g).condition3; }, 0.0, hi, 0.01);
}

// ---------------------------------------------------------------------------
// Contour scan of G over (r1, R)

struct ContourCell {
    double r1, R;
    double G;
    double wAtR0;
    bool blue; ///< admissible: r1 <= R and G >= 0
    bool gray; ///< masked: r1 > R (or r1 == R, degenerate)
};

inline std::vector<ContourCell> scanInteriorJumpContour(double r0, double gammaR, double r1Min, double r1Max,
                                                        double RMin, double RMax, int nr1, int nR) {
    if (nr1 < 2 || nR < 2) throw ValidationError("contour grid needs at least 2 points per axis");
    std::vector<ContourCell> cells;
    cells.reserve(std::size_t(nr1) * std::size_t(nR));
    for (int i = 0; i < nr1; ++i) {
        const double r1 = r1Min + (r1Max - r1Min) * i / double(nr1 - 1);
        for (int j = 0; j < nR; ++j) {
            const double R = RMin + (RMax - RMin) * j / double(nR - 1);
            ContourCell c{r1, R, NAN, NAN, false, false};
            if (r1 >= R || r1 <= r0) {
                c.gray = true;
            } else {
                c.G = interiorJumpG(r0, r1, R, gammaR);
                c.wAtR0 = conditionInteriorJump(r0, r1, R, gammaR).wAtR0;
                c.blue = c.G >= 0.0;
            }
            cells.push_back(c);
        }
    }
    return cells;
}

// ---------------------------------------------------------------------------
// Cross-validation against the dynamics

struct CrossValidation {
    bool converged = false;
    std::size_t steps = 0;
    double etaL2 = 0.0;      ///< |eta_inf - eta*|_{L2} / |1|_{L2}
    double thetaL1 = 0.0;    ///< |theta_inf - theta*|_{L1} / |1|_{L1}
    double jumpDrift = 0.0;  ///< max over analytic jumps of the distance to the nearest steep cell
    double perturbation = 0.0;
    double tolerance = 0.0;
    /// etaL2 > tolerance: the dynamics left the candidate (expected for inadmissible states)
    bool divergent = false;
};

/// Runs the radial stepper from a perturbation of the analytic state and
/// measures how far the omega-limit lands from it.
/// The verdict uses the eta distance only: theta's distance is dominated by
/// the O(nu) smearing of the jumps.
inline CrossValidation crossValidateDynamics(const RadialSteadyState& st, StepConfig cfg, std::size_t n,
                                             double perturbation = 0.01, double tolerance = 1e-2) {
    if (!st.found) throw ValidationError("crossValidateDynamics needs a constructed steady state");
    auto grid = Grid::radial(st.domain.r0, st.domain.R, n);
    MaterialLaws laws = st.laws;
    if (laws.delta0 == 0.0) laws.delta0 = 1e-3;
    Stepper stepper(cfg, laws, Domain{st.domain}, grid);
    const double L = st.domain.R - st.domain.r0;
    State init{ScalarField(grid), ScalarField(grid), 0.0};
    ScalarField etaStar(grid), thetaStar(grid);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = grid->node(j);
        etaStar[j] = std::clamp(st.eta(r), 0.0, 1.0);
        thetaStar[j] = st.theta(r);
        const double bump = perturbation * std::sin(std::numbers::pi * (r - st.domain.r0) / L);
        init.eta[j] = std::clamp(etaStar[j] * (1.0 - bump), 0.0, 1.0);
        init.theta[j] = thetaStar[j] + bump * (st.domain.gammaOuter - st.domain.gammaInner);
    }
    const auto rec = stepper.runToOmegaLimit(init);
    CrossValidation out;
    out.converged = rec.converged;
    out.steps = rec.steps();
    out.perturbation = perturbation;
    const auto& e = rec.finalState.eta;
    const auto& t = rec.finalState.theta;
    double area = 0.0, de = 0.0, dt = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        area += grid->mass(j);
        de += grid->mass(j) * (e[j] - etaStar[j]) * (e[j] - etaStar[j]);
        dt += grid->mass(j) * std::abs(t[j] - thetaStar[j]);
    }
    out.etaL2 = std::sqrt(de / area);
    out.thetaL1 = dt / area;
    // jump drift: the analytic jump radius vs the center of the steepest theta cell nearby
    for (const auto& jmp : st.jumps) {
        std::size_t best = 0;
        double bestSlope = -1.0;
        for (std::size_t c = 0; c + 1 < n; ++c) {
            const double sl = std::abs(t[c + 1] - t[c]);
            if (sl > bestSlope && std::abs(grid->midpoint(c) - jmp.radius) < 0.25 * L) {
                bestSlope = sl;
                best = c;
            }
        }
        out.jumpDrift = std::max(out.jumpDrift, std::abs(grid->midpoint(best) - jmp.radius));
    }
    out.tolerance = tolerance;
    out.divergent = !(out.etaL2 <= tolerance);
    return out;
}

} // namespace kwc::radial
