#pragma once

// Closed-form 1D steady states on (0,1) with gamma(0) = 0 < gamma(1).
//
// On each interval (a_k, b_k) theta is constant and
//   eta = 1 + (d - 1) cosh(x - c_k) / cosh(hw_k),
// with center c_k and half-width hw_k; off the intervals eta = d and theta
// has the absolutely continuous density (1 - d)/d. Every interval end that is
// not a reflecting domain boundary carries a theta atom of height
// ((1 - d)/d) tanh(hw_k) (a boundary mismatch |theta - gamma| when the end is
// 0 or 1). The Dirichlet budget
//   ((1 - d)/d) (L_free + sum over atom ends of tanh(hw_k)) = gamma(1)
// then fixes d = S / (S + gamma(1)).
//
// Boundary contact: an interval touching 0 or 1 is either Mismatch (the
// symmetric profile above, with a boundary atom) or Reflecting (eta' = 0 at
// the boundary, no atom there; the profile is centered on the boundary with
// half-width equal to the interval length).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kwc/errors.hpp"
#include "kwc/grid.hpp"
#include "kwc/io.hpp"
#include "kwc/model.hpp"

namespace kwc::steady1d {

enum class Contact { Mismatch, Reflecting };

struct Interval {
    double a;
    double b;
    /// only meaningful when a == 0 / b == 1
    Contact left = Contact::Mismatch;
    Contact right = Contact::Mismatch;

    bool reflectsLeft() const noexcept { return a == 0.0 && left == Contact::Reflecting; }
    bool reflectsRight() const noexcept { return b == 1.0 && right == Contact::Reflecting; }
    double center() const noexcept { return reflectsLeft() ? 0.0 : reflectsRight() ? 1.0 : 0.5 * (a + b); }
    double halfWidth() const noexcept { return reflectsLeft() || reflectsRight() ? b - a : 0.5 * (b - a); }
    /// number of theta atoms this interval carries (0, 1 or 2)
    int atomEnds() const noexcept { return 2 - int(reflectsLeft()) - int(reflectsRight()); }
};

/// Ordered intervals; neighbours may touch (b_k = a_{k+1}), in which case
/// their atoms at the common point add up.
struct JumpSet1D {
    std::vector<Interval> intervals;

    void validate() const {
        for (std::size_t k = 0; k < intervals.size(); ++k) {
            const auto& iv = intervals[k];
            if (!(iv.a >= 0.0 && iv.a < iv.b && iv.b <= 1.0))
                throw ValidationError("jump interval " + std::to_string(k) + " must satisfy 0 <= a < b <= 1");
            if (k > 0 && iv.a < intervals[k - 1].b)
                throw ValidationError("jump intervals " + std::to_string(k - 1) + " and " + std::to_string(k) +
                                      " overlap or are out of order");
            if (iv.reflectsLeft() && iv.reflectsRight())
                throw ValidationError("an interval reflecting at both ends carries no jump");
        }
    }

    double freeLength() const noexcept {
        double s = 1.0;
        for (const auto& iv : intervals) s -= iv.b - iv.a;
        return std::max(0.0, s);
    }

    /// S = L_free + sum over atom ends of tanh(hw).
    double budgetWeight() const {
        double s = freeLength();
        for (const auto& iv : intervals) s += double(iv.atomEnds()) * std::tanh(iv.halfWidth());
        return s;
    }
};

/// ((1-d)/d) S - gamma, which vanishes at the steady value of d.
inline double budgetResidual(const JumpSet1D& jumps, double gammaRight, double d) {
    return (1.0 - d) / d * jumps.budgetWeight() - gammaRight;
}

/// The unique d in (0, 1] solving the budget identity (closed form; the left
/// side is strictly decreasing in d).
inline double solveD(const JumpSet1D& jumps, double gammaRight) {
    jumps.validate();
    if (!(gammaRight >= 0.0) || !std::isfinite(gammaRight))
        throw ValidationError("solveD: gammaRight must be finite and >= 0");
    const double S = jumps.budgetWeight();
    if (!(S > 0.0)) throw ValidationError("solveD: jump set leaves no room for the orientation budget");
    return S / (S + gammaRight);
}

struct Atom {
    double location;
    double height;
};

struct SteadyState1D {
    double d = 1.0;
    double gammaRight = 0.0;
    JumpSet1D jumps;
    std::vector<Atom> atoms; ///< sorted by location; coincident atoms merged
    std::function<double(double)> eta;
    std::function<double(double)> etaPrime;
    /// density of the absolutely continuous part of theta'
    std::function<double(double)> thetaDensity;
    std::function<double(double)> w;

    /// theta at x including every atom at locations < x (and the atom at 0 for x > 0)
    double theta(double x) const {
        double t = 0.0;
        double prev = 0.0;
        for (const auto& iv : jumps.intervals) {
            const double lo = std::min(iv.a, x);
            t += std::max(0.0, lo - prev) * density();
            prev = std::max(prev, std::min(iv.b, x));
        }
        t += std::max(0.0, x - prev) * density();
        for (const auto& at : atoms)
            if (at.location < x || (at.location == 0.0 && x > 0.0)) t += at.height;
        return t;
    }

    double density() const noexcept { return (1.0 - d) / d; }
};

inline SteadyState1D buildSteadyState(const JumpSet1D& jumps, double gammaRight, const MaterialLaws& laws = {}) {
    SteadyState1D s;
    s.d = solveD(jumps, gammaRight);
    s.gammaRight = gammaRight;
    s.jumps = jumps;
    const double d = s.d;
    const double rho = (1.0 - d) / d;
    for (const auto& iv : jumps.intervals) {
        const double h = rho * std::tanh(iv.halfWidth());
        if (!iv.reflectsLeft()) s.atoms.push_back({iv.a, h});
        if (!iv.reflectsRight()) s.atoms.push_back({iv.b, h});
    }
    std::vector<Atom> merged;
    for (const auto& at : s.atoms) {
        if (!merged.empty() && merged.back().location == at.location)
            merged.back().height += at.height;
        else
            merged.push_back(at);
    }
    s.atoms = std::move(merged);

    const auto ivs = jumps.intervals;
    auto find = [ivs](double x) -> const Interval* {
        for (const auto& iv : ivs)
            if (x >= iv.a && x <= iv.b) return &iv;
        return nullptr;
    };
    s.eta = [find, d](double x) {
        const Interval* iv = find(x);
        if (!iv) return d;
        return 1.0 + (d - 1.0) * std::cosh(x - iv->center()) / std::cosh(iv->halfWidth());
    };
    s.etaPrime = [find, d](double x) {
        const Interval* iv = find(x);
        if (!iv) return 0.0;
        return (d - 1.0) * std::sinh(x - iv->center()) / std::cosh(iv->halfWidth());
    };
    s.thetaDensity = [find, rho](double x) { return find(x) ? 0.0 : rho; };
    const double alphaD = laws.alpha(d);
    s.w = [find, d, alphaD, laws](double x) {
        const Interval* iv = find(x);
        if (!iv) return 1.0;
        const double e = 1.0 + (d - 1.0) * std::cosh(x - iv->center()) / std::cosh(iv->halfWidth());
        return alphaD / laws.alpha(e);
    };
    return s;
}

struct EulerLagrangeReport {
    double interior = 0.0; ///< max |eta'' - (eta - 1 + eta |theta'|)| at interior nodes of smooth pieces
    double jump = 0.0;     ///< max |[eta'] - eta |[theta]|| at interior atoms
    double boundary = 0.0; ///< max |-+eta' + eta |theta - gamma|| at 0 and 1
    double hx = 0.0;
    /// interior / hx^2
    double constant = 0.0;

    double worst() const noexcept { return std::max({interior, jump, boundary}); }
};

/// Finite-difference check of the stationary system on the grid nodes.
/// Interval endpoints must coincide with nodes (to 1e-9 h_x).
inline EulerLagrangeReport verifyEulerLagrange(const SteadyState1D& s, const Grid& grid) {
    if (grid.kind() != GridKind::Interval) throw ValidationError("verifyEulerLagrange needs an interval grid");
    const std::size_t n = grid.size();
    const double hx = grid.spacing();
    std::vector<char> breakpoint(n, 0);
    auto nodeOf = [&](double x) {
        const double jr = x / hx;
        const double j = std::round(jr);
        if (std::abs(jr - j) > 1e-9) throw ValidationError("interval endpoint " + std::to_string(x) + " is not a grid node");
        return std::size_t(j);
    };
    for (const auto& iv : s.jumps.intervals) {
        breakpoint[nodeOf(iv.a)] = 1;
        breakpoint[nodeOf(iv.b)] = 1;
    }
    std::vector<double> eta(n);
    for (std::size_t j = 0; j < n; ++j) eta[j] = s.eta(grid.node(j));
    EulerLagrangeReport r;
    r.hx = hx;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        if (breakpoint[j]) continue;
        const double fd = (eta[j + 1] - 2.0 * eta[j] + eta[j - 1]) / (hx * hx);
        const double rhs = eta[j] - 1.0 + eta[j] * s.thetaDensity(grid.node(j));
        r.interior = std::max(r.interior, std::abs(fd - rhs));
    }
    // second-order one-sided derivatives
    auto rightSlope = [&](std::size_t j) { return (-3.0 * eta[j] + 4.0 * eta[j + 1] - eta[j + 2]) / (2.0 * hx); };
    auto leftSlope = [&](std::size_t j) { return (3.0 * eta[j] - 4.0 * eta[j - 1] + eta[j - 2]) / (2.0 * hx); };
    double atom0 = 0.0, atom1 = 0.0;
    for (const auto& at : s.atoms) {
        if (at.location == 0.0) {
            atom0 = at.height;
        } else if (at.location == 1.0) {
            atom1 = at.height;
        } else {
            const std::size_t j = nodeOf(at.location);
            if (j < 2 || j + 2 >= n) throw ValidationError("atom too close to the boundary for the verifier");
            const double res = rightSlope(j) - leftSlope(j) - eta[j] * std::abs(at.height);
            r.jump = std::max(r.jump, std::abs(res));
        }
    }
    r.boundary = std::max(std::abs(-rightSlope(0) + eta[0] * std::abs(atom0)),
                          std::abs(leftSlope(n - 1) + eta[n - 1] * std::abs(atom1)));
    r.constant = r.interior / (hx * hx);
    return r;
}

/// Reads a jump set off a discrete (near-)steady state from the slopes of
/// theta. With d = min(eta), cells are flat (slope below half the free
/// density (1 - d)/d), steep (above twice it, a smeared atom) or free.
/// Runs of at least minRun flat cells become intervals. An interval end
/// followed (possibly after a few free transition cells) by a steep cluster
/// sits at the cluster's |dtheta|-weighted centre, or at the wall (Mismatch)
/// when the cluster reaches it; a run touching the wall reflects there.
inline JumpSet1D inferJumpSet(const ScalarField& eta, const ScalarField& theta, std::size_t minRun = 3) {
    requireSameGrid(eta, theta);
    const Grid& g = *eta.grid;
    const std::size_t cells = g.cells();
    const double hx = g.spacing();
    const double mn = *std::min_element(eta.values.begin(), eta.values.end());
    JumpSet1D js;
    if (!(mn > 0.0) || mn >= 1.0) return js;
    const double density = (1.0 - mn) / mn;
    enum Kind { Flat, Free, Steep };
    std::vector<Kind> kind(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        const double slope = std::abs(theta[c + 1] - theta[c]) / hx;
        kind[c] = slope < 0.5 * density ? Flat : slope > 2.0 * density ? Steep : Free;
    }
    // Walks from cell c in direction dir over free cells into a steep
    // cluster. Returns false when no steep cell follows (a free region
    // starts); otherwise the |dtheta|-weighted centre of the walked cells,
    // and whether the cluster runs into the wall.
    auto cluster = [&](std::size_t c, int dir, double& centre, bool& wall) {
        std::ptrdiff_t k = std::ptrdiff_t(c);
        const std::ptrdiff_t end = dir > 0 ? std::ptrdiff_t(cells) : -1;
        while (k != end && kind[std::size_t(k)] == Free) k += dir;
        if (k == end || kind[std::size_t(k)] != Steep) return false;
        while (k != end && kind[std::size_t(k)] == Steep) k += dir;
        wall = k == end;
        double m = 0.0, mx = 0.0;
        for (std::ptrdiff_t i = std::ptrdiff_t(c); i != k; i += dir) {
            const double jump = std::abs(theta[std::size_t(i) + 1] - theta[std::size_t(i)]);
            m += jump;
            mx += jump * g.midpoint(std::size_t(i));
        }
        centre = mx / m;
        return true;
    };
    std::size_t c = 0;
    while (c < cells) {
        if (kind[c] != Flat) {
            ++c;
            continue;
        }
        std::size_t k = c;
        while (k + 1 < cells && kind[k + 1] == Flat) ++k;
        if (k + 1 - c >= minRun) {
            Interval iv;
            bool wall = false;
            double x = 0.0;
            if (c == 0) {
                iv.a = 0.0;
                iv.left = Contact::Reflecting;
            } else if (cluster(c - 1, -1, x, wall)) {
                iv.a = wall ? 0.0 : x;
            } else {
                iv.a = g.node(c);
            }
            if (k + 1 == cells) {
                iv.b = 1.0;
                iv.right = Contact::Reflecting;
            } else if (cluster(k + 1, +1, x, wall)) {
                iv.b = wall ? 1.0 : x;
            } else {
                iv.b = g.node(k + 1);
            }
            if (!js.intervals.empty() && iv.a < js.intervals.back().b) iv.a = js.intervals.back().b;
            js.intervals.push_back(iv);
        }
        c = k + 1;
    }
    return js;
}

/// CSV columns x, eta, thetaDensity, w on the given grid.
inline void writeSteadyCsv(const SteadyState1D& s, const Grid& grid, const std::filesystem::path& path,
                           const io::Provenance& prov) {
    io::CsvWriter csv(path, prov, {"x", "eta", "thetaDensity", "w"});
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double x = grid.node(j);
        csv.row({x, s.eta(x), s.thetaDensity(x), s.w(x)});
    }
    csv.close();
}

inline nlohmann::ordered_json toJson(const SteadyState1D& s) {
    nlohmann::ordered_json atoms = nlohmann::ordered_json::array();
    for (const auto& at : s.atoms) atoms.push_back({{"location", at.location}, {"height", at.height}});
    nlohmann::ordered_json ivs = nlohmann::ordered_json::array();
    for (const auto& iv : s.jumps.intervals)
        ivs.push_back({{"a", iv.a},
                       {"b", iv.b},
                       {"left", iv.left == Contact::Reflecting ? "reflecting" : "mismatch"},
                       {"right", iv.right == Contact::Reflecting ? "reflecting" : "mismatch"}});
    return {{"d", s.d}, {"gammaRight", s.gammaRight}, {"density", s.density()}, {"intervals", ivs}, {"atoms", atoms}};
}

} // namespace kwc::steady1d
