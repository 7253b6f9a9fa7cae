#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "kwc/stepper.hpp"

namespace kwc::oracle {

inline StepConfig config(double h, double nu) {
    StepConfig c;
    c.h = h;
    c.norm = regnorm::RegularizedNorm(regnorm::Kind::Hyperbola, nu);
    return c;
}

// The eta-step minimizes this strictly convex quadratic in eta.
inline double etaEnergy(const std::vector<double>& e, const ScalarField& etaPrev, const ScalarField& thetaPrev, double h,
                        const regnorm::RegularizedNorm& norm, const MaterialLaws& laws) {
    const Grid& g = *etaPrev.grid;
    const double hx = g.spacing();
    double s = 0.0;
    for (std::size_t j = 0; j < e.size(); ++j)
        s += g.mass(j) * ((e[j] - etaPrev[j]) * (e[j] - etaPrev[j]) / (2 * h) + laws.G(e[j]));
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double de = (e[c + 1] - e[c]) / hx;
        const double phi = norm.profile((thetaPrev[c + 1] - thetaPrev[c]) / hx);
        s += g.cellMeasure(c) * (0.5 * de * de + 0.5 * (laws.alpha(e[c]) + laws.alpha(e[c + 1])) * phi);
    }
    return s;
}

// Dense minimizer of etaEnergy: Hessian and gradient at 0 by exact
// differences of the quadratic, then LU.
inline std::vector<double> etaOracle(const ScalarField& etaPrev, const ScalarField& thetaPrev, double h,
                                     const regnorm::RegularizedNorm& norm, const MaterialLaws& laws) {
    const std::size_t n = etaPrev.size();
    std::vector<double> z(n, 0.0);
    const double e0 = etaEnergy(z, etaPrev, thetaPrev, h, norm, laws);
    std::vector<double> ei(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = 1.0;
        ei[i] = etaEnergy(z, etaPrev, thetaPrev, h, norm, laws);
        z[i] = 0.0;
    }
    Eigen::MatrixXd H(n, n);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = -1.0;
        const double em = etaEnergy(z, etaPrev, thetaPrev, h, norm, laws);
        z[i] = 0.0;
        b(i) = -(ei[i] - em) / 2.0;
        for (std::size_t j = i; j < n && j <= i + 1; ++j) {
            z[i] += 1.0;
            z[j] += 1.0;
            const double eij = etaEnergy(z, etaPrev, thetaPrev, h, norm, laws);
            z[i] = z[j] = 0.0;
            H(i, j) = H(j, i) = (i == j) ? (ei[i] + em - 2 * e0) : (eij - ei[i] - ei[j] + e0);
        }
        for (std::size_t j = i + 2; j < n; ++j) H(i, j) = H(j, i) = 0.0; // cells couple neighbours only
    }
    const Eigen::VectorXd x = H.fullPivLu().solve(b);
    return {x.data(), x.data() + n};
}

// Cyclic coordinate descent on the theta objective, assembled here from the
// primitives; each coordinate is minimized exactly by bisection on its
// (monotone) partial derivative. Returns the minimizer after stagnation.
inline std::vector<double> coordinateDescent(const ScalarField& eta, const ScalarField& prev, const ScalarField& hm, double h,
                                             const regnorm::RegularizedNorm& norm, const MaterialLaws& laws) {
    const Grid& g = *eta.grid;
    const std::size_t n = g.size();
    const double hx = g.spacing(), nu2 = norm.nu() * norm.nu();
    std::vector<double> z = prev.values;
    auto beta = [&](std::size_t c) { return 0.5 * (laws.alpha(eta[c]) + laws.alpha(eta[c + 1])); };
    auto partial = [&](std::size_t j, double t) {
        const double sl = (t - z[j - 1]) / hx, sr = (z[j + 1] - t) / hx;
        const double hl = (hm[j] - hm[j - 1]) / hx, hr = (hm[j + 1] - hm[j]) / hx;
        return g.mass(j) * laws.alpha0(eta[j]) * (t - prev[j]) / h +
               g.cellMeasure(j - 1) * (beta(j - 1) * norm.slope(sl) + nu2 * (sl - hl)) / hx -
               g.cellMeasure(j) * (beta(j) * norm.slope(sr) + nu2 * (sr - hr)) / hx;
    };
    for (int sweep = 0; sweep < 200000; ++sweep) {
        double moved = 0.0;
        for (std::size_t j = 1; j + 1 < n; ++j) {
            double a = z[j] - 1.0, b = z[j] + 1.0;
            while (partial(j, a) > 0) a -= 1.0;
            while (partial(j, b) < 0) b += 1.0;
            for (int i = 0; i < 100 && b - a > 1e-16 * (1 + std::abs(a)); ++i) {
                const double m = 0.5 * (a + b);
                (partial(j, m) > 0 ? b : a) = m;
            }
            moved = std::max(moved, std::abs(0.5 * (a + b) - z[j]));
            z[j] = 0.5 * (a + b);
        }
        if (moved < 1e-15) break;
    }
    return z;
}

inline State randomState(const GridPtr& g, const BoundaryValues& bv, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    State s{ScalarField(g), ScalarField(g), 0.0};
    const double lo = std::min(bv.lo, bv.hi), hi = std::max(bv.lo, bv.hi);
    for (std::size_t j = 0; j < g->size(); ++j) {
        s.eta[j] = u(rng);
        s.theta[j] = lo + (hi - lo) * u(rng);
    }
    s.theta[0] = bv.lo;
    s.theta.values.back() = bv.hi;
    return s;
}

} // namespace kwc::oracle
