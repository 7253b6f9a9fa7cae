#pragma once

// Discrete sharp free energy F_gamma and relaxed energy F^nu_gamma.
//
//   dirichlet       1/2 sum_c l_c (grad eta)_c^2
//   potential       sum_j w_j G(eta_j)
//   weightedTV      sum_c l_c beta_c |grad theta|_c,
//                   beta_c = (alpha(eta_c) + alpha(eta_{c+1})) / 2
//   boundaryPenalty sum over the two ends of rho_e alpha(eta_e) |theta_e - gamma_e|
//   nuTerm          nu^2/2 sum_c l_c (grad (theta - [gamma]^hm))_c^2
//
// The cell weight beta_c is the same one the stepper differentiates, so the
// eta-step is the exact gradient flow of relaxedTotal.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "kwc/grid.hpp"
#include "kwc/model.hpp"
#include "kwc/regnorm.hpp"

namespace kwc {

struct EnergyReport {
    double dirichlet = 0.0;
    double potential = 0.0;
    double weightedTV = 0.0;
    /// weighted TV with |.|_nu in place of |.|; zero in a sharp-only report
    double weightedTVnu = 0.0;
    double boundaryPenalty = 0.0;
    double nuTerm = 0.0;
    double sharpTotal = 0.0;
    /// only set by relaxedEnergy
    std::optional<double> relaxedTotal;
};

namespace detail {

inline double cellWeight(const MaterialLaws& laws, const ScalarField& eta, std::size_t c) {
    return 0.5 * (laws.alpha(eta[c]) + laws.alpha(eta[c + 1]));
}

inline EnergyReport bulkParts(const ScalarField& eta, const ScalarField& theta, const MaterialLaws& laws) {
    requireSameGrid(eta, theta);
    const Grid& g = *eta.grid;
    const double hx = g.spacing();
    EnergyReport r;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double de = (eta[c + 1] - eta[c]) / hx;
        const double dt = (theta[c + 1] - theta[c]) / hx;
        r.dirichlet += 0.5 * g.cellMeasure(c) * de * de;
        r.weightedTV += g.cellMeasure(c) * cellWeight(laws, eta, c) * std::abs(dt);
    }
    for (std::size_t j = 0; j < g.size(); ++j) r.potential += g.mass(j) * laws.G(eta[j]);
    return r;
}

} // namespace detail

inline EnergyReport sharpEnergy(const ScalarField& eta, const ScalarField& theta, const MaterialLaws& laws,
                                const Domain& domain) {
    EnergyReport r = detail::bulkParts(eta, theta, laws);
    const auto bv = boundaryValues(domain);
    const Grid& g = *eta.grid;
    const std::size_t last = g.size() - 1;
    r.boundaryPenalty = g.boundaryWeightLo() * laws.alpha(eta[0]) * std::abs(theta[0] - bv.lo) +
                        g.boundaryWeightHi() * laws.alpha(eta[last]) * std::abs(theta[last] - bv.hi);
    r.sharpTotal = r.dirichlet + r.potential + r.weightedTV + r.boundaryPenalty;
    return r;
}

/// Throws DomainError unless theta's end nodes equal gamma exactly.
inline void requirePinned(const ScalarField& theta, const Domain& domain) {
    const auto bv = boundaryValues(domain);
    if (theta[0] != bv.lo)
        throw DomainError("theta violates the Dirichlet constraint at the first endpoint (x = " +
                          std::to_string(theta.grid->node(0)) + ")");
    if (theta.values.back() != bv.hi)
        throw DomainError("theta violates the Dirichlet constraint at the last endpoint (x = " +
                          std::to_string(theta.grid->nodes().back()) + ")");
}

inline double nuTermOf(const ScalarField& theta, const ScalarField& harmonic, double nu) {
    const Grid& g = *theta.grid;
    const double hx = g.spacing();
    double s = 0.0;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double d = ((theta[c + 1] - harmonic[c + 1]) - (theta[c] - harmonic[c])) / hx;
        s += g.cellMeasure(c) * d * d;
    }
    return 0.5 * nu * nu * s;
}

inline EnergyReport relaxedEnergy(const ScalarField& eta, const ScalarField& theta, const MaterialLaws& laws,
                                  const Domain& domain, const regnorm::RegularizedNorm& norm,
                                  const ScalarField* harmonic = nullptr) {
    requirePinned(theta, domain);
    EnergyReport r = detail::bulkParts(eta, theta, laws);
    const Grid& g = *eta.grid;
    const double hx = g.spacing();
    for (std::size_t c = 0; c < g.cells(); ++c)
        r.weightedTVnu += g.cellMeasure(c) * detail::cellWeight(laws, eta, c) *
                          norm.profile((theta[c + 1] - theta[c]) / hx);
    ScalarField hm;
    if (!harmonic) {
        hm = harmonicExtension(domain, eta.grid);
        harmonic = &hm;
    }
    r.nuTerm = nuTermOf(theta, *harmonic, norm.nu());
    r.boundaryPenalty = 0.0;
    r.sharpTotal = r.dirichlet + r.potential + r.weightedTV;
    r.relaxedTotal = r.dirichlet + r.potential + r.weightedTVnu + r.nuTerm;
    return r;
}

} // namespace kwc
