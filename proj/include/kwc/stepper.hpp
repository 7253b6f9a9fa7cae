#pragma once

// Minimizing-movement scheme for the relaxed KWC system.
//
// One step of size h:
//   eta_i   = argmin (1/2h)|eta - eta_{i-1}|^2 + F^nu(eta, theta_{i-1})
//   theta_i = argmin (1/2h)|sqrt(alpha0(eta_i))(z - theta_{i-1})|^2 + Phi^nu(alpha(eta_i); z)
// with theta's end nodes pinned to gamma. For the concrete laws the eta
// problem is quadratic, so it is a single tridiagonal solve:
//   (M/h + M + K + C) eta = M eta_{i-1}/h + M 1,
// M the lumped mass, K the stiffness, C = diag(1/2 sum_{c ~ j} l_c |grad theta_{i-1}|_nu,c).
// The theta problem is smooth and strongly convex (the nu^2 term) and is
// solved by damped Newton on the interior nodes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kwc/energy.hpp"
#include "kwc/errors.hpp"
#include "kwc/grid.hpp"
#include "kwc/model.hpp"
#include "kwc/regnorm.hpp"
#include "kwc/tridiag.hpp"

namespace kwc {

struct StepConfig {
    /// h* = min(h0, 1/(1 + |g|_{W^{1,inf}(0,1)})) = 1/2 for g(eta) = eta - 1
    static constexpr double hStar = 0.5;

    double h = 0.1;
    regnorm::RegularizedNorm norm{regnorm::Kind::Hyperbola, 0.05};
    std::size_t maxSteps = 10000;
    double steadyTolerance = 1e-6;
    double newtonTol = 1e-10;
    std::size_t newtonMaxIter = 1000;
    /// keep every k-th state in the record (0: first and last only)
    std::size_t snapshotEvery = 0;
    /// absolute slack of the energy inequality, scaled by (1 + |F_0|)
    double energySlack = 1e-9;
    /// tolerance of the maximum-principle assertions
    double boundsSlack = 1e-10;

    void validate() const {
        if (!(h > 0.0 && h < hStar))
            throw ValidationError("time step h must lie in (0, h*) with h* = 0.5, got " + std::to_string(h));
        if (!(steadyTolerance > 0.0) || !(newtonTol > 0.0)) throw ValidationError("tolerances must be positive");
        if (newtonMaxIter == 0) throw ValidationError("newtonMaxIter must be positive");
    }
};

struct State {
    ScalarField eta;
    ScalarField theta;
    double t = 0.0;
};

struct StepNorms {
    double eta;   ///< |eta_i - eta_{i-1}|_{L2}
    double theta; ///< |sqrt(alpha0(eta_i)) (theta_i - theta_{i-1})|_{L2}
};

struct ThetaSolveInfo {
    std::size_t iterations = 0;
    double residual = 0.0;
    /// max(newtonTol, rounding floor) actually enforced
    double tolerance = 0.0;
    double objectiveBefore = 0.0;
    double objectiveAfter = 0.0;
};

struct OmegaResiduals {
    /// max_j |r_j| of the stationary eta identity tested with hat functions
    double s1Weak = 0.0;
    /// max_j |r_j| / w_j, the same residual in strong (pointwise) scaling
    double s1Strong = 0.0;
    /// min over the test battery of Phi(theta + eps phi) - Phi(theta); >= 0 at a minimizer
    double minimalityGap = 0.0;
};

struct TrajectoryRecord {
    std::vector<double> times; ///< times of the saved snapshots
    std::vector<ScalarField> etaSnapshots;
    std::vector<ScalarField> thetaSnapshots;
    std::vector<double> stepTimes;             ///< t_i for i = 0..m
    std::vector<EnergyReport> energyReports;   ///< entry i is the state after step i (0 = initial)
    std::vector<StepNorms> stepNorms;          ///< entry i-1 belongs to step i
    std::vector<std::string> projectionNotes;  ///< adjustments applied to the initial data
    bool converged = false;
    State finalState;
    OmegaResiduals residuals;

    std::size_t steps() const noexcept { return stepNorms.size(); }
};

/// The per-step theta objective on a fixed eta, exposed for testing.
class ThetaObjective {
  public:
    ThetaObjective(const ScalarField& etaNew, const ScalarField& thetaPrev, double h,
                   const regnorm::RegularizedNorm& norm, const MaterialLaws& laws, const ScalarField& harmonic)
        : grid_(etaNew.grid), prev_(thetaPrev.values), norm_(norm) {
        const Grid& g = *grid_;
        const std::size_t n = g.size();
        metric_.resize(n);
        for (std::size_t j = 0; j < n; ++j) metric_[j] = g.mass(j) * laws.alpha0(etaNew[j]) / h;
        beta_.resize(g.cells());
        hmSlope_.resize(g.cells());
        for (std::size_t c = 0; c < g.cells(); ++c) {
            beta_[c] = detail::cellWeight(laws, etaNew, c);
            hmSlope_[c] = (harmonic[c + 1] - harmonic[c]) / g.spacing();
        }
    }

    double value(std::span<const double> z) const {
        const Grid& g = *grid_;
        const double hx = g.spacing();
        const double nu2 = norm_.nu() * norm_.nu();
        double q = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double d = z[j] - prev_[j];
            q += 0.5 * metric_[j] * d * d;
        }
        for (std::size_t c = 0; c < g.cells(); ++c) {
            const double s = (z[c + 1] - z[c]) / hx;
            const double e = s - hmSlope_[c];
            q += g.cellMeasure(c) * (beta_[c] * norm_.profile(s) + 0.5 * nu2 * e * e);
        }
        return q;
    }

    /// Full-length gradient; entries at the pinned end nodes are set to 0.
    std::vector<double> gradient(std::span<const double> z) const {
        const Grid& g = *grid_;
        const std::size_t n = g.size();
        std::vector<double> grad(n, 0.0);
        const auto flux = fluxes(z);
        const double hx = g.spacing();
        for (std::size_t j = 1; j + 1 < n; ++j)
            grad[j] = metric_[j] * (z[j] - prev_[j]) +
                      (g.cellMeasure(j - 1) * flux[j - 1] - g.cellMeasure(j) * flux[j]) / hx;
        return grad;
    }

    /// Hessian restricted to the interior nodes 1..n-2.
    Tridiagonal hessian(std::span<const double> z) const {
        const Grid& g = *grid_;
        const std::size_t n = g.size();
        const double hx = g.spacing();
        const double nu2 = norm_.nu() * norm_.nu();
        std::vector<double> stiff(g.cells());
        for (std::size_t c = 0; c < g.cells(); ++c) {
            const double s = (z[c + 1] - z[c]) / hx;
            stiff[c] = g.cellMeasure(c) * (beta_[c] * norm_.curvature(s) + nu2) / (hx * hx);
        }
        Tridiagonal H(n - 2);
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const std::size_t i = j - 1;
            H.diag[i] = metric_[j] + stiff[j - 1] + stiff[j];
            if (j > 1) H.lower[i] = -stiff[j - 1];
            if (j + 2 < n) H.upper[i] = -stiff[j];
        }
        return H;
    }

    /// sqrt(sum_j grad_j^2 / w_j): the L2-dual norm of the gradient.
    double dualNorm(std::span<const double> grad) const {
        double s = 0.0;
        for (std::size_t j = 1; j + 1 < grad.size(); ++j) s += grad[j] * grad[j] / grid_->mass(j);
        return std::sqrt(s);
    }

    /// Rounding level of dualNorm(gradient(z)): first-order error propagation
    /// of the gradient evaluation in double precision, with a safety factor.
    /// Near a jump the curvature of |.|_nu is ~1/nu, which amplifies the
    /// rounding of the difference quotients, so this can exceed newtonTol.
    double roundoffFloor(std::span<const double> z) const {
        constexpr double eps = std::numeric_limits<double>::epsilon();
        const Grid& g = *grid_;
        const double hx = g.spacing();
        const double nu2 = norm_.nu() * norm_.nu();
        std::vector<double> dF(g.cells());
        for (std::size_t c = 0; c < g.cells(); ++c) {
            const double s = (z[c + 1] - z[c]) / hx;
            const double F = beta_[c] * std::abs(norm_.slope(s)) + nu2 * (std::abs(s) + std::abs(hmSlope_[c]));
            const double H = beta_[c] * norm_.curvature(s) + nu2;
            dF[c] = eps * (F + H * (std::abs(z[c + 1]) + std::abs(z[c])) / hx);
        }
        double acc = 0.0;
        for (std::size_t j = 1; j + 1 < z.size(); ++j) {
            const double e = eps * metric_[j] * (std::abs(z[j]) + std::abs(prev_[j])) +
                             (g.cellMeasure(j - 1) * dF[j - 1] + g.cellMeasure(j) * dF[j]) / hx;
            acc += e * e / g.mass(j);
        }
        return 8.0 * std::sqrt(acc);
    }

  private:
    std::vector<double> fluxes(std::span<const double> z) const {
        const Grid& g = *grid_;
        const double hx = g.spacing();
        const double nu2 = norm_.nu() * norm_.nu();
        std::vector<double> f(g.cells());
        for (std::size_t c = 0; c < g.cells(); ++c) {
            const double s = (z[c + 1] - z[c]) / hx;
            f[c] = beta_[c] * norm_.slope(s) + nu2 * (s - hmSlope_[c]);
        }
        return f;
    }

    GridPtr grid_;
    std::vector<double> prev_;
    regnorm::RegularizedNorm norm_;
    std::vector<double> metric_;
    std::vector<double> beta_;
    std::vector<double> hmSlope_;
};

/// Holds the per-run constants (grid, harmonic extension) and performs steps.
/// Single-threaded; independent instances share nothing.
class Stepper {
  public:
    Stepper(StepConfig cfg, MaterialLaws laws, Domain domain, GridPtr grid)
        : cfg_(std::move(cfg)), laws_(laws), domain_(std::move(domain)), grid_(std::move(grid)),
          harmonic_(harmonicExtension(domain_, grid_)) {
        cfg_.validate();
        laws_.validate();
        kwc::validate(domain_);
    }

    const StepConfig& config() const noexcept { return cfg_; }
    const MaterialLaws& laws() const noexcept { return laws_; }
    const Domain& domain() const noexcept { return domain_; }
    const GridPtr& grid() const noexcept { return grid_; }
    const ScalarField& harmonic() const noexcept { return harmonic_; }

    /// Assembled eta-step system (exposed so tests can compare against an
    /// independent dense assembly).
    std::pair<Tridiagonal, std::vector<double>> etaSystem(const ScalarField& etaPrev,
                                                          const ScalarField& thetaPrev) const {
        requireSameGrid(etaPrev, thetaPrev);
        const Grid& g = *grid_;
        const std::size_t n = g.size();
        const double hx = g.spacing();
        const double invh = 1.0 / cfg_.h;
        Tridiagonal A(n);
        std::vector<double> rhs(n);
        for (std::size_t j = 0; j < n; ++j) {
            A.diag[j] = g.mass(j) * (invh + 1.0);
            rhs[j] = g.mass(j) * (etaPrev[j] * invh + 1.0);
        }
        for (std::size_t c = 0; c < g.cells(); ++c) {
            const double k = g.cellMeasure(c) / (hx * hx);
            const double m = g.cellMeasure(c) * cfg_.norm.profile((thetaPrev[c + 1] - thetaPrev[c]) / hx);
            A.diag[c] += k + 0.5 * m;
            A.diag[c + 1] += k + 0.5 * m;
            A.upper[c] = -k;
            A.lower[c + 1] = -k;
        }
        return {std::move(A), std::move(rhs)};
    }

    ScalarField etaStep(const ScalarField& etaPrev, const ScalarField& thetaPrev) const {
        auto [A, rhs] = etaSystem(etaPrev, thetaPrev);
        ScalarField eta(grid_, A.solve(rhs));
        for (std::size_t j = 0; j < eta.size(); ++j) {
            if (!(eta[j] >= -cfg_.boundsSlack && eta[j] <= 1.0 + cfg_.boundsSlack))
                throw SchemeError("eta-step violates 0 <= eta <= 1 at node " + std::to_string(j) +
                                  " (eta = " + std::to_string(eta[j]) + ")");
        }
        return eta;
    }

    ThetaObjective thetaObjective(const ScalarField& etaNew, const ScalarField& thetaPrev) const {
        return ThetaObjective(etaNew, thetaPrev, cfg_.h, cfg_.norm, laws_, harmonic_);
    }

    ScalarField thetaStep(const ScalarField& etaNew, const ScalarField& thetaPrev,
                          ThetaSolveInfo* info = nullptr) const {
        requireSameGrid(etaNew, thetaPrev);
        requirePinned(thetaPrev, domain_);
        const ThetaObjective Q = thetaObjective(etaNew, thetaPrev);
        const std::size_t n = grid_->size();
        std::vector<double> z = thetaPrev.values;
        double q = Q.value(z);
        const double q0 = q;
        auto grad = Q.gradient(z);
        double res = Q.dualNorm(grad);
        std::size_t it = 0;
        std::vector<double> trial(n);
        double tol = std::max(cfg_.newtonTol, Q.roundoffFloor(z));
        while (res > tol) {
            if (it == cfg_.newtonMaxIter)
                throw SolverError("theta-step Newton did not converge in " + std::to_string(it) +
                                      " iterations (residual " + std::to_string(res) + ")",
                                  res);
            ++it;
            const Tridiagonal H = Q.hessian(z);
            std::vector<double> g(grad.begin() + 1, grad.end() - 1);
            std::vector<double> p = H.solve(g);
            double slope = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                p[i] = -p[i];
                slope += p[i] * g[i];
            }
            if (!(slope < 0.0)) { // not a descent direction: steepest descent
                slope = 0.0;
                for (std::size_t i = 0; i < p.size(); ++i) {
                    p[i] = -g[i] / H.diag[i];
                    slope += p[i] * g[i];
                }
            }
            double step = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                trial = z;
                for (std::size_t i = 0; i < p.size(); ++i) trial[i + 1] += step * p[i];
                const double qt = Q.value(trial);
                if (qt <= q + 1e-4 * step * slope) {
                    accepted = true;
                } else if (qt <= q + 1e-13 * std::abs(q)) {
                    // objective differences at roundoff level: fall back on the gradient
                    accepted = Q.dualNorm(Q.gradient(trial)) < res;
                }
                if (accepted) {
                    q = qt;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted)
                throw SolverError("theta-step line search failed (residual " + std::to_string(res) + ")", res);
            z.swap(trial);
            grad = Q.gradient(z);
            res = Q.dualNorm(grad);
            tol = std::max(cfg_.newtonTol, Q.roundoffFloor(z));
        }
        const double bound = boundaryValues(domain_).supAbs() + cfg_.boundsSlack;
        for (std::size_t j = 0; j < n; ++j)
            if (!(std::abs(z[j]) <= bound))
                throw SchemeError("theta-step violates |theta| <= sup|gamma| at node " + std::to_string(j) +
                                  " (theta = " + std::to_string(z[j]) + ")");
        if (q > q0 + 1e-12 * (1.0 + std::abs(q0)))
            throw SchemeError("theta-step increased its own objective");
        if (info) *info = {it, res, tol, q0, q};
        return ScalarField(grid_, std::move(z));
    }

    EnergyReport energy(const State& s) const {
        return relaxedEnergy(s.eta, s.theta, laws_, domain_, cfg_.norm, &harmonic_);
    }

    StepNorms stepNorms(const State& prev, const State& next) const {
        const Grid& g = *grid_;
        double a = 0.0, b = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double de = next.eta[j] - prev.eta[j];
            const double dt = next.theta[j] - prev.theta[j];
            a += g.mass(j) * de * de;
            b += g.mass(j) * laws_.alpha0(next.eta[j]) * dt * dt;
        }
        return {std::sqrt(a), std::sqrt(b)};
    }

    struct StepResult {
        State state;
        EnergyReport energy;
        StepNorms norms;
        /// F_{i-1} - (dissipation + F_i); nonnegative up to roundoff
        double slack;
    };

    /// eta-step then theta-step; asserts the discrete energy inequality with
    /// slack energySlack * (1 + |referenceEnergy|).
    StepResult step(const State& prev, const EnergyReport& prevEnergy, double referenceEnergy) const {
        State next;
        next.eta = etaStep(prev.eta, prev.theta);
        next.theta = thetaStep(next.eta, prev.theta);
        next.t = prev.t + cfg_.h;
        EnergyReport e = energy(next);
        const StepNorms sn = stepNorms(prev, next);
        const double lhs = sn.eta * sn.eta / (2.0 * cfg_.h) + sn.theta * sn.theta / cfg_.h + *e.relaxedTotal;
        const double slack = *prevEnergy.relaxedTotal - lhs;
        if (slack < -cfg_.energySlack * (1.0 + std::abs(referenceEnergy)))
            throw SchemeError("discrete energy inequality violated (slack " + std::to_string(slack) + ")");
        return {std::move(next), e, sn, slack};
    }

    StepResult step(const State& prev) const {
        const EnergyReport e0 = energy(prev);
        return step(prev, e0, *e0.relaxedTotal);
    }

    /// Pins theta's end nodes to gamma and clamps both fields into D_0.
    State project(State s, std::vector<std::string>* notes = nullptr) const {
        requireSameGrid(s.eta, s.theta);
        if (!s.eta.grid->sameAs(*grid_)) throw DimensionError("initial data on a different grid");
        const auto bv = boundaryValues(domain_);
        const double sup = bv.supAbs();
        std::size_t clampedEta = 0, clampedTheta = 0;
        for (std::size_t j = 0; j < s.eta.size(); ++j) {
            const double e = std::clamp(s.eta[j], 0.0, 1.0);
            if (e != s.eta[j]) ++clampedEta;
            s.eta[j] = e;
            const double t = std::clamp(s.theta[j], -sup, sup);
            if (t != s.theta[j]) ++clampedTheta;
            s.theta[j] = t;
        }
        const bool pinLo = s.theta[0] != bv.lo, pinHi = s.theta.values.back() != bv.hi;
        s.theta[0] = bv.lo;
        s.theta.values.back() = bv.hi;
        if (notes) {
            if (clampedEta) notes->push_back("clamped " + std::to_string(clampedEta) + " eta values into [0,1]");
            if (clampedTheta)
                notes->push_back("clamped " + std::to_string(clampedTheta) + " theta values into [-sup|gamma|, sup|gamma|]");
            if (pinLo || pinHi) notes->push_back("pinned theta boundary nodes to gamma");
        }
        return s;
    }

    /// Residuals of the stationary conditions at (eta, theta): the eta identity
    /// with the sharp |D theta| (plus boundary mismatch terms), and the
    /// minimality gap of the sharp weighted TV against a fixed battery of
    /// perturbations.
    OmegaResiduals omegaResiduals(const ScalarField& eta, const ScalarField& theta) const {
        requireSameGrid(eta, theta);
        const Grid& g = *grid_;
        const std::size_t n = g.size();
        const double hx = g.spacing();
        const auto bv = boundaryValues(domain_);
        std::vector<double> r(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) r[j] = g.mass(j) * laws_.g(eta[j]);
        for (std::size_t c = 0; c < g.cells(); ++c) {
            const double k = g.cellMeasure(c) / (hx * hx);
            const double flux = k * (eta[c + 1] - eta[c]);
            r[c] -= flux;
            r[c + 1] += flux;
            const double tv = 0.5 * g.cellMeasure(c) * std::abs(theta[c + 1] - theta[c]) / hx;
            r[c] += laws_.alphaPrime(eta[c]) * tv;
            r[c + 1] += laws_.alphaPrime(eta[c + 1]) * tv;
        }
        r[0] += g.boundaryWeightLo() * laws_.alphaPrime(eta[0]) * std::abs(theta[0] - bv.lo);
        r[n - 1] += g.boundaryWeightHi() * laws_.alphaPrime(eta[n - 1]) * std::abs(theta[n - 1] - bv.hi);
        OmegaResiduals out;
        for (std::size_t j = 0; j < n; ++j) {
            out.s1Weak = std::max(out.s1Weak, std::abs(r[j]));
            out.s1Strong = std::max(out.s1Strong, std::abs(r[j]) / g.mass(j));
        }
        out.minimalityGap = minimalityGap(eta, theta);
        return out;
    }

    double sharpPhi(const ScalarField& eta, std::span<const double> v) const {
        const Grid& g = *grid_;
        const auto bv = boundaryValues(domain_);
        double s = 0.0;
        for (std::size_t c = 0; c < g.cells(); ++c)
            s += g.cellMeasure(c) * detail::cellWeight(laws_, eta, c) * std::abs(v[c + 1] - v[c]) / g.spacing();
        s += g.boundaryWeightLo() * laws_.alpha(eta[0]) * std::abs(v[0] - bv.lo);
        s += g.boundaryWeightHi() * laws_.alpha(eta[g.size() - 1]) * std::abs(v[g.size() - 1] - bv.hi);
        return s;
    }

    double minimalityGap(const ScalarField& eta, const ScalarField& theta) const {
        const Grid& g = *grid_;
        const std::size_t n = g.size();
        const double lo = g.node(0), len = g.nodes().back() - g.node(0);
        std::vector<std::vector<double>> battery;
        for (int k = 1; k <= 8; ++k) { // hats
            std::vector<double> phi(n, 0.0);
            phi[std::size_t(k) * (n - 1) / 9] = 1.0;
            battery.push_back(std::move(phi));
        }
        battery.emplace_back(n, 1.0);
        {
            std::vector<double> phi(n);
            for (std::size_t j = 0; j < n; ++j) phi[j] = (g.node(j) - lo) / len;
            battery.push_back(std::move(phi));
        }
        for (int k = 1; k <= 3; ++k) {
            std::vector<double> phi(n);
            for (std::size_t j = 0; j < n; ++j) phi[j] = std::sin(k * std::numbers::pi * (g.node(j) - lo) / len);
            battery.push_back(std::move(phi));
        }
        const double eps = 1e-3 * std::max(1.0, boundaryValues(domain_).supAbs());
        const double base = sharpPhi(eta, theta.values);
        double gap = std::numeric_limits<double>::infinity();
        std::vector<double> v(n);
        for (const auto& phi : battery) {
            for (double sgn : {1.0, -1.0}) {
                for (std::size_t j = 0; j < n; ++j) v[j] = theta[j] + sgn * eps * phi[j];
                gap = std::min(gap, sharpPhi(eta, v) - base);
            }
        }
        return gap;
    }

    /// Iterates until (|d eta| + |d theta|)/h <= steadyTolerance or maxSteps.
    TrajectoryRecord runToOmegaLimit(State init) const {
        TrajectoryRecord rec;
        State s = project(std::move(init), &rec.projectionNotes);
        EnergyReport e = energy(s);
        const double f0 = *e.relaxedTotal;
        rec.stepTimes.push_back(s.t);
        rec.energyReports.push_back(e);
        saveSnapshot(rec, s);
        for (std::size_t i = 1; i <= cfg_.maxSteps; ++i) {
            StepResult r = step(s, e, f0);
            const double rate = (l2(r.state.eta, s.eta) + l2(r.state.theta, s.theta)) / cfg_.h;
            s = std::move(r.state);
            e = r.energy;
            rec.stepTimes.push_back(s.t);
            rec.energyReports.push_back(e);
            rec.stepNorms.push_back(r.norms);
            if (rate <= cfg_.steadyTolerance) {
                rec.converged = true;
                break;
            }
            if (cfg_.snapshotEvery && i % cfg_.snapshotEvery == 0) saveSnapshot(rec, s);
        }
        if (rec.times.back() != s.t) saveSnapshot(rec, s);
        rec.residuals = omegaResiduals(s.eta, s.theta);
        rec.finalState = std::move(s);
        return rec;
    }

  private:
    static void saveSnapshot(TrajectoryRecord& rec, const State& s) {
        rec.times.push_back(s.t);
        rec.etaSnapshots.push_back(s.eta);
        rec.thetaSnapshots.push_back(s.theta);
    }

    double l2(const ScalarField& a, const ScalarField& b) const {
        double s = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) s += grid_->mass(j) * (a[j] - b[j]) * (a[j] - b[j]);
        return std::sqrt(s);
    }

    StepConfig cfg_;
    MaterialLaws laws_;
    Domain domain_;
    GridPtr grid_;
    ScalarField harmonic_;
};

// Free-function forms.

inline ScalarField etaStep(const ScalarField& etaPrev, const ScalarField& thetaPrev, const StepConfig& cfg,
                           const MaterialLaws& laws, const Domain& domain) {
    return Stepper(cfg, laws, domain, etaPrev.grid).etaStep(etaPrev, thetaPrev);
}

inline ScalarField thetaStep(const ScalarField& etaNew, const ScalarField& thetaPrev, const StepConfig& cfg,
                             const MaterialLaws& laws, const Domain& domain) {
    return Stepper(cfg, laws, domain, etaNew.grid).thetaStep(etaNew, thetaPrev);
}

inline TrajectoryRecord runToOmegaLimit(State init, const StepConfig& cfg, const MaterialLaws& laws,
                                        const Domain& domain) {
    GridPtr g = init.eta.grid;
    return Stepper(cfg, laws, domain, g).runToOmegaLimit(std::move(init));
}

/// Checks the weighted-sum inequality
///   1/2 sum i|d eta_i|^2 + sum i|d theta_i|^2_alpha0 + m h F_m <= h sum F_{i-1}
/// over every prefix m; returns the smallest slack found.
inline double weightedSumSlack(const TrajectoryRecord& rec, double h) {
    double lhs = 0.0, rhsSum = 0.0, worst = std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m <= rec.steps(); ++m) {
        const StepNorms& sn = rec.stepNorms[m - 1];
        lhs += double(m) * (0.5 * sn.eta * sn.eta + sn.theta * sn.theta);
        rhsSum += *rec.energyReports[m - 1].relaxedTotal;
        const double slack = h * rhsSum - (lhs + double(m) * h * *rec.energyReports[m].relaxedTotal);
        worst = std::min(worst, slack);
    }
    return worst;
}

} // namespace kwc
