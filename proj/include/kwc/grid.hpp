#pragma once

// Uniform 1D / radial grids and the discrete calculus used by the energies and
// the stepper.
//
// Measures: nodes carry trapezoid weights w_j (times r_j on radial grids),
// cells carry l_c = h_x * rbar_c with rbar_c the cell-midpoint radius. The
// 2*pi of the annulus area element is dropped everywhere. With these choices
// gradientAtMidpoints and weightedDivergence are exact adjoints:
//   sum_j w_j (div q)_j v_j = - sum_c l_c q_c (grad v)_c   for all v.

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "kwc/errors.hpp"
#include "kwc/model.hpp"

namespace kwc {

enum class GridKind { Interval, Radial };

class Grid {
  public:
    static std::shared_ptr<const Grid> interval(std::size_t n) {
        return std::make_shared<const Grid>(GridKind::Interval, 0.0, 1.0, n);
    }
    static std::shared_ptr<const Grid> radial(double r0, double R, std::size_t n) {
        if (!(r0 > 0.0) || !(R > r0)) throw ValidationError("radial grid: need 0 < r0 < R");
        return std::make_shared<const Grid>(GridKind::Radial, r0, R, n);
    }
    static std::shared_ptr<const Grid> forDomain(const Domain& d, std::size_t n) {
        if (const auto* rd = std::get_if<DomainRadial>(&d)) return radial(rd->r0, rd->R, n);
        return interval(n);
    }

    Grid(GridKind kind, double lo, double hi, std::size_t n) : kind_(kind), hx_((hi - lo) / double(n - 1)) {
        if (n < 3) throw ValidationError("grid needs at least 3 nodes");
        nodes_.resize(n);
        for (std::size_t j = 0; j < n; ++j) nodes_[j] = lo + hx_ * double(j);
        nodes_.back() = hi;
        radial_.assign(n, 1.0);
        mid_.assign(n - 1, 1.0);
        if (kind == GridKind::Radial) {
            radial_ = nodes_;
            for (std::size_t c = 0; c + 1 < n; ++c) mid_[c] = 0.5 * (nodes_[c] + nodes_[c + 1]);
        }
        mass_.resize(n);
        for (std::size_t j = 0; j < n; ++j) mass_[j] = hx_ * radial_[j];
        mass_.front() *= 0.5;
        mass_.back() *= 0.5;
    }

    GridKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t cells() const noexcept { return nodes_.size() - 1; }
    double spacing() const noexcept { return hx_; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    double node(std::size_t j) const noexcept { return nodes_[j]; }
    /// r at nodes (all ones on an interval).
    std::span<const double> radialWeights() const noexcept { return radial_; }
    /// Lumped-mass (trapezoid) weight of node j.
    double mass(std::size_t j) const noexcept { return mass_[j]; }
    std::span<const double> masses() const noexcept { return mass_; }
    /// Cell measure l_c = h_x * rbar_c.
    double cellMeasure(std::size_t c) const noexcept { return hx_ * mid_[c]; }
    double midpointRadius(std::size_t c) const noexcept { return mid_[c]; }
    double midpoint(std::size_t c) const noexcept { return 0.5 * (nodes_[c] + nodes_[c + 1]); }
    /// Weight of the boundary "integral" at the first/last node (1, or r0 / R).
    double boundaryWeightLo() const noexcept { return radial_.front(); }
    double boundaryWeightHi() const noexcept { return radial_.back(); }

    bool sameAs(const Grid& o) const noexcept {
        return kind_ == o.kind_ && size() == o.size() && nodes_.front() == o.nodes_.front() &&
               nodes_.back() == o.nodes_.back();
    }

  private:
    GridKind kind_;
    double hx_;
    std::vector<double> nodes_;
    std::vector<double> radial_;
    std::vector<double> mid_;
    std::vector<double> mass_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Nodal values on a grid.
struct ScalarField {
    GridPtr grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(GridPtr g, double fill = 0.0) : grid(std::move(g)), values(grid->size(), fill) {}
    ScalarField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid->size()) throw DimensionError("ScalarField: value count does not match grid");
    }
    template <class F> static ScalarField fromFunction(GridPtr g, F&& f) {
        ScalarField out(g);
        for (std::size_t j = 0; j < g->size(); ++j) out.values[j] = f(g->node(j));
        return out;
    }

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t j) const noexcept { return values[j]; }
    double& operator[](std::size_t j) noexcept { return values[j]; }
};

inline void requireSameGrid(const ScalarField& a, const ScalarField& b) {
    if (!a.grid || !b.grid || !a.grid->sameAs(*b.grid) || a.size() != b.size())
        throw DimensionError("fields live on different grids");
}

inline std::vector<double> gradientAtMidpoints(const ScalarField& f) {
    const double hx = f.grid->spacing();
    std::vector<double> g(f.size() - 1);
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = (f[c + 1] - f[c]) / hx;
    return g;
}

/// Nodal divergence (1/r)(r q)' of a midpoint flux, including the natural
/// boundary rows; the exact negative adjoint of gradientAtMidpoints.
inline ScalarField weightedDivergence(std::span<const double> flux, const GridPtr& grid) {
    if (flux.size() != grid->cells()) throw DimensionError("weightedDivergence: flux length must be n-1");
    const double hx = grid->spacing();
    ScalarField out(grid);
    for (std::size_t j = 0; j < grid->size(); ++j) {
        double acc = 0.0;
        if (j < grid->cells()) acc += grid->cellMeasure(j) * flux[j];
        if (j > 0) acc -= grid->cellMeasure(j - 1) * flux[j - 1];
        out[j] = acc / (hx * grid->mass(j));
    }
    return out;
}

/// Trapezoid rule with the radial weight r on radial grids.
inline double integrate(const ScalarField& f) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += f.grid->mass(j) * f[j];
    return s;
}

/// Midpoint-rule inner product of two cell arrays: sum_c l_c p_c q_c.
inline double cellInner(const Grid& grid, std::span<const double> p, std::span<const double> q) {
    double s = 0.0;
    for (std::size_t c = 0; c < grid.cells(); ++c) s += grid.cellMeasure(c) * p[c] * q[c];
    return s;
}

/// Discrete harmonic extension of the boundary data: the minimizer of the
/// discrete Dirichlet energy with the end nodes pinned. Affine on an interval;
/// on an annulus the weighted flux rbar_c * grad is constant, which is the
/// discrete a + b log r.
inline ScalarField harmonicExtension(const Domain& domain, const GridPtr& grid) {
    const bool radialDomain = std::holds_alternative<DomainRadial>(domain);
    if (radialDomain != (grid->kind() == GridKind::Radial))
        throw DimensionError("harmonicExtension: grid kind does not match domain");
    const auto bv = boundaryValues(domain);
    ScalarField out(grid);
    // cumulative resistance sum_{c<j} 1/rbar_c
    std::vector<double> cum(grid->size(), 0.0);
    for (std::size_t c = 0; c < grid->cells(); ++c) cum[c + 1] = cum[c] + 1.0 / grid->midpointRadius(c);
    const double total = cum.back();
    for (std::size_t j = 0; j < grid->size(); ++j) out[j] = bv.lo + (bv.hi - bv.lo) * cum[j] / total;
    out.values.front() = bv.lo;
    out.values.back() = bv.hi;
    return out;
}

/// 0 <= eta0 <= 1 and |theta0| <= gammaSup nodewise (closed set).
inline bool admissibleInitialData(const ScalarField& eta0, const ScalarField& theta0, double gammaSup) {
    requireSameGrid(eta0, theta0);
    for (std::size_t j = 0; j < eta0.size(); ++j) {
        if (!(eta0[j] >= 0.0 && eta0[j] <= 1.0)) return false;
        if (!(std::abs(theta0[j]) <= gammaSup)) return false;
    }
    return true;
}

} // namespace kwc
