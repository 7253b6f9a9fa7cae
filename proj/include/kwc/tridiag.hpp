#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "kwc/errors.hpp"

namespace kwc {

/// Tridiagonal system: lower[i] couples row i to i-1 (lower[0] unused),
/// upper[i] couples row i to i+1 (upper[n-1] unused).
struct Tridiagonal {
    std::vector<double> lower, diag, upper;

    explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
    std::size_t size() const noexcept { return diag.size(); }

    std::vector<double> apply(std::span<const double> x) const {
        const std::size_t n = size();
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += lower[i] * x[i - 1];
            if (i + 1 < n) s += upper[i] * x[i + 1];
            y[i] = s;
        }
        return y;
    }

    /// Thomas algorithm. Intended for diagonally dominant or SPD systems;
    /// a vanishing pivot throws.
    std::vector<double> solve(std::span<const double> rhs) const {
        const std::size_t n = size();
        std::vector<double> cp(n), x(rhs.begin(), rhs.end());
        double piv = diag[0];
        if (piv == 0.0 || !std::isfinite(piv)) throw SchemeError("tridiagonal solve: singular pivot");
        cp[0] = n > 1 ? upper[0] / piv : 0.0;
        x[0] /= piv;
        for (std::size_t i = 1; i < n; ++i) {
            piv = diag[i] - lower[i] * cp[i - 1];
            if (piv == 0.0 || !std::isfinite(piv)) throw SchemeError("tridiagonal solve: singular pivot");
            cp[i] = i + 1 < n ? upper[i] / piv : 0.0;
            x[i] = (x[i] - lower[i] * x[i - 1]) / piv;
        }
        for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
        return x;
    }
};

} // namespace kwc
