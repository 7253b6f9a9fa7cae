#pragma once

// Material laws and domains for the concrete KWC setting
//   alpha0(eta) = alpha(eta) = eta^2/2 + delta0,   g(eta) = eta - 1,
//   G(eta) = (eta - 1)^2 / 2.

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "kwc/errors.hpp"

namespace kwc {

struct MaterialLaws {
    double delta0 = 1e-3;

    double alpha(double eta) const noexcept { return 0.5 * eta * eta + delta0; }
    double alpha0(double eta) const noexcept { return alpha(eta); }
    double alphaPrime(double eta) const noexcept { return eta; }
    double g(double eta) const noexcept { return eta - 1.0; }
    double G(double eta) const noexcept { return 0.5 * (eta - 1.0) * (eta - 1.0); }

    /// Inverse of alpha on [0, inf): the nonnegative eta with alpha(eta) = a.
    double alphaInverse(double a) const {
        const double s = 2.0 * (a - delta0);
        if (s < 0.0) throw DomainError("alphaInverse: value below delta0");
        return std::sqrt(s);
    }

    /// Lower bound of min(alpha, alpha0) over [0,1]; positive iff delta0 > 0.
    double deltaAlpha() const noexcept { return delta0; }

    /// Sign conditions used by the eta maximum principle: g(0) <= 0, g(1) >= 0.
    bool signConditionsHold() const noexcept { return g(0.0) <= 0.0 && g(1.0) >= 0.0; }

    void validate() const {
        if (!(delta0 >= 0.0) || !std::isfinite(delta0))
            throw ValidationError("delta0 must be a finite value >= 0");
    }
};

/// The unit interval (0,1) with Dirichlet orientation data at both ends.
struct Domain1D {
    double length = 1.0;
    double gammaLeft = 0.0;
    double gammaRight = 1.0;

    void validate() const {
        if (length != 1.0) throw ValidationError("Domain1D: only the unit interval is supported");
        if (!std::isfinite(gammaLeft) || !std::isfinite(gammaRight))
            throw ValidationError("Domain1D: boundary values must be finite");
    }
};

/// The annulus B(0,R) \ B(0,r0) with radially symmetric boundary data.
struct DomainRadial {
    double r0 = 1.0;
    double R = 2.0;
    double gammaInner = 0.0;
    double gammaOuter = 1.0;

    void validate() const {
        if (!(r0 > 0.0) || !(R > r0) || !std::isfinite(R))
            throw ValidationError("DomainRadial: need 0 < r0 < R");
        if (!std::isfinite(gammaInner) || !std::isfinite(gammaOuter))
            throw ValidationError("DomainRadial: boundary values must be finite");
    }
};

using Domain = std::variant<Domain1D, DomainRadial>;

struct BoundaryValues {
    double lo;
    double hi;
    double supAbs() const noexcept { return std::max(std::abs(lo), std::abs(hi)); }
};

inline BoundaryValues boundaryValues(const Domain& d) {
    return std::visit(
        [](const auto& dom) -> BoundaryValues {
            using T = std::decay_t<decltype(dom)>;
            if constexpr (std::is_same_v<T, Domain1D>)
                return {dom.gammaLeft, dom.gammaRight};
            else
                return {dom.gammaInner, dom.gammaOuter};
        },
        d);
}

inline void validate(const Domain& d) {
    std::visit([](const auto& dom) { dom.validate(); }, d);
}

} // namespace kwc
