#pragma once

// Smooth convex approximations |.|_nu of the Euclidean norm.
//
// Every kind is radial: |xi|_nu = phi(|xi|) for a convex, even, C^1 profile
// phi with phi(0) = 0. The profile and its first two derivatives are exposed
// directly because the 1D and radially symmetric solvers only ever need
// scalar arguments; the vector overloads below are thin wrappers.
//
//   Hyperbola  phi(s) = sqrt(s^2 + nu^2) - nu
//   Yosida     phi(s) = inf_t { |t| + (nu/2)|t - s|^2 }
//                     = (nu/2) s^2            for |s| <= 1/nu
//                     = |s| - 1/(2 nu)        otherwise
//   Tanh       phi(s) = int_0^|s| tanh(t/nu) dt  = nu log cosh(s/nu)
//   Arctan     phi(s) = (2/pi) int_0^|s| atan(t/nu) dt
//                     = (2/pi) (|s| atan(|s|/nu) - (nu/2) log(1 + s^2/nu^2))
//
// Envelope constants (a, b, c) satisfy phi(s) >= a s - b and |phi'| <= c:
//   Hyperbola  (1, nu, 1)
//   Yosida     (1, 1/(2 nu), 1)   b does not vanish as nu -> 0
//   Tanh       (1, nu log 2, 1)
//   Arctan     (1 - nu, -(2 nu/pi) log sin(pi nu/2), 1)
// The Arctan pair is the exact minimum of phi(s) - a s at a = 1 - nu.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kwc/errors.hpp"

namespace kwc::regnorm {

enum class Kind { Hyperbola, Yosida, Tanh, Arctan };

inline std::string_view toString(Kind k) {
    switch (k) {
    case Kind::Hyperbola: return "hyperbola";
    case Kind::Yosida: return "yosida";
    case Kind::Tanh: return "tanh";
    case Kind::Arctan: return "arctan";
    }
    return "?";
}

inline Kind kindFromString(std::string_view s) {
    if (s == "hyperbola") return Kind::Hyperbola;
    if (s == "yosida") return Kind::Yosida;
    if (s == "tanh") return Kind::Tanh;
    if (s == "arctan") return Kind::Arctan;
    throw ValidationError("unknown norm kind '" + std::string(s) + "'");
}

struct Envelope {
    double a;
    double b;
    double c;
};

class RegularizedNorm {
  public:
    RegularizedNorm(Kind kind, double nu) : kind_(kind), nu_(nu) {
        if (!(nu > 0.0 && nu < 1.0))
            throw ValidationError("regularization parameter nu must lie in (0,1)");
    }

    Kind kind() const noexcept { return kind_; }
    double nu() const noexcept { return nu_; }

    /// phi(s) for a scalar magnitude-like argument (sign ignored).
    double profile(double s) const noexcept {
        const double a = std::abs(s);
        switch (kind_) {
        case Kind::Hyperbola:
            // sqrt(a^2+nu^2)-nu without cancellation for small a
            return a * a / (std::hypot(a, nu_) + nu_);
        case Kind::Yosida:
            return a * nu_ <= 1.0 ? 0.5 * nu_ * a * a : a - 0.5 / nu_;
        case Kind::Tanh: {
            // nu*log(cosh(x)) = nu*(x + log1p(exp(-2x)) - log 2)
            const double x = a / nu_;
            if (x < 1.0) return nu_ * std::log(std::cosh(x));
            return nu_ * (x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2);
        }
        case Kind::Arctan: {
            const double x = a / nu_;
            return (2.0 / std::numbers::pi) * nu_ * (x * std::atan(x) - 0.5 * std::log1p(x * x));
        }
        }
        return 0.0;
    }

    /// phi'(s), odd in s.
    double slope(double s) const noexcept {
        switch (kind_) {
        case Kind::Hyperbola: return s / std::hypot(s, nu_);
        case Kind::Yosida:
            return std::abs(s) * nu_ <= 1.0 ? nu_ * s : (s > 0 ? 1.0 : -1.0);
        case Kind::Tanh: return std::tanh(s / nu_);
        case Kind::Arctan: return (2.0 / std::numbers::pi) * std::atan(s / nu_);
        }
        return 0.0;
    }

    /// phi''(s) >= 0. For Yosida this is the a.e. second derivative.
    double curvature(double s) const noexcept {
        switch (kind_) {
        case Kind::Hyperbola: {
            const double q = std::hypot(s, nu_);
            return nu_ * nu_ / (q * q * q);
        }
        case Kind::Yosida: return std::abs(s) * nu_ <= 1.0 ? nu_ : 0.0;
        case Kind::Tanh: {
            const double ch = std::cosh(std::min(std::abs(s) / nu_, 350.0));
            return 1.0 / (nu_ * ch * ch);
        }
        case Kind::Arctan: return (2.0 / std::numbers::pi) * nu_ / (nu_ * nu_ + s * s);
        }
        return 0.0;
    }

    template <std::size_t N> double value(const std::array<double, N>& xi) const noexcept {
        return profile(magnitude(xi));
    }

    /// Gradient of xi -> |xi|_nu; the zero vector at xi = 0.
    template <std::size_t N>
    std::array<double, N> gradient(const std::array<double, N>& xi) const noexcept {
        std::array<double, N> g{};
        const double m = magnitude(xi);
        if (m == 0.0) return g;
        const double f = slope(m) / m;
        for (std::size_t i = 0; i < N; ++i) g[i] = f * xi[i];
        return g;
    }

    Envelope envelope() const noexcept {
        switch (kind_) {
        case Kind::Hyperbola: return {1.0, nu_, 1.0};
        case Kind::Yosida: return {1.0, 0.5 / nu_, 1.0};
        case Kind::Tanh: return {1.0, nu_ * std::numbers::ln2, 1.0};
        case Kind::Arctan:
            return {1.0 - nu_,
                    -(2.0 * nu_ / std::numbers::pi) * std::log(std::sin(0.5 * std::numbers::pi * nu_)),
                    1.0};
        }
        return {1.0, 0.0, 1.0};
    }

  private:
    template <std::size_t N> static double magnitude(const std::array<double, N>& xi) noexcept {
        if constexpr (N == 1) {
            return std::abs(xi[0]);
        } else if constexpr (N == 2) {
            return std::hypot(xi[0], xi[1]);
        } else {
            double s = 0.0;
            for (double v : xi) s += v * v;
            return std::sqrt(s);
        }
    }

    Kind kind_;
    double nu_;
};

} // namespace kwc::regnorm
