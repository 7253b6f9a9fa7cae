#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kwc/regnorm.hpp"

using kwc::regnorm::Kind;
using kwc::regnorm::RegularizedNorm;

namespace {

constexpr Kind kAll[] = {Kind::Hyperbola, Kind::Yosida, Kind::Tanh, Kind::Arctan};

// Composite Simpson on [0, s] with m (even) panels.
template <class F> double simpson(F f, double s, int m = 20000) {
    const double h = s / m;
    double acc = f(0.0) + f(s);
    for (int i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

// Brute-force inf_t {|t| + (nu/2)|t - s|^2} by golden-section search on [-|s|-1, |s|+1].
double yosidaBrute(double s, double nu) {
    auto f = [&](double t) { return std::abs(t) + 0.5 * nu * (t - s) * (t - s); };
    double a = -std::abs(s) - 1.0, b = std::abs(s) + 1.0;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 0; i < 200; ++i) {
        const double c = b - r * (b - a), d = a + r * (b - a);
        (f(c) < f(d) ? b : a) = (f(c) < f(d) ? d : c);
    }
    return f(0.5 * (a + b));
}

} // namespace

TEST(RegNorm, HyperbolaClosedForm) {
    const RegularizedNorm n(Kind::Hyperbola, 0.1);
    EXPECT_DOUBLE_EQ(n.profile(0.0), 0.0);
    EXPECT_NEAR(n.profile(3.0), std::sqrt(9.0 + 0.01) - 0.1, 1e-15);
    EXPECT_NEAR(n.profile(1e-9), 0.5e-18 / 0.1, 1e-30);
}

TEST(RegNorm, TanhMatchesQuadratureOfTanh) {
    for (double nu : {0.5, 0.05, 0.01}) {
        const RegularizedNorm n(Kind::Tanh, nu);
        for (double s : {0.003, 0.2, 1.0, 2.5}) {
            const double q = simpson([&](double t) { return std::tanh(t / nu); }, s);
            EXPECT_NEAR(n.profile(s), q, 1e-10 * (1.0 + q)) << "nu=" << nu << " s=" << s;
        }
    }
}

TEST(RegNorm, ArctanMatchesQuadratureOfArctan) {
    for (double nu : {0.5, 0.05}) {
        const RegularizedNorm n(Kind::Arctan, nu);
        for (double s : {0.01, 0.7, 3.0}) {
            const double q = simpson([&](double t) { return 2.0 / std::numbers::pi * std::atan(t / nu); }, s);
            EXPECT_NEAR(n.profile(s), q, 1e-10 * (1.0 + q));
        }
    }
}

TEST(RegNorm, YosidaMatchesInfimalConvolution) {
    for (double nu : {0.5, 0.1}) {
        const RegularizedNorm n(Kind::Yosida, nu);
        for (double s : {-12.0, -0.3, 0.0, 1.0, 1.9, 2.1, 15.0}) EXPECT_NEAR(n.profile(s), yosidaBrute(s, nu), 1e-9);
    }
}

TEST(RegNorm, SlopeAndCurvatureMatchFiniteDifferences) {
    for (Kind k : kAll) {
        const RegularizedNorm n(k, 0.1);
        for (double s : {-2.3, -0.07, 0.04, 0.5, 4.0}) {
            const double e = 1e-6;
            const double fd1 = (n.profile(s + e) - n.profile(s - e)) / (2 * e);
            const double fd2 = (n.slope(s + e) - n.slope(s - e)) / (2 * e);
            EXPECT_NEAR(n.slope(s), fd1, 1e-7) << toString(k) << " s=" << s;
            EXPECT_NEAR(n.curvature(s), fd2, 1e-5 * (1 + std::abs(fd2))) << toString(k) << " s=" << s;
        }
    }
}

TEST(RegNorm, EnvelopeBoundsHoldOnADenseSample) {
    for (Kind k : kAll) {
        for (double nu : {0.5, 0.1, 0.01}) {
            const RegularizedNorm n(k, nu);
            const auto env = n.envelope();
            for (int i = 0; i <= 4000; ++i) {
                const double s = 1e-3 * i * i / 400.0;
                EXPECT_GE(n.profile(s), env.a * s - env.b - 1e-12) << toString(k) << " nu=" << nu << " s=" << s;
                EXPECT_LE(std::abs(n.slope(s)), env.c + 1e-15);
                EXPECT_LE(n.profile(s), s + 1e-12); // |xi|_nu <= |xi|
            }
        }
    }
}

TEST(RegNorm, ConvergesToAbsoluteValueExceptYosida) {
    for (Kind k : {Kind::Hyperbola, Kind::Tanh, Kind::Arctan}) {
        double prev = INFINITY;
        for (double nu : {0.1, 0.01, 0.001}) {
            const RegularizedNorm n(k, nu);
            const double gap = 1.0 - n.profile(1.0);
            EXPECT_LT(gap, prev);
            prev = gap;
        }
        EXPECT_LT(prev, 0.01);
    }
    EXPECT_DOUBLE_EQ(RegularizedNorm(Kind::Yosida, 0.01).envelope().b, 50.0);
}

TEST(RegNorm, VectorFormIsRadial) {
    const RegularizedNorm n(Kind::Hyperbola, 0.2);
    const std::array<double, 2> xi{3.0, 4.0};
    EXPECT_NEAR(n.value(xi), n.profile(5.0), 1e-15);
    const auto g = n.gradient(xi);
    EXPECT_NEAR(g[0], n.slope(5.0) * 0.6, 1e-15);
    EXPECT_NEAR(g[1], n.slope(5.0) * 0.8, 1e-15);
    const auto z = n.gradient(std::array<double, 2>{0.0, 0.0});
    EXPECT_EQ(z[0], 0.0);
}

TEST(RegNorm, RejectsBadParameters) {
    EXPECT_THROW(RegularizedNorm(Kind::Tanh, 0.0), kwc::ValidationError);
    EXPECT_THROW(RegularizedNorm(Kind::Tanh, 1.0), kwc::ValidationError);
    EXPECT_THROW(kwc::regnorm::kindFromString("huber"), kwc::ValidationError);
}
