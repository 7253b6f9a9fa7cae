#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kwc/energy.hpp"

using namespace kwc;

namespace {
const regnorm::RegularizedNorm kNorm(regnorm::Kind::Hyperbola, 0.05);
}

TEST(Energy, LinearThetaOnUniformEta) {
    const MaterialLaws laws{1e-3};
    const Domain1D d{1.0, 0.0, 2.0};
    const auto g = Grid::interval(65);
    const ScalarField eta(g, 1.0);
    const auto theta = ScalarField::fromFunction(g, [](double x) { return 2.0 * x; });
    const auto s = sharpEnergy(eta, theta, laws, d);
    EXPECT_NEAR(s.dirichlet, 0.0, 1e-15);
    EXPECT_NEAR(s.potential, 0.0, 1e-15);
    EXPECT_NEAR(s.weightedTV, 2.0 * laws.alpha(1.0), 1e-13);
    EXPECT_NEAR(s.boundaryPenalty, 0.0, 1e-15);
    const auto r = relaxedEnergy(eta, theta, laws, d, kNorm);
    EXPECT_NEAR(r.nuTerm, 0.0, 1e-15);
    EXPECT_NEAR(*r.relaxedTotal, laws.alpha(1.0) * kNorm.profile(2.0), 1e-13);
    EXPECT_LT(*r.relaxedTotal, r.sharpTotal);
}

TEST(Energy, DirichletAndPotentialClosedForms) {
    const MaterialLaws laws{0.0};
    const DomainRadial d{1.0, 3.0, 0.0, 0.0};
    const auto g = Grid::radial(1.0, 3.0, 129);
    const auto eta = ScalarField::fromFunction(g, [](double r) { return r; });
    const ScalarField theta(g, 0.0);
    const auto e = sharpEnergy(eta, theta, laws, d);
    EXPECT_NEAR(e.dirichlet, 0.25 * (9.0 - 1.0), 1e-12); // midpoint rule is exact
    const ScalarField zero(g, 0.0);
    EXPECT_NEAR(sharpEnergy(zero, theta, laws, d).potential, 0.5 * 0.5 * (9.0 - 1.0), 1e-12);
}

TEST(Energy, RadialWeightedTVOfHarmonicProfile) {
    const MaterialLaws laws{0.0};
    const DomainRadial d{1.0, 5.0, 0.0, 1.5};
    const auto g = Grid::radial(1.0, 5.0, 513);
    const ScalarField eta(g, 1.0);
    const auto theta = harmonicExtension(d, g);
    const auto e = relaxedEnergy(eta, theta, laws, d, kNorm);
    EXPECT_NEAR(e.weightedTV, 0.5 * 1.5 * 4.0 / std::log(5.0), 1e-5);
    EXPECT_NEAR(e.nuTerm, 0.0, 1e-18);
}

TEST(Energy, BoundaryMismatchEntersOnlyTheSharpEnergy) {
    const MaterialLaws laws{1e-3};
    const Domain1D d{1.0, 0.0, 2.0};
    const auto g = Grid::interval(17);
    const ScalarField eta(g, 1.0), theta(g, 0.0);
    EXPECT_NEAR(sharpEnergy(eta, theta, laws, d).boundaryPenalty, 2.0 * laws.alpha(1.0), 1e-15);
    EXPECT_THROW(relaxedEnergy(eta, theta, laws, d, kNorm), DomainError);
}

TEST(Energy, NuTermOfASineMode) {
    const MaterialLaws laws{1e-3};
    const Domain1D d{1.0, 0.0, 1.0};
    const auto g = Grid::interval(1025);
    auto theta = ScalarField::fromFunction(g, [](double x) { return x + std::sin(std::numbers::pi * x); });
    theta.values.back() = 1.0;
    const ScalarField eta(g, 1.0);
    const auto e = relaxedEnergy(eta, theta, laws, d, kNorm);
    const double nu = kNorm.nu();
    EXPECT_NEAR(e.nuTerm, 0.5 * nu * nu * std::numbers::pi * std::numbers::pi * 0.5, 1e-7);
}

TEST(Energy, SharpBoundsRelaxedTVForEveryKind) {
    const MaterialLaws laws{1e-3};
    const Domain1D d{1.0, -1.0, 2.0};
    const auto g = Grid::interval(65);
    const auto theta = ScalarField::fromFunction(g, [](double x) { return x < 0.5 ? -1.0 : 2.0; });
    const auto eta = ScalarField::fromFunction(g, [](double x) { return 0.3 + 0.5 * x; });
    for (auto k : {regnorm::Kind::Hyperbola, regnorm::Kind::Yosida, regnorm::Kind::Tanh, regnorm::Kind::Arctan}) {
        const auto e = relaxedEnergy(eta, theta, laws, d, regnorm::RegularizedNorm(k, 0.05));
        EXPECT_LE(e.weightedTVnu, e.weightedTV + 1e-14) << toString(k);
    }
}
