#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kwc/steady1d.hpp"
#include "kwc/stepper.hpp"

using namespace kwc;
using steady1d::Contact;
using steady1d::Interval;
using steady1d::JumpSet1D;

namespace {

JumpSet1D single(double a, double b, Contact l = Contact::Mismatch, Contact r = Contact::Mismatch) {
    JumpSet1D js;
    js.intervals.push_back({a, b, l, r});
    return js;
}

} // namespace

TEST(SolveD, NoIntervalsGivesOneHalfForUnitBudget) {
    EXPECT_DOUBLE_EQ(steady1d::solveD({}, 1.0), 0.5);
    const auto s = steady1d::buildSteadyState({}, 1.0);
    for (double x : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(s.eta(x), 0.5);
    EXPECT_DOUBLE_EQ(s.density(), 1.0);
    EXPECT_NEAR(s.theta(0.37), 0.37, 1e-15);
}

TEST(SolveD, VanishingBudgetDrivesDToOne) {
    const auto js = single(0.25, 0.75);
    double prev = 0.0;
    for (double g : {1.0, 0.1, 1e-2, 1e-4, 1e-8}) {
        const double d = steady1d::solveD(js, g);
        EXPECT_GT(d, prev);
        EXPECT_LT(d, 1.0);
        prev = d;
    }
    EXPECT_GT(prev, 1.0 - 1e-7);
}

TEST(SolveD, BudgetIdentityResidual) {
    const auto js = single(0.25, 0.75);
    const double d = steady1d::solveD(js, 2.0);
    EXPECT_LE(std::abs(steady1d::budgetResidual(js, 2.0, d)), 1e-12);
    EXPECT_NEAR(d, (0.5 + 2 * std::tanh(0.25)) / (0.5 + 2 * std::tanh(0.25) + 2.0), 1e-15);
}

TEST(SolveD, RejectsInvalidJumpSets) {
    JumpSet1D overlap;
    overlap.intervals = {{0.1, 0.5}, {0.4, 0.6}};
    EXPECT_THROW(steady1d::solveD(overlap, 1.0), ValidationError);
    EXPECT_THROW(steady1d::solveD(single(0.0, 1.0, Contact::Reflecting, Contact::Reflecting), 1.0), ValidationError);
    EXPECT_THROW(steady1d::solveD(single(0.2, 0.3), -1.0), ValidationError);
    EXPECT_THROW(steady1d::solveD(single(0.6, 0.3), 1.0), ValidationError);
}

TEST(SteadyState, ContinuityAndInteriorMaximum) {
    const auto s = steady1d::buildSteadyState(single(0.4, 0.6), 1.0);
    EXPECT_NEAR(s.eta(0.4), s.d, 1e-12);
    EXPECT_NEAR(s.eta(0.6), s.d, 1e-12);
    EXPECT_NEAR(s.eta(0.5), 1.0 + (s.d - 1.0) / std::cosh(0.1), 1e-15);
    EXPECT_DOUBLE_EQ(s.eta(0.2), s.d);
}

TEST(SteadyState, EtaPrimeJumpMatchesAtomHeight) {
    const auto s = steady1d::buildSteadyState(single(0.4, 0.6), 1.0);
    const double e = 1e-7;
    const double jump = (s.eta(0.4 + e) - s.eta(0.4)) / e - (s.eta(0.4) - s.eta(0.4 - e)) / e;
    EXPECT_NEAR(jump, (1.0 - s.d) * std::tanh(0.1), 1e-6);
    ASSERT_EQ(s.atoms.size(), 2u);
    EXPECT_NEAR(s.atoms[0].height, s.density() * std::tanh(0.1), 1e-15);
}

TEST(SteadyState, BudgetSumsToBoundaryJump) {
    JumpSet1D js;
    js.intervals = {{0.0, 0.25, Contact::Reflecting, Contact::Mismatch}, {0.625, 0.8125}, {0.9, 1.0}};
    const auto s = steady1d::buildSteadyState(js, 3.0);
    double total = s.density() * js.freeLength();
    for (const auto& a : s.atoms) total += a.height;
    EXPECT_NEAR(total, 3.0, 1e-12);
    EXPECT_NEAR(s.etaPrime(0.0), 0.0, 1e-15); // reflecting wall
    EXPECT_NEAR(s.atoms.front().location, 0.25, 0.0);
    EXPECT_NEAR(s.atoms.back().location, 1.0, 0.0);
}

TEST(SteadyState, WIsBoundedAndSaturatesOnAtoms) {
    JumpSet1D js;
    js.intervals = {{0.1, 0.3}, {0.5, 0.9}};
    const auto s = steady1d::buildSteadyState(js, 1.5, MaterialLaws{1e-3});
    for (int i = 0; i <= 10000; ++i) EXPECT_LE(std::abs(s.w(i * 1e-4)), 1.0 + 1e-12);
    for (const auto& a : s.atoms) EXPECT_NEAR(s.w(a.location), 1.0, 1e-12);
    EXPECT_NEAR(s.w(0.4), 1.0, 1e-12); // free region carries density
}

TEST(Verifier, ExactStateHasSmallResiduals) {
    JumpSet1D js;
    js.intervals = {{0.0, 0.25, Contact::Reflecting, Contact::Mismatch}, {0.625, 0.8125}};
    const auto s = steady1d::buildSteadyState(js, 2.0);
    const auto rep = steady1d::verifyEulerLagrange(s, *Grid::interval(2049));
    EXPECT_LE(rep.interior, 1e-5);
    EXPECT_LE(rep.jump, 1e-5);
    EXPECT_LE(rep.boundary, 1e-5);
}

TEST(Verifier, TrivialStateIsExact) {
    const auto s = steady1d::buildSteadyState({}, 0.0);
    EXPECT_EQ(s.d, 1.0);
    const auto rep = steady1d::verifyEulerLagrange(s, *Grid::interval(65));
    EXPECT_EQ(rep.worst(), 0.0);
}

TEST(Verifier, DetectsPerturbation) {
    auto s = steady1d::buildSteadyState(single(0.25, 0.75), 2.0);
    const auto base = s.eta;
    s.eta = [base](double x) { return base(x) + 0.01 * std::sin(3.0 * x); };
    EXPECT_GE(steady1d::verifyEulerLagrange(s, *Grid::interval(2049)).worst(), 1e-3);
}

TEST(Verifier, EndpointsMustBeNodes) {
    const auto s = steady1d::buildSteadyState(single(0.3, 0.7), 2.0);
    EXPECT_THROW(steady1d::verifyEulerLagrange(s, *Grid::interval(2049)), ValidationError);
}

TEST(InferJumpSet, RecoversConstructedIntervals) {
    JumpSet1D js;
    js.intervals = {{0.125, 0.375}, {0.5, 1.0, Contact::Mismatch, Contact::Reflecting}};
    const auto s = steady1d::buildSteadyState(js, 1.0);
    const auto g = Grid::interval(1025);
    const auto theta = ScalarField::fromFunction(g, [&](double x) { return s.theta(x); });
    const auto inferred = steady1d::inferJumpSet(ScalarField::fromFunction(g, s.eta), theta);
    ASSERT_EQ(inferred.intervals.size(), 2u);
    // sampled atoms fall into the cell right of their location
    const double hx = g->spacing();
    EXPECT_NEAR(inferred.intervals[0].a, 0.125 + hx / 2, 1e-12);
    EXPECT_NEAR(inferred.intervals[0].b, 0.375 + hx / 2, 1e-12);
    EXPECT_NEAR(inferred.intervals[1].a, 0.5 + hx / 2, 1e-12);
    EXPECT_TRUE(inferred.intervals[1].reflectsRight());
}

// The dynamics chooses its own jump set; solveD on the inferred set must
// reproduce the minimum of eta. The gap is O(nu), hence the small nu.
TEST(CrossCheck, OmegaLimitMatchesSolveD) {
    const auto g = Grid::interval(2049);
    const Domain1D dom{1.0, 0.0, 1.0};
    StepConfig cfg;
    cfg.norm = regnorm::RegularizedNorm(regnorm::Kind::Hyperbola, 0.002);
    const Stepper st(cfg, MaterialLaws{1e-3}, dom, g);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0, 1);
    State s{ScalarField(g), ScalarField(g), 0};
    for (std::size_t j = 0; j < g->size(); ++j) s.eta[j] = u(rng), s.theta[j] = u(rng);
    const auto rec = st.runToOmegaLimit(s);
    ASSERT_TRUE(rec.converged);
    const auto& eta = rec.finalState.eta.values;
    const double mn = *std::min_element(eta.begin(), eta.end());
    const auto js = steady1d::inferJumpSet(rec.finalState.eta, rec.finalState.theta);
    ASSERT_EQ(js.intervals.size(), 1u);
    EXPECT_NEAR(steady1d::solveD(js, 1.0), mn, 1e-3);
}
