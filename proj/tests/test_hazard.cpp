#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ccds/hazard.hpp"
#include "ccds/rng.hpp"
#include "oracles.hpp"

using namespace ccds;

namespace {

std::vector<MarginalCurve> constantCurves(const std::vector<double>& lambdas) {
    std::vector<MarginalCurve> curves;
    for (std::size_t k = 0; k < lambdas.size(); ++k)
        curves.push_back(MarginalCurve{static_cast<int>(k), PiecewiseConstantCurve(lambdas[k]), 0.4});
    return curves;
}

const std::vector<MarginalCurve> kFig1 = constantCurves({0.02 / 0.6, 0.01 / 0.6, 0.012 / 0.6});
const std::vector<MarginalCurve> kFig2 =
    constantCurves({0.02 / 0.6, 0.003 / 0.6, 0.015 / 0.6, 0.0075 / 0.6});

} // namespace

TEST_CASE("conditional survival: baseline identities") {
    const CopulaSpec clayton = CopulaSpec::clayton(2.0, 3);

    // no defaults at t = 0: all other arguments are 1
    for (double T : {0.5, 2.0, 10.0})
        CHECK(conditionalSurvival(clayton, kFig1, ScenarioState::allAlive(0.0), 0, T) ==
              doctest::Approx(kFig1[0].survival(T)).epsilon(1e-13));

    // product copula factorizes in any state
    const CopulaSpec product = CopulaSpec::product(3);
    const ScenarioState oneDown = ScenarioState::allAlive(2.0).withDefault(2, 1.0);
    CHECK(conditionalSurvival(product, kFig1, oneDown, 0, 5.0) ==
          doctest::Approx(kFig1[0].survival(5.0) / kFig1[0].survival(2.0)).epsilon(1e-13));

    // equals one at T = t, nonincreasing in T
    const ScenarioState state = ScenarioState::allAlive(2.0).withDefault(2, 1.0);
    CHECK(conditionalSurvival(clayton, kFig1, state, 0, 2.0) == 1.0);
    double prev = 1.0;
    for (double T = 2.0; T <= 12.0; T += 0.5) {
        const double q = conditionalSurvival(clayton, kFig1, state, 0, T);
        CHECK(q <= prev + 1e-15);
        prev = q;
    }

    CHECK_THROWS_AS(conditionalSurvival(clayton, kFig1, state, 2, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(conditionalSurvival(clayton, kFig1, state, 0, 1.0), std::invalid_argument);
}

TEST_CASE("scenario state validation") {
    ScenarioState bad = ScenarioState::allAlive(1.0).withDefault(1, 2.0); // after clock
    CHECK_THROWS_AS(bad.validate(3), std::invalid_argument);
    ScenarioState ties = ScenarioState::allAlive(3.0).withDefault(1, 1.5).withDefault(2, 1.5);
    CHECK_THROWS_AS(ties.validate(3), std::invalid_argument);
    ScenarioState outOfRange = ScenarioState::allAlive(3.0).withDefault(7, 1.5);
    CHECK_THROWS_AS(outOfRange.validate(3), std::invalid_argument);
}

TEST_CASE("q-hazard: marginal reduction and copula ratio") {
    // product copula: hazard is the marginal intensity in any state
    const CopulaSpec product = CopulaSpec::product(3);
    const ScenarioState oneDown = ScenarioState::allAlive(2.0).withDefault(2, 1.0);
    CHECK(qHazard(product, kFig1, oneDown, 0) == doctest::Approx(kFig1[0].lambda(2.0)).epsilon(1e-15));

    // t = 0, no defaults: every gamma is 1, so the ratio collapses to 1
    for (double alpha : {0.5, 2.0, 5.0})
        CHECK(qHazard(CopulaSpec::clayton(alpha, 3), kFig1, ScenarioState::allAlive(0.0), 0) ==
              doctest::Approx(kFig1[0].lambda(0.0)).epsilon(1e-13));

    CHECK_THROWS_AS(qHazard(product, kFig1, oneDown, 2), std::invalid_argument);
}

TEST_CASE("q-hazard jumps by (1+alpha) at a first default, with left limits") {
    const double alpha = 1.7;
    const CopulaSpec clayton = CopulaSpec::clayton(alpha, 3);
    const double t = 2.5;
    const ScenarioState before = ScenarioState::allAlive(t);
    const ScenarioState after = before.withDefault(2, t);
    const double hBefore = qHazard(clayton, kFig1, before, 0);
    const double hAfter = qHazard(clayton, kFig1, after, 0);
    CHECK(oracles::relErr(hAfter, (1.0 + alpha) * hBefore) < 1e-12);
    // explicit pre-default evaluation flag recovers the left limit
    CHECK(qHazard(clayton, kFig1, after, 0, true) == hBefore);
}

TEST_CASE("chained contagion: the k-th default multiplies by (1+k alpha)/(1+(k-1) alpha)") {
    const double alpha = 0.8;
    const CopulaSpec clayton = CopulaSpec::clayton(alpha, 4);
    const ScenarioState one = ScenarioState::allAlive(3.0).withDefault(3, 3.0);
    const ScenarioState two = ScenarioState::allAlive(3.0).withDefault(3, 1.0).withDefault(2, 3.0);
    const ScenarioState twoLeft = two; // same pattern, left limit at the second default
    const double hOne = qHazard(clayton, kFig2, one, 0);
    (void)hOne;
    const double hBeforeSecond = qHazard(clayton, kFig2, twoLeft, 0, true);
    const double hAfterSecond = qHazard(clayton, kFig2, two, 0);
    CHECK(oracles::relErr(hAfterSecond, hBeforeSecond * (1.0 + 2.0 * alpha) / (1.0 + alpha)) <
          1e-12);
}

TEST_CASE("survival-measure hazard: closed 3-party form and paper identity") {
    const double alpha = 2.0;
    const CopulaSpec clayton = CopulaSpec::clayton(alpha, 3);
    const SurvivalSet everyone = SurvivalSet::of({0, 1, 2});
    for (double t : {0.0, 1.0, 5.0, 15.0}) {
        const double h = survivalMeasureHazard(clayton, kFig1, ScenarioState::allAlive(t),
                                               everyone, 0);
        // lambda^0 gamma^0 d0 C / C evaluated directly
        std::vector<double> gamma{kFig1[0].survival(t), kFig1[1].survival(t), kFig1[2].survival(t)};
        const double direct = kFig1[0].lambda(t) * gamma[0] * clayton.partial(gamma, 0) /
                              clayton.value(gamma);
        CHECK(oracles::relErr(h, direct) < 1e-13);
        CHECK(h <= kFig1[0].lambda(t) * (1.0 + 1e-13)); // Clayton dominance
    }
}

TEST_CASE("survival-measure hazard: product family, measure collapse, S-default error") {
    const CopulaSpec product = CopulaSpec::product(4);
    const SurvivalSet s012 = SurvivalSet::of({0, 1, 2});
    const ScenarioState state = ScenarioState::allAlive(3.0).withDefault(3, 2.0);
    CHECK(survivalMeasureHazard(product, kFig2, state, s012, 0) ==
          doctest::Approx(kFig2[0].lambda(3.0)).epsilon(1e-15));

    // S = empty set collapses to the (Q,F)-hazard
    const CopulaSpec clayton = CopulaSpec::clayton(1.3, 4);
    CHECK(survivalMeasureHazard(clayton, kFig2, state, SurvivalSet::none(), 0) ==
          doctest::Approx(qHazard(clayton, kFig2, state, 0)).epsilon(1e-15));

    // a recorded default inside S contradicts the measure
    const ScenarioState insideS = ScenarioState::allAlive(3.0).withDefault(1, 2.0);
    CHECK_THROWS_AS(survivalMeasureHazard(clayton, kFig2, insideS, s012, 0),
                    std::invalid_argument);
}

TEST_CASE("4-party survival-measure hazard cross-checks the frozen sub-copula") {
    const double alpha = 1.5;
    const CopulaSpec clayton = CopulaSpec::clayton(alpha, 4);
    const SurvivalSet s012 = SurvivalSet::of({0, 1, 2});
    const double tau3 = 2.0, t = 3.0;
    const ScenarioState post = ScenarioState::allAlive(t).withDefault(3, tau3);

    const double h = survivalMeasureHazard(clayton, kFig2, post, s012, 0);
    // (1 + alpha) times the all-alive expression with gamma^3 frozen at tau^3
    std::vector<double> frozen{kFig2[0].survival(t), kFig2[1].survival(t), kFig2[2].survival(t),
                               kFig2[3].survival(tau3)};
    const double expected = (1.0 + alpha) * kFig2[0].lambda(t) *
                            std::pow(clayton.value(frozen) / kFig2[0].survival(t), alpha);
    CHECK(oracles::relErr(h, expected) < 1e-13);

    // q_hazard with the same realized pattern gives the same number
    CHECK(survivalMeasureHazard(clayton, kFig2, post, s012, 0) ==
          doctest::Approx(qHazard(clayton, kFig2, post, 0)).epsilon(1e-15));
}

TEST_CASE("closed-form specializations match the generic route") {
    for (double alpha : {1e-14, 0.25, 1.0, 4.0}) {
        const CopulaSpec c3 = CopulaSpec::clayton(alpha, 3);
        const CopulaSpec c4 = CopulaSpec::clayton(alpha, 4);
        const SurvivalSet s012 = SurvivalSet::of({0, 1, 2});
        for (double t : {0.0, 0.5, 5.0, 20.0}) {
            CHECK(oracles::relErr(claytonH03Party(alpha, kFig1, t),
                                  survivalMeasureHazard(c3, kFig1, ScenarioState::allAlive(t),
                                                        s012, 0)) <= 1e-12);
            CHECK(oracles::relErr(claytonH04Party(alpha, kFig2, t, std::nullopt),
                                  survivalMeasureHazard(c4, kFig2, ScenarioState::allAlive(t),
                                                        s012, 0)) <= 1e-12);
            if (t > 0.0) {
                const double tau3 = 0.5 * t;
                CHECK(oracles::relErr(
                          claytonH04Party(alpha, kFig2, t, tau3),
                          survivalMeasureHazard(c4, kFig2,
                                                ScenarioState::allAlive(t).withDefault(3, tau3),
                                                s012, 0)) <= 1e-12);
            }
        }
    }
    // alpha -> 0 limit and t = 0 corner
    CHECK(claytonH03Party(0.0, kFig1, 7.0) == doctest::Approx(kFig1[0].lambda(7.0)).epsilon(1e-15));
    CHECK(claytonH04Party(3.0, kFig2, 0.0, std::nullopt) ==
          doctest::Approx(kFig2[0].lambda(0.0)).epsilon(1e-13));
    CHECK_THROWS_AS(claytonH04Party(1.0, kFig2, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(claytonH03Party(1.0, kFig2, 1.0), std::invalid_argument);
}

TEST_CASE("forward consistency: dQ/dT at T = t reproduces the hazard") {
    const CopulaSpec clayton = CopulaSpec::clayton(2.0, 3);
    const ScenarioState state = ScenarioState::allAlive(2.0).withDefault(2, 1.0);
    const double h = qHazard(clayton, kFig1, state, 0);
    // second-order one-sided difference of ln Q^0(t, .) at T = t (Q(t,t) = 1)
    const double dT = 1e-4;
    const double q1 = std::log(conditionalSurvival(clayton, kFig1, state, 0, 2.0 + dT));
    const double q2 = std::log(conditionalSurvival(clayton, kFig1, state, 0, 2.0 + 2.0 * dT));
    const double fd = -(4.0 * q1 - q2) / (2.0 * dT);
    CHECK(oracles::relErr(h, fd) < 1e-5);
}

TEST_CASE("conditioning complement is capped") {
    std::vector<double> lambdas(14, 0.02);
    const auto curves = constantCurves(lambdas);
    const CopulaSpec clayton = CopulaSpec::clayton(1.0, 14);
    CHECK_THROWS_AS(survivalMeasureHazard(clayton, curves, ScenarioState::allAlive(1.0),
                                          SurvivalSet::of({0}), 0),
                    std::invalid_argument);
}

TEST_CASE("piecewise-constant intensities: hazards are right-continuous at breakpoints") {
    std::vector<MarginalCurve> curves{
        MarginalCurve{0, PiecewiseConstantCurve({2.0}, {0.01, 0.03}), 0.4},
        MarginalCurve{1, PiecewiseConstantCurve(0.02), 0.4},
        MarginalCurve{2, PiecewiseConstantCurve(0.015), 0.4}};
    const double atBreak = claytonH03Party(1.0, curves, 2.0);
    const double pastBreak = claytonH03Party(1.0, curves, 2.0 + 1e-9);
    CHECK(oracles::relErr(atBreak, pastBreak) < 1e-6);
    CHECK(atBreak > 0.02); // the 0.03 segment applies at the breakpoint
}
