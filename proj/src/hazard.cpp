#include "ccds/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccds/errors.hpp"

namespace ccds {

namespace {

constexpr int kMaxConditioningParties = 12; // 2^|C'| subsets in the measure formalism

void checkCurves(const CopulaSpec& copula, std::span<const MarginalCurve> curves) {
    CCDS_REQUIRE(static_cast<int>(curves.size()) == copula.dim,
                 "have " << curves.size() << " marginal curves for copula dim " << copula.dim);
}

// copula arguments for the realized pattern: gamma^k(t) for the living,
// gamma^j(tau_j) frozen for the defaulted
std::vector<double> effectiveArguments(std::span<const MarginalCurve> curves,
                                       const ScenarioState& state, double t,
                                       const std::vector<int>& defaulted) {
    std::vector<double> u(curves.size());
    for (std::size_t k = 0; k < curves.size(); ++k)
        u[k] = curves[k].survival(t);
    for (int j : defaulted)
        u[static_cast<std::size_t>(j)] = curves[static_cast<std::size_t>(j)].survival(
            *state.defaultTime(j));
    return u;
}

std::vector<int> realizedDefaultSet(const ScenarioState& state, bool preDefaultLimit) {
    std::vector<int> d;
    for (const auto& [party, tau] : state.defaulted)
        if (!(preDefaultLimit && tau == state.clock))
            d.push_back(party);
    return d;
}

double hazardFromRatio(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
                       const ScenarioState& state, const std::vector<int>& defaulted, int i) {
    const auto& curve = curves[static_cast<std::size_t>(i)];
    const double lambda = curve.lambda(state.clock);
    if (copula.effectivelyProduct())
        return lambda; // no default dependence: hazard is the marginal intensity
    const std::vector<double> u = effectiveArguments(curves, state, state.clock, defaulted);
    std::vector<int> withI = defaulted;
    withI.push_back(i);
    const double logRatio = copula.logSubsetPartial(u, withI) -
                            (defaulted.empty() ? copula.logValue(u)
                                               : copula.logSubsetPartial(u, defaulted));
    return lambda * curve.survival(state.clock) * std::exp(logRatio);
}

} // namespace

void ScenarioState::validate(int dim) const {
    std::vector<double> times;
    for (const auto& [party, tau] : defaulted) {
        CCDS_REQUIRE(party >= 0 && party < dim, "defaulted party " << party << " out of range");
        CCDS_REQUIRE(tau >= 0.0 && tau <= clock,
                     "default time " << tau << " outside [0, clock=" << clock << "]");
        times.push_back(tau);
    }
    std::sort(times.begin(), times.end());
    CCDS_REQUIRE(std::adjacent_find(times.begin(), times.end()) == times.end(),
                 "simultaneous default times are not allowed");
}

void SurvivalSet::validate(int dim) const {
    for (int party : members)
        CCDS_REQUIRE(party >= 0 && party < dim, "survival-set party " << party << " out of range");
}

double marginalSurvival(const MarginalCurve& curve, double t) {
    CCDS_REQUIRE(t >= 0.0, "time must be >= 0, got " << t);
    return curve.survival(t);
}

double conditionalSurvival(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
                           const ScenarioState& state, int i, double T) {
    checkCurves(copula, curves);
    state.validate(copula.dim);
    CCDS_REQUIRE(state.isAlive(i), "party " << i << " already defaulted");
    CCDS_REQUIRE(T >= state.clock, "T = " << T << " before evaluation time " << state.clock);

    const std::vector<int> defaulted = realizedDefaultSet(state, false);
    std::vector<double> uDen = effectiveArguments(curves, state, state.clock, defaulted);
    std::vector<double> uNum = uDen;
    uNum[static_cast<std::size_t>(i)] = curves[static_cast<std::size_t>(i)].survival(T);

    if (defaulted.empty())
        return std::exp(copula.logValue(uNum) - copula.logValue(uDen));
    return std::exp(copula.logSubsetPartial(uNum, defaulted) -
                    copula.logSubsetPartial(uDen, defaulted));
}

double qHazard(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
               const ScenarioState& state, int i, bool preDefaultLimit) {
    checkCurves(copula, curves);
    state.validate(copula.dim);
    const std::vector<int> defaulted = realizedDefaultSet(state, preDefaultLimit);
    CCDS_REQUIRE(std::find(defaulted.begin(), defaulted.end(), i) == defaulted.end(),
                 "party " << i << " already defaulted");
    return hazardFromRatio(copula, curves, state, defaulted, i);
}

double survivalMeasureHazard(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
                             const ScenarioState& state, const SurvivalSet& survivalSet, int i,
                             bool preDefaultLimit) {
    checkCurves(copula, curves);
    state.validate(copula.dim);
    survivalSet.validate(copula.dim);
    CCDS_REQUIRE(copula.dim - static_cast<int>(survivalSet.members.size()) <=
                     kMaxConditioningParties,
                 "conditioning complement larger than " << kMaxConditioningParties << " parties");
    for (const auto& [party, tau] : state.defaulted)
        CCDS_REQUIRE(!survivalSet.contains(party),
                     "scenario records a default of party "
                         << party << " inside the survival set; no such path exists under Q'");
    const std::vector<int> defaulted = realizedDefaultSet(state, preDefaultLimit);
    CCDS_REQUIRE(std::find(defaulted.begin(), defaulted.end(), i) == defaulted.end(),
                 "party " << i << " already defaulted");
    return hazardFromRatio(copula, curves, state, defaulted, i);
}

double claytonAllAliveHazard(double alpha, std::span<const MarginalCurve> curves, int i,
                             double t) {
    CCDS_REQUIRE(i >= 0 && i < static_cast<int>(curves.size()), "party " << i << " out of range");
    CCDS_REQUIRE(t >= 0.0, "time must be >= 0, got " << t);
    const auto& curve = curves[static_cast<std::size_t>(i)];
    const double lambda = curve.lambda(t);
    if (alpha < kClaytonAlphaFloor)
        return lambda;
    const CopulaSpec copula = CopulaSpec::clayton(alpha, static_cast<int>(curves.size()));
    std::vector<double> u(curves.size());
    for (std::size_t k = 0; k < curves.size(); ++k)
        u[k] = curves[k].survival(t);
    return lambda * std::exp(alpha * (copula.logValue(u) - curve.logSurvival(t)));
}

double claytonFrozenDefaultHazard(double alpha, std::span<const MarginalCurve> curves, int i,
                                  int j, double tauJ, double t) {
    CCDS_REQUIRE(i >= 0 && i < static_cast<int>(curves.size()), "party " << i << " out of range");
    CCDS_REQUIRE(j >= 0 && j < static_cast<int>(curves.size()) && j != i,
                 "frozen party " << j << " invalid");
    CCDS_REQUIRE(tauJ >= 0.0 && tauJ <= t, "frozen default time " << tauJ << " not in [0," << t
                                                                  << "]");
    const auto& curve = curves[static_cast<std::size_t>(i)];
    const double lambda = curve.lambda(t);
    if (alpha < kClaytonAlphaFloor)
        return lambda;
    const CopulaSpec copula = CopulaSpec::clayton(alpha, static_cast<int>(curves.size()));
    std::vector<double> u(curves.size());
    for (std::size_t k = 0; k < curves.size(); ++k)
        u[k] = curves[k].survival(t);
    u[static_cast<std::size_t>(j)] = curves[static_cast<std::size_t>(j)].survival(tauJ);
    return (1.0 + alpha) * lambda *
           std::exp(alpha * (copula.logValue(u) - curve.logSurvival(t)));
}

double claytonH03Party(double alpha, std::span<const MarginalCurve> curves, double t) {
    CCDS_REQUIRE(curves.size() == 3, "3-party closed form needs exactly 3 curves, got "
                                         << curves.size());
    return claytonAllAliveHazard(alpha, curves, 0, t);
}

double claytonH04Party(double alpha, std::span<const MarginalCurve> curves, double t,
                       std::optional<double> tau3) {
    CCDS_REQUIRE(curves.size() == 4, "4-party closed form needs exactly 4 curves, got "
                                         << curves.size());
    if (!tau3)
        return claytonAllAliveHazard(alpha, curves, 0, t);
    CCDS_REQUIRE(*tau3 <= t, "tau3 = " << *tau3 << " is after evaluation time " << t);
    return claytonFrozenDefaultHazard(alpha, curves, 0, 3, *tau3, t);
}

} // namespace ccds
