#ifndef ccds_hazard_hpp
#define ccds_hazard_hpp

#include <optional>
#include <span>

#include "ccds/copula.hpp"
#include "ccds/curves.hpp"
#include "ccds/scenario.hpp"

namespace ccds {

//! gamma^i(t); exact piecewise-exponential evaluation
double marginalSurvival(const MarginalCurve& curve, double t);

/*! Q^i(t,T): probability that party i survives to T given the filtration at
    t, i.e. given the survivors at t and the realized default times. Computed
    as the ratio of the two mixed copula partials over the defaulted set. */
double conditionalSurvival(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
                           const ScenarioState& state, int i, double T);

/*! (Q,F)-hazard of party i at state.clock for the realized default pattern.
    With `preDefaultLimit` set, defaults recorded exactly at the clock are
    treated as not yet happened (left limit); hazards are right-continuous. */
double qHazard(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
               const ScenarioState& state, int i, bool preDefaultLimit = false);

/*! (Q',F')-hazard with survival set S: identical copula-ratio form, but the
    conditioning set is restricted to defaults among C' = C \ S; parties in S
    are treated as alive regardless of scenario. S empty collapses to qHazard. */
double survivalMeasureHazard(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
                             const ScenarioState& state, const SurvivalSet& survivalSet, int i,
                             bool preDefaultLimit = false);

//! Clayton closed form, all parties alive: lambda^i(t) * (C(gamma(t))/gamma^i(t))^alpha
double claytonAllAliveHazard(double alpha, std::span<const MarginalCurve> curves, int i, double t);

//! Clayton closed form with exactly one frozen default (party j at tauJ):
//! (1+alpha) * lambda^i(t) * (C(..., gamma^j(tauJ), ...)/gamma^i(t))^alpha
double claytonFrozenDefaultHazard(double alpha, std::span<const MarginalCurve> curves, int i,
                                  int j, double tauJ, double t);

//! 3-party h'^0(t) specialization (survival set = all of {0,1,2})
double claytonH03Party(double alpha, std::span<const MarginalCurve> curves, double t);

//! 4-party h'^0(t) specialization (survival set {0,1,2}, contagion source 3);
//! tau3 absent means party 3 still alive at t
double claytonH04Party(double alpha, std::span<const MarginalCurve> curves, double t,
                       std::optional<double> tau3);

} // namespace ccds

#endif
