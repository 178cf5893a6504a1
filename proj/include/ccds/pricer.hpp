#ifndef ccds_pricer_hpp
#define ccds_pricer_hpp

#include <span>
#include <vector>

#include "ccds/curves.hpp"
#include "ccds/deal.hpp"

namespace ccds {

struct PricingControl {
    double relTol = 1e-10;        // outer adaptive Simpson, relative to the leg value
    double innerTol = 1e-11;      // absolute target for inner/double integrals & exponents
    double odeStepYears = 1.0 / 730.0;
    double odeTol = 1e-9;         // step-halving agreement required of the backward ODE
};

/*! Perfect-collateral legs for the 3-party case (parties {0,1,2}; survival
    set is everything, so h'^0 is the deterministic all-alive Clayton hazard):
      protection = int_0^T exp(-int_0^s (c + y_ij + h'^0)) (1-R^0) h'^0(s) ds
      annuity    = int_0^T exp(-int_0^s (c + y_ij + h'^0)) ds                   */
LegValues legs3Party(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                     const PricingControl& ctl = {});

//! perfect-collateral forward value at time s of the 3-party deal (V-bar path)
double vBar3PartyAt(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                    double s, const PricingControl& ctl = {});

/*! 4-party legs at t=0, trading with `sellerParty` (2 or 3); the remaining
    fourth party is the contagion source excluded from the survival set. The
    three-term decomposition integrates over the source's default time. */
LegValues legs4Party(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                     int sellerParty, const PricingControl& ctl = {});

//! V_0 + V_0^B2B at common premium: value of buying from party 2 plus value of
//! the offsetting sale to party 3
double b2bGap(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
              double premium, const PricingControl& ctl = {});

//! reference legs between default-free parties: discount c + y_ij + marginal lambda^0
LegValues riskFreeValue(std::span<const MarginalCurve> curves, const DealSpec& deal,
                        const PricingControl& ctl = {});

/*! Backward terminal-value solve of the exact pre-default dynamics with
    value-dependent collateral drift mu(t, V): classical RK4 with fixed step,
    restarted at detected sign changes of V, plus a step-halving check.
    delta = 1 reproduces the closed-form perfect-collateral value. 3-party case only. */
double backwardOdeValue(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                        const PricingControl& ctl = {});

//! first-order collateral-cost adjustment (nabla V)^1
double gateauxCca(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                  const PricingControl& ctl = {});
//! first-order credit-valuation adjustment (nabla V)^2
double gateauxCva(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                  const PricingControl& ctl = {});

//! vBar / CCA / CVA / risk-free reference in one shot (3-party case)
PriceBreakdown priceBreakdown(double alpha, std::span<const MarginalCurve> curves,
                              const DealSpec& deal, const PricingControl& ctl = {});

double parSpread(const LegValues& legs);

struct ParCurveCell {
    double alpha = 0.0;
    double maturity = 0.0;
    double parSpreadBp = 0.0;
    double protection = 0.0;
    double annuity = 0.0;
};

//! independent (alpha, T) grid evaluation; cells are deterministic and may be
//! computed on `jobs` workers with bitwise-identical results
std::vector<ParCurveCell> parCurve(std::span<const double> alphas,
                                   std::span<const double> maturities,
                                   std::span<const MarginalCurve> curves, const DealSpec& deal,
                                   const PricingControl& ctl = {}, int jobs = 1);

} // namespace ccds

#endif
