#include "ccds/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>

#include "ccds/errors.hpp"
#include "ccds/hazard.hpp"
#include "ccds/parallel.hpp"
#include "ccds/quadrature.hpp"

namespace ccds {

void DealSpec::validate() const {
    CCDS_REQUIRE(maturity > 0.0, "maturity must be positive, got " << maturity);
    CCDS_REQUIRE(premium >= 0.0, "premium must be >= 0, got " << premium);
    CCDS_REQUIRE(coverageBuyer >= 0.0 && coverageSeller >= 0.0, "coverage ratios must be >= 0");
    CCDS_REQUIRE(protectionBuyer != protectionSeller, "buyer and seller coincide");
    CCDS_REQUIRE(protectionBuyer != 0 && protectionSeller != 0,
                 "the reference name (party 0) cannot trade its own CDS");
}

double LegValues::parSpread() const {
    CCDS_REQUIRE(annuity > 0.0, "zero annuity: par spread undefined");
    return protection / annuity;
}

double parSpread(const LegValues& legs) { return legs.parSpread(); }

namespace {

std::vector<double> lambdaBreakpoints(std::span<const MarginalCurve> curves, double horizon) {
    std::vector<double> pts;
    for (const auto& c : curves)
        for (double t : c.lambda.stepTimes())
            if (t > 0.0 && t < horizon)
                pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

void checkParties(std::span<const MarginalCurve> curves, std::size_t n) {
    CCDS_REQUIRE(curves.size() == n, "expected " << n << " marginal curves, got "
                                                 << curves.size());
    for (std::size_t k = 0; k < n; ++k)
        CCDS_REQUIRE(curves[k].party == static_cast<int>(k),
                     "curves must be ordered by party index; slot "
                         << k << " holds party " << curves[k].party);
}

using CumulativeFn = CumulativeIntegral<std::function<double(double)>>;

/*! Deterministic 3-party machinery: the survival set is all of {0,1,2}, so
    every hazard is the all-alive Clayton closed form and the value is a plain
    discounted integral. Shares the cumulative hazard between leg, V-bar and
    Gateaux evaluations. */
class ThreePartyEngine {
public:
    ThreePartyEngine(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                     const PricingControl& ctl)
        : alpha_(alpha), curves_(curves), deal_(deal), ctl_(ctl),
          breakpoints_(lambdaBreakpoints(curves, deal.maturity)),
          cumH0_([this](double t) { return h0(t); }, deal.maturity, breakpoints_,
                 0.1 * ctl.innerTol) {
        deal.validate();
        checkParties(curves, 3);
        CCDS_REQUIRE(alpha >= 0.0, "alpha must be >= 0, got " << alpha);
        CCDS_REQUIRE(deal.protectionBuyer == 1 && deal.protectionSeller == 2,
                     "3-party deal must trade between investor 1 and counterparty 2");
    }

    double h0(double t) const { return claytonAllAliveHazard(alpha_, curves_, 0, t); }
    double h1(double t) const {
        return claytonAllAliveHazard(alpha_, curves_, deal_.protectionBuyer, t);
    }
    double h2(double t) const {
        return claytonAllAliveHazard(alpha_, curves_, deal_.protectionSeller, t);
    }

    double shortRate() const { return deal_.collateralRate + deal_.foreignCollateralSpread; }

    //! exp(-int_s^u (c + y_ij + h'^0))
    double discount(double s, double u) {
        return std::exp(-(shortRate() * (u - s) + cumH0_(u) - cumH0_(s)));
    }

    LegValues legsFrom(double s) {
        const double recovery0 = curves_[0].recovery;
        auto f = [&](double u) -> std::array<double, 2> {
            const double w = discount(s, u);
            return {w, w * (1.0 - recovery0) * h0(u)};
        };
        QuadratureControl qc;
        qc.relTol = ctl_.relTol;
        qc.absTol = ctl_.innerTol;
        const auto [annuity, protection] =
            integrateVec<2>(f, s, deal_.maturity, qc, breakpoints_);
        return LegValues{protection, annuity};
    }

    //! forward perfect-collateral value at s (memoized; the Gateaux integrands
    //! query it at every outer node)
    double vBar(double s) {
        auto it = vBarMemo_.find(s);
        if (it != vBarMemo_.end())
            return it->second;
        const double v = legsFrom(s).value(deal_.premium);
        vBarMemo_.emplace(s, v);
        return v;
    }

    //! breakpoints plus the sign changes of vBar, so the kinked [vBar]^+/-
    //! integrands stay piecewise smooth for the adaptive rule
    std::vector<double> vBarKinkBreakpoints() {
        std::vector<double> pts = breakpoints_;
        const int scan = 256;
        const double T = deal_.maturity;
        double prevT = 0.0, prevV = vBar(0.0);
        for (int k = 1; k <= scan; ++k) {
            const double t = T * k / scan;
            const double v = vBar(t);
            if ((prevV < 0.0 && v > 0.0) || (prevV > 0.0 && v < 0.0)) {
                double lo = prevT, hi = t, vlo = prevV;
                for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double vm = vBar(mid);
                    if ((vlo < 0.0) == (vm < 0.0)) {
                        lo = mid;
                        vlo = vm;
                    } else {
                        hi = mid;
                    }
                }
                pts.push_back(0.5 * (lo + hi));
            }
            prevT = t;
            prevV = v;
        }
        std::sort(pts.begin(), pts.end());
        return pts;
    }

    double cca() {
        const double y = deal_.collateralReturn;
        const double d1 = deal_.coverageBuyer, d2 = deal_.coverageSeller;
        if (y == 0.0 || (d1 == 1.0 && d2 == 1.0))
            return 0.0;
        const auto kinks = vBarKinkBreakpoints();
        auto f = [&](double s) {
            const double v = vBar(s);
            const double mixed = (1.0 - d1) * std::max(-v, 0.0) - (1.0 - d2) * std::max(v, 0.0);
            return discount(0.0, s) * y * mixed;
        };
        QuadratureControl qc;
        qc.relTol = ctl_.relTol;
        qc.absTol = ctl_.innerTol;
        return integrate(f, 0.0, deal_.maturity, qc, kinks);
    }

    double cva() {
        const double d1 = deal_.coverageBuyer, d2 = deal_.coverageSeller;
        const double r1 = curves_[static_cast<std::size_t>(deal_.protectionBuyer)].recovery;
        const double r2 = curves_[static_cast<std::size_t>(deal_.protectionSeller)].recovery;
        if (d1 == 1.0 && d2 == 1.0)
            return 0.0;
        const auto kinks = vBarKinkBreakpoints();
        auto f = [&](double s) {
            const double v = vBar(s);
            const double vPos = std::max(v, 0.0), vNeg = std::max(-v, 0.0);
            const double buyerLeg = (1.0 - r1) * h1(s) *
                                    (std::max(1.0 - d1, 0.0) * vNeg + std::max(d2 - 1.0, 0.0) * vPos);
            const double sellerLeg = (1.0 - r2) * h2(s) *
                                     (std::max(1.0 - d2, 0.0) * vPos + std::max(d1 - 1.0, 0.0) * vNeg);
            return discount(0.0, s) * (buyerLeg - sellerLeg);
        };
        QuadratureControl qc;
        qc.relTol = ctl_.relTol;
        qc.absTol = ctl_.innerTol;
        return integrate(f, 0.0, deal_.maturity, qc, kinks);
    }

    const std::vector<double>& breakpoints() const { return breakpoints_; }

private:
    double alpha_;
    std::span<const MarginalCurve> curves_;
    DealSpec deal_;
    PricingControl ctl_;
    std::vector<double> breakpoints_;
    CumulativeFn cumH0_;
    std::map<double, double> vBarMemo_;
};

/*! 4-party machinery for one trade direction. `source` is the party excluded
    from the survival set; its default is the only contagion the measure keeps.
    Legs assemble the joint-survival term and the two double integrals over the
    source default time v. */
class FourPartyEngine {
public:
    FourPartyEngine(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                    int sellerParty, const PricingControl& ctl)
        : alpha_(alpha), curves_(curves), deal_(deal), ctl_(ctl),
          source_(sellerParty == 2 ? 3 : 2),
          breakpoints_(lambdaBreakpoints(curves, deal.maturity)),
          cumJoint_([this](double t) { return h0Empty(t) + hSourceEmpty(t); }, deal.maturity,
                    breakpoints_, 0.1 * ctl.innerTol) {
        deal.validate();
        checkParties(curves, 4);
        CCDS_REQUIRE(alpha >= 0.0, "alpha must be >= 0, got " << alpha);
        CCDS_REQUIRE(sellerParty == 2 || sellerParty == 3,
                     "seller must be party 2 or 3, got " << sellerParty);
        CCDS_REQUIRE(deal.protectionBuyer == 1, "investor must be party 1");
    }

    double h0Empty(double t) const { return claytonAllAliveHazard(alpha_, curves_, 0, t); }
    double hSourceEmpty(double t) const {
        return claytonAllAliveHazard(alpha_, curves_, source_, t);
    }
    double h0Frozen(double t, double v) const {
        return claytonFrozenDefaultHazard(alpha_, curves_, 0, source_, v, t);
    }

    LegValues legs() {
        const double recovery0 = curves_[0].recovery;
        const double shortRate = deal_.collateralRate + deal_.foreignCollateralSpread;
        const double T = deal_.maturity;

        QuadratureControl innerCtl;
        innerCtl.relTol = 0.0;
        innerCtl.absTol = ctl_.innerTol;
        QuadratureControl expCtl;
        expCtl.relTol = 0.0;
        expCtl.absTol = 0.1 * ctl_.innerTol;

        auto outer = [&](double s) -> std::array<double, 2> {
            // joint-survival term: no default of the source by s
            const double survivalWeight = std::exp(-cumJoint_(s));
            double annuity = survivalWeight;
            double protection = survivalWeight * h0Empty(s);

            if (s > 0.0) {
                // contagion terms: source defaults at v < s, reference hazard
                // switches to the frozen form on (v, s]
                auto inner = [&](double v) -> std::array<double, 2> {
                    const double postHazardIntegral =
                        integrate([&](double u) { return h0Frozen(u, v); }, v, s, expCtl,
                                  breakpoints_);
                    const double w =
                        std::exp(-cumJoint_(v) - postHazardIntegral) * hSourceEmpty(v);
                    return {w, w * h0Frozen(s, v)};
                };
                const auto [dAnn, dProt] = integrateVec<2>(inner, 0.0, s, innerCtl, breakpoints_);
                annuity += dAnn;
                protection += dProt;
            }

            const double df = std::exp(-shortRate * s);
            return {df * annuity, df * (1.0 - recovery0) * protection};
        };

        QuadratureControl qc;
        qc.relTol = ctl_.relTol;
        qc.absTol = ctl_.innerTol;
        const auto [annuity, protection] = integrateVec<2>(outer, 0.0, T, qc, breakpoints_);
        return LegValues{protection, annuity};
    }

private:
    double alpha_;
    std::span<const MarginalCurve> curves_;
    DealSpec deal_;
    PricingControl ctl_;
    int source_;
    std::vector<double> breakpoints_;
    CumulativeFn cumJoint_;
};

} // namespace

LegValues legs3Party(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                     const PricingControl& ctl) {
    ThreePartyEngine engine(alpha, curves, deal, ctl);
    return engine.legsFrom(0.0);
}

double vBar3PartyAt(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                    double s, const PricingControl& ctl) {
    CCDS_REQUIRE(s >= 0.0 && s <= deal.maturity, "s = " << s << " outside [0, T]");
    ThreePartyEngine engine(alpha, curves, deal, ctl);
    return engine.vBar(s);
}

LegValues legs4Party(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                     int sellerParty, const PricingControl& ctl) {
    DealSpec directed = deal;
    directed.protectionSeller = sellerParty;
    FourPartyEngine engine(alpha, curves, directed, sellerParty, ctl);
    return engine.legs();
}

double b2bGap(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
              double premium, const PricingControl& ctl) {
    const LegValues buy = legs4Party(alpha, curves, deal, 2, ctl);
    const LegValues sell = legs4Party(alpha, curves, deal, 3, ctl);
    // long protection vs party 2, short the offsetting protection vs party 3
    return buy.value(premium) - sell.value(premium);
}

LegValues riskFreeValue(std::span<const MarginalCurve> curves, const DealSpec& deal,
                        const PricingControl& ctl) {
    deal.validate();
    CCDS_REQUIRE(!curves.empty() && curves[0].party == 0, "reference curve (party 0) required");
    const auto& ref = curves[0];
    const double shortRate = deal.collateralRate + deal.foreignCollateralSpread;
    const std::vector<double> brk = lambdaBreakpoints(curves.subspan(0, 1), deal.maturity);
    auto f = [&](double s) -> std::array<double, 2> {
        const double w = std::exp(-shortRate * s + ref.logSurvival(s));
        return {w, w * (1.0 - ref.recovery) * ref.lambda(s)};
    };
    QuadratureControl qc;
    qc.relTol = ctl.relTol;
    qc.absTol = ctl.innerTol;
    const auto [annuity, protection] = integrateVec<2>(f, 0.0, deal.maturity, qc, brk);
    return LegValues{protection, annuity};
}

namespace {

//! collateral drift mu(t, v) of the exact pre-default dynamics
double collateralDrift(const DealSpec& deal, double h1, double h2, double r1, double r2,
                       double v) {
    const double y = deal.collateralReturn;
    const double d1 = deal.coverageBuyer, d2 = deal.coverageSeller;
    if (v < 0.0)
        return y * d1 - (1.0 - r1) * std::max(1.0 - d1, 0.0) * h1 +
               (1.0 - r2) * std::max(d1 - 1.0, 0.0) * h2;
    return y * d2 - (1.0 - r2) * std::max(1.0 - d2, 0.0) * h2 +
           (1.0 - r1) * std::max(d2 - 1.0, 0.0) * h1;
}

struct OdeProblem {
    std::function<double(double, double)> rhs; // dV/dt = rhs(t, V)
    std::vector<double> grid;                  // descending, T -> 0
};

//! one RK4 step from (t, v) to tNext; endpoints are exact grid times so stage
//! evaluations never drift outside [0, T]
double rk4Step(const OdeProblem& p, double t, double v, double tNext) {
    const double h = tNext - t;
    const double mid = t + 0.5 * h;
    const double k1 = p.rhs(t, v);
    const double k2 = p.rhs(mid, v + 0.5 * h * k1);
    const double k3 = p.rhs(mid, v + 0.5 * h * k2);
    const double k4 = p.rhs(tNext, v + h * k3);
    return v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double solveBackward(const OdeProblem& p, double stepYears) {
    double v = 0.0;
    for (std::size_t seg = 0; seg + 1 < p.grid.size(); ++seg) {
        const double tStart = p.grid[seg];
        const double tEnd = p.grid[seg + 1];
        const int steps = std::max(1, static_cast<int>(std::ceil((tStart - tEnd) / stepYears)));
        for (int k = 0; k < steps; ++k) {
            const double t = tStart + (tEnd - tStart) * k / steps;
            const double tNext = k + 1 == steps ? tEnd : tStart + (tEnd - tStart) * (k + 1) / steps;
            double vNext = rk4Step(p, t, v, tNext);
            if ((v > 0.0 && vNext < 0.0) || (v < 0.0 && vNext > 0.0)) {
                // mu switches branch at V = 0: bisect to the crossing, restart there
                double lo = 0.0, hi = 1.0;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double vm = rk4Step(p, t, v, t + (tNext - t) * mid);
                    if ((vm < 0.0) == (v < 0.0))
                        lo = mid; // still on the starting side: crossing is later
                    else
                        hi = mid;
                }
                const double tCross = t + (tNext - t) * 0.5 * (lo + hi);
                vNext = rk4Step(p, tCross, rk4Step(p, t, v, tCross), tNext);
            }
            v = vNext;
        }
    }
    return v;
}

} // namespace

double backwardOdeValue(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                        const PricingControl& ctl) {
    deal.validate();
    checkParties(curves, 3);
    const double r1 = curves[static_cast<std::size_t>(deal.protectionBuyer)].recovery;
    const double r2 = curves[static_cast<std::size_t>(deal.protectionSeller)].recovery;
    const double recovery0 = curves[0].recovery;
    const double base = deal.collateralRate + deal.foreignCollateralSpread + deal.collateralReturn;

    OdeProblem p;
    p.rhs = [=, &deal](double t, double v) {
        const double h0 = claytonAllAliveHazard(alpha, curves, 0, t);
        const double h1 = claytonAllAliveHazard(alpha, curves, deal.protectionBuyer, t);
        const double h2 = claytonAllAliveHazard(alpha, curves, deal.protectionSeller, t);
        const double rho = base - collateralDrift(deal, h1, h2, r1, r2, v) + h0;
        const double flow = -deal.premium + (1.0 - recovery0) * h0;
        return rho * v - flow;
    };
    p.grid.push_back(deal.maturity);
    const auto brk = lambdaBreakpoints(curves, deal.maturity);
    for (auto it = brk.rbegin(); it != brk.rend(); ++it)
        p.grid.push_back(*it);
    p.grid.push_back(0.0);

    const double coarse = solveBackward(p, ctl.odeStepYears);
    const double fine = solveBackward(p, 0.5 * ctl.odeStepYears);
    CCDS_NUMERIC_CHECK(std::abs(coarse - fine) <= ctl.odeTol,
                       "backward ODE step-halving check failed: |" << coarse << " - " << fine
                                                                   << "| > " << ctl.odeTol);
    return fine;
}

double gateauxCca(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                  const PricingControl& ctl) {
    ThreePartyEngine engine(alpha, curves, deal, ctl);
    return engine.cca();
}

double gateauxCva(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                  const PricingControl& ctl) {
    ThreePartyEngine engine(alpha, curves, deal, ctl);
    return engine.cva();
}

PriceBreakdown priceBreakdown(double alpha, std::span<const MarginalCurve> curves,
                              const DealSpec& deal, const PricingControl& ctl) {
    ThreePartyEngine engine(alpha, curves, deal, ctl);
    PriceBreakdown out;
    out.vBar = engine.legsFrom(0.0).value(deal.premium);
    out.cca = engine.cca();
    out.cva = engine.cva();
    out.vRf = riskFreeValue(curves, deal, ctl).value(deal.premium);
    out.rfGap = out.vRf - out.vBar;
    return out;
}

std::vector<ParCurveCell> parCurve(std::span<const double> alphas,
                                   std::span<const double> maturities,
                                   std::span<const MarginalCurve> curves, const DealSpec& deal,
                                   const PricingControl& ctl, int jobs) {
    CCDS_REQUIRE(!alphas.empty() && !maturities.empty(), "empty grid");
    std::vector<ParCurveCell> cells(alphas.size() * maturities.size());
    parallelFor(static_cast<std::int64_t>(cells.size()), jobs, [&](std::int64_t idx) {
        const std::size_t ia = static_cast<std::size_t>(idx) / maturities.size();
        const std::size_t im = static_cast<std::size_t>(idx) % maturities.size();
        DealSpec cellDeal = deal;
        cellDeal.maturity = maturities[im];
        const LegValues legs = curves.size() == 4
                                   ? legs4Party(alphas[ia], curves, cellDeal,
                                                cellDeal.protectionSeller, ctl)
                                   : legs3Party(alphas[ia], curves, cellDeal, ctl);
        ParCurveCell& cell = cells[static_cast<std::size_t>(idx)];
        cell.alpha = alphas[ia];
        cell.maturity = maturities[im];
        cell.protection = legs.protection;
        cell.annuity = legs.annuity;
        cell.parSpreadBp = 1e4 * legs.parSpread();
    });
    return cells;
}

} // namespace ccds
