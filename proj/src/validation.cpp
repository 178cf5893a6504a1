#include "ccds/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ccds/config.hpp"
#include "ccds/hazard.hpp"
#include "ccds/mc.hpp"
#include "ccds/pricer.hpp"
#include "ccds/rng.hpp"
#include "ccds/runner.hpp"

namespace ccds {

namespace {

double seconds(const std::chrono::steady_clock::time_point& from) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - from).count();
}

std::string fmtG(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

double relDiff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

SimConfig makeSim(const ValidationOptions& opt, std::int64_t paths, std::uint64_t seedOffset = 0) {
    SimConfig sim;
    sim.paths = paths;
    sim.seed = opt.seed + seedOffset;
    sim.jobs = opt.jobs;
    return sim;
}

// 1. Fig-1 setup at alpha = 0 prices exactly at the effective spread.
CheckResult checkNoDependenceAnchor(const ValidationOptions&) {
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = defaultFig1Config();
    double worst = 0.0;
    for (double T : {1.0, 5.0, 10.0, 20.0}) {
        DealSpec deal = cfg.deal;
        deal.maturity = T;
        const double parBp = 1e4 * legs3Party(0.0, cfg.curves, deal).parSpread();
        worst = std::max(worst, std::abs(parBp - 200.0));
    }
    CheckResult r;
    r.name = "no-dependence-anchor";
    r.seconds = seconds(t0);
    r.pass = worst <= 0.01 && r.seconds < 1.0;
    r.detail = "max |par - 200bp| = " + fmtG(worst) + "bp over T in {1,5,10,20} (tol 0.01bp)";
    return r;
}

// 2. Both Clayton ratio identities on random interior points.
CheckResult checkClaytonIdentities(const ValidationOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    PathRng rng(opt.seed, 0xC0FFEEu);
    double worst = 0.0;
    for (double alpha : {0.25, 1.0, 4.0}) {
        for (int k = 0; k < 1000; ++k) {
            const int dim = 2 + k % 3;
            std::vector<double> u(static_cast<std::size_t>(dim));
            for (auto& x : u)
                x = 0.05 + 0.9 * rng.nextUniform();
            const CopulaSpec spec = CopulaSpec::clayton(alpha, dim);
            const double c = spec.value(u);
            const int i = k % dim, j = (i + 1) % dim;
            const double ui = u[static_cast<std::size_t>(i)];
            const double ratio1 = ui * spec.partial(u, i) / c;
            const double rhs1 = std::pow(c / ui, alpha);
            const double ratio2 = ui * spec.partial2(u, i, j) / spec.partial(u, j);
            const double rhs2 = (1.0 + alpha) * rhs1;
            worst = std::max({worst, relDiff(ratio1, rhs1), relDiff(ratio2, rhs2)});
        }
    }
    CheckResult r;
    r.name = "clayton-ratio-identities";
    r.seconds = seconds(t0);
    r.pass = worst <= 1e-12 && r.seconds < 1.0;
    r.detail = "max relative defect " + fmtG(worst) + " on 3000 points, alpha in {0.25,1,4} (tol 1e-12)";
    return r;
}

// 3. A first contagion default among C' multiplies the survivors' hazards by (1+alpha).
CheckResult checkJumpContagion(const ValidationOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    PathRng rng(opt.seed, 0x4A554D50u);
    double worst = 0.0;
    for (int scenario = 0; scenario < 100; ++scenario) {
        const int dim = 3 + static_cast<int>(rng.nextU32() % 4u); // 3..6 parties
        const double alpha = 0.25 + 3.75 * rng.nextUniform();
        std::vector<MarginalCurve> curves;
        for (int p = 0; p < dim; ++p)
            curves.push_back(MarginalCurve{
                p, PiecewiseConstantCurve(0.005 + 0.095 * rng.nextUniform()), 0.4});
        const double t = 0.5 + 9.5 * rng.nextUniform();

        // survival set containing the reference, complement non-empty
        SurvivalSet survival;
        survival.members.insert(0);
        for (int p = 1; p < dim - 1; ++p)
            if (rng.nextUniform() < 0.5)
                survival.members.insert(p);
        const int jumper = dim - 1; // stays in C'
        int observed = static_cast<int>(rng.nextU32() % static_cast<unsigned>(dim - 1));
        // any party still alive after the jump may be observed

        const CopulaSpec copula = CopulaSpec::clayton(alpha, dim);
        const ScenarioState before = ScenarioState::allAlive(t);
        const ScenarioState after = before.withDefault(jumper, t);
        const double hBefore = survivalMeasureHazard(copula, curves, before, survival, observed);
        const double hAfter = survivalMeasureHazard(copula, curves, after, survival, observed);
        const double hLeftLimit =
            survivalMeasureHazard(copula, curves, after, survival, observed, true);
        worst = std::max(worst, relDiff(hAfter, (1.0 + alpha) * hBefore));
        worst = std::max(worst, relDiff(hLeftLimit, hBefore));
    }
    CheckResult r;
    r.name = "jump-contagion";
    r.seconds = seconds(t0);
    r.pass = worst <= 1e-10;
    r.detail = "max relative defect of the (1+alpha) jump over 100 scenarios: " + fmtG(worst) +
               " (tol 1e-10)";
    return r;
}

// 4. Closed-form 3-/4-party hazards equal the generic subset-partial route.
CheckResult checkClosedFormHazards(const ValidationOptions&) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto fig1 = defaultFig1Config();
    const auto fig2 = defaultFig2Config();
    const std::vector<double> alphas{0.25, 1.0, 2.0, 4.0, 5.0};
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
    double worst = 0.0;
    for (double alpha : alphas) {
        const CopulaSpec c3 = CopulaSpec::clayton(alpha, 3);
        const CopulaSpec c4 = CopulaSpec::clayton(alpha, 4);
        const SurvivalSet s3 = SurvivalSet::of({0, 1, 2});
        for (double t : times) {
            const ScenarioState alive = ScenarioState::allAlive(t);
            worst = std::max(worst, relDiff(claytonH03Party(alpha, fig1.curves, t),
                                            survivalMeasureHazard(c3, fig1.curves, alive, s3, 0)));
            worst = std::max(worst,
                             relDiff(claytonH04Party(alpha, fig2.curves, t, std::nullopt),
                                     survivalMeasureHazard(c4, fig2.curves, alive, s3, 0)));
            for (double frac : {0.25, 0.5, 0.9}) {
                const double tau3 = frac * t;
                if (tau3 <= 0.0)
                    continue;
                const ScenarioState post = alive.withDefault(3, tau3);
                worst = std::max(
                    worst, relDiff(claytonH04Party(alpha, fig2.curves, t, tau3),
                                   survivalMeasureHazard(c4, fig2.curves, post, s3, 0)));
            }
        }
    }
    CheckResult r;
    r.name = "closed-form-hazards";
    r.seconds = seconds(t0);
    r.pass = worst <= 1e-12;
    r.detail = "max relative gap closed-form vs generic: " + fmtG(worst) + " (tol 1e-12)";
    return r;
}

// 5. Quadrature and the weighted MC estimator agree at par (z within 3.29).
CheckResult checkMcPriceAgreement(const ValidationOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool pass = true;
    double runtimeWorst = 0.0;

    {
        const auto fig1 = defaultFig1Config();
        DealSpec deal = fig1.deal;
        deal.maturity = 5.0;
        deal.premium = legs3Party(2.0, fig1.curves, deal).parSpread();
        const auto tRun = std::chrono::steady_clock::now();
        const McEstimate v = mcPriceWeighted(2.0, fig1.curves, deal, makeSim(opt, opt.mcPaths));
        const double elapsed = seconds(tRun);
        runtimeWorst = std::max(runtimeWorst, elapsed);
        const double z = std::abs(v.mean) / v.standardError;
        pass = pass && z <= kZ999 && elapsed < 60.0;
        detail << "3-party z = " << fmtG(z, 3);
    }
    {
        const auto fig2 = defaultFig2Config();
        for (int seller : {2, 3}) {
            DealSpec deal = fig2.deal;
            deal.maturity = 5.0;
            deal.protectionSeller = seller;
            deal.premium = legs4Party(2.0, fig2.curves, deal, seller).parSpread();
            const auto tRun = std::chrono::steady_clock::now();
            const McEstimate v =
                mcPriceWeighted(2.0, fig2.curves, deal, makeSim(opt, opt.mcPaths, 1));
            const double elapsed = seconds(tRun);
            runtimeWorst = std::max(runtimeWorst, elapsed);
            const double z = std::abs(v.mean) / v.standardError;
            pass = pass && z <= kZ999 && elapsed < 60.0;
            detail << ", 4-party vs " << seller << " z = " << fmtG(z, 3);
        }
    }
    CheckResult r;
    r.name = "mc-price-agreement";
    r.seconds = seconds(t0);
    r.pass = pass;
    r.detail = detail.str() + " (alpha = 2, T = 5, 3.29 SE gate)";
    return r;
}

// 6. Binned conditional frequency reproduces the closed-form h'^0.
CheckResult checkHazardBinning(const ValidationOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto fig1 = defaultFig1Config();
    BinnedConditioning cond;
    cond.alive = {1, 2};
    const McEstimate mc =
        mcHazardBinned(CopulaSpec::clayton(1.0, 3), fig1.curves, cond, 0, 1.0, 0.01,
                       makeSim(opt, opt.binnedPaths, 2));
    const double closed = claytonH03Party(1.0, fig1.curves, 1.0);
    const double rel = std::abs(mc.mean - closed) / closed;
    CheckResult r;
    r.name = "mc-hazard-binning";
    r.seconds = seconds(t0);
    r.pass = rel <= 0.05 && r.seconds < 300.0;
    r.detail = "|mc - closed|/closed = " + fmtG(rel) + " at t = 1, dt = 0.01 (tol 0.05), mc = " +
               fmtG(mc.mean) + ", closed = " + fmtG(closed);
    return r;
}

// 7. par(alpha) <= 200bp across the grid; risk-free par dominates collateralized par.
CheckResult checkDominance(const ValidationOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto fig1 = defaultFig1Config();
    const auto cells = parCurve(fig1.alphaGrid, fig1.maturities, fig1.curves, fig1.deal,
                                fig1.pricing, opt.jobs);
    double worstBound = -1e300, worstRf = -1e300;
    for (const auto& cell : cells) {
        DealSpec deal = fig1.deal;
        deal.maturity = cell.maturity;
        const double rfBp = 1e4 * riskFreeValue(fig1.curves, deal).parSpread();
        worstBound = std::max(worstBound, cell.parSpreadBp - 200.0);
        worstRf = std::max(worstRf, cell.parSpreadBp - rfBp);
    }
    CheckResult r;
    r.name = "dominance-bounds";
    r.seconds = seconds(t0);
    r.pass = worstBound <= 1e-6 && worstRf <= 1e-6;
    r.detail = "max(par - 200bp) = " + fmtG(worstBound) + "bp, max(par - par_rf) = " +
               fmtG(worstRf) + "bp over the full grid";
    return r;
}

// 8. B2B gap: zero under symmetry and independence, stable sign on the grid,
//    confirmed by MC at two knots.
CheckResult checkB2bGap(const ValidationOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto fig2 = defaultFig2Config();
    DealSpec deal = fig2.deal;
    deal.maturity = 5.0;
    std::ostringstream detail;
    bool pass = true;

    {
        auto symmetric = fig2.curves;
        symmetric[3] = symmetric[2];
        symmetric[3].party = 3;
        const double gap = b2bGap(2.0, symmetric, deal, 0.02);
        pass = pass && std::abs(gap) <= 1e-12;
        detail << "identical counterparties gap = " << fmtG(gap);
    }
    {
        const double gap0 = b2bGap(0.0, fig2.curves, deal, 0.02);
        pass = pass && std::abs(gap0) <= 1e-9;
        detail << ", alpha = 0 gap = " << fmtG(gap0);
    }
    double signReference = 0.0;
    for (double alpha = 0.5; alpha <= 5.0 + 1e-12; alpha += 0.5) {
        const LegValues buy = legs4Party(alpha, fig2.curves, deal, 2);
        const LegValues sell = legs4Party(alpha, fig2.curves, deal, 3);
        const double premium = buy.parSpread();
        const double gap = buy.value(premium) - sell.value(premium);
        if (signReference == 0.0)
            signReference = gap;
        pass = pass && gap != 0.0 && (gap > 0.0) == (signReference > 0.0);
    }
    detail << ", grid sign " << (signReference > 0.0 ? "+" : "-");

    for (double alpha : {1.0, 3.0}) {
        const LegValues buy = legs4Party(alpha, fig2.curves, deal, 2);
        const LegValues sell = legs4Party(alpha, fig2.curves, deal, 3);
        const double premium = buy.parSpread();
        const double gap = buy.value(premium) - sell.value(premium);

        DealSpec buyDeal = deal, sellDeal = deal;
        buyDeal.protectionSeller = 2;
        sellDeal.protectionSeller = 3;
        buyDeal.premium = sellDeal.premium = premium;
        const McEstimate mcBuy =
            mcPriceWeighted(alpha, fig2.curves, buyDeal, makeSim(opt, opt.mcPaths, 3));
        const McEstimate mcSell =
            mcPriceWeighted(alpha, fig2.curves, sellDeal, makeSim(opt, opt.mcPaths, 4));
        const double mcGap = mcBuy.mean - mcSell.mean;
        const double se = std::hypot(mcBuy.standardError, mcSell.standardError);
        const bool consistent = std::abs(mcGap - gap) <= kZ999 * se;
        const bool resolved = std::abs(mcGap) > kZ999 * se && (mcGap > 0.0) == (gap > 0.0);
        pass = pass && consistent && resolved;
        detail << ", alpha = " << fmtG(alpha) << ": gap = " << fmtG(gap) << " mc z-dist = "
               << fmtG(std::abs(mcGap - gap) / se, 3);
    }

    CheckResult r;
    r.name = "b2b-gap";
    r.seconds = seconds(t0);
    r.pass = pass;
    r.detail = detail.str();
    return r;
}

// 9. Backward ODE reproduces the closed-form value at full coverage; the Gateaux
//    first-order residual scales like (1-delta)^2.
CheckResult checkOdeGateaux(const ValidationOptions&) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto fig1 = defaultFig1Config();
    DealSpec deal = fig1.deal;
    deal.maturity = 5.0;
    deal.collateralReturn = 0.005;
    deal.premium = legs3Party(1.0, fig1.curves, deal).parSpread();

    const double closedForm = legs3Party(1.0, fig1.curves, deal).value(deal.premium);
    const double odeFull = backwardOdeValue(1.0, fig1.curves, deal);
    const double fullGap = std::abs(odeFull - closedForm);

    auto residual = [&](double delta) {
        DealSpec d = deal;
        d.coverageBuyer = d.coverageSeller = delta;
        const double ode = backwardOdeValue(1.0, fig1.curves, d);
        const double firstOrder = closedForm + gateauxCca(1.0, fig1.curves, d) +
                                  gateauxCva(1.0, fig1.curves, d);
        return std::abs(ode - firstOrder);
    };
    const double err95 = residual(0.95);
    const double err90 = residual(0.90);
    const double ratio = err90 / err95;

    CheckResult r;
    r.name = "ode-gateaux-consistency";
    r.seconds = seconds(t0);
    r.pass = fullGap <= 1e-8 && ratio >= 2.5 && ratio <= 6.0;
    r.detail = "|ode - legs| = " + fmtG(fullGap) + " (tol 1e-8); residual ratio err(0.90)/err(0.95) = " +
               fmtG(ratio, 4) + " in [2.5, 6], err(0.95) = " + fmtG(err95);
    return r;
}

// 10. The survival-measure density has unit mass.
CheckResult checkQPrimeMass(const ValidationOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool pass = true;
    {
        const auto fig1 = defaultFig1Config();
        const McEstimate m = mcQPrimeMass(2.0, fig1.curves, SurvivalSet::of({0, 1, 2}), 5.0,
                                          makeSim(opt, opt.mcPaths, 5));
        const double z = std::abs(m.mean - 1.0) / m.standardError;
        pass = pass && z <= kZ999;
        detail << "3-party mass = " << fmtG(m.mean, 8) << " (z = " << fmtG(z, 3) << ")";
    }
    {
        const auto fig2 = defaultFig2Config();
        const McEstimate m = mcQPrimeMass(2.0, fig2.curves, SurvivalSet::of({0, 1, 2}), 5.0,
                                          makeSim(opt, opt.mcPaths, 6));
        const double z = std::abs(m.mean - 1.0) / m.standardError;
        pass = pass && z <= kZ999;
        detail << ", 4-party mass = " << fmtG(m.mean, 8) << " (z = " << fmtG(z, 3) << ")";
    }
    CheckResult r;
    r.name = "qprime-unit-mass";
    r.seconds = seconds(t0);
    r.pass = pass;
    r.detail = detail.str() + " (3.29 SE gate)";
    return r;
}

// 11. Worker count never changes MC estimates; CSV output is byte-stable.
CheckResult checkReproducibility(const ValidationOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::ostringstream detail;

    const auto fig2 = defaultFig2Config();
    DealSpec deal = fig2.deal;
    deal.maturity = 5.0;
    deal.premium = 0.02;
    SimConfig one = makeSim(opt, 200'000, 7);
    one.jobs = 1;
    SimConfig four = one;
    four.jobs = 4;
    const McLegs a = mcLegsWeighted(2.0, fig2.curves, deal, one);
    const McLegs b = mcLegsWeighted(2.0, fig2.curves, deal, four);
    const bool mcIdentical = a.meanProtection == b.meanProtection &&
                             a.meanAnnuity == b.meanAnnuity &&
                             a.varProtection == b.varProtection &&
                             a.varAnnuity == b.varAnnuity && a.covariance == b.covariance;
    pass = pass && mcIdentical;
    detail << "mc bitwise identical across 1 vs 4 workers: " << (mcIdentical ? "yes" : "no");

    ExperimentConfig small = defaultFig1Config();
    small.alphaGrid = {0.0, 1.0, 2.0};
    small.maturities = {1.0, 5.0};
    small.sim = makeSim(opt, 50'000, 8);
    RunOptions optsOne;
    optsOne.validate = true;
    optsOne.jobs = 1;
    RunOptions optsTwo = optsOne;
    optsTwo.jobs = 2;
    small.validateAlphas = {1.0};
    small.validateMaturities = {5.0};
    const RunResult csvA = runFig1(small, optsOne);
    const RunResult csvB = runFig1(small, optsTwo);
    const RunResult csvC = runFig1(small, optsOne);
    const bool csvIdentical = csvA.text == csvB.text && csvA.text == csvC.text;
    pass = pass && csvIdentical;
    detail << "; csv byte-identical across reruns and worker counts: "
           << (csvIdentical ? "yes" : "no");

    CheckResult r;
    r.name = "reproducibility";
    r.seconds = seconds(t0);
    r.pass = pass;
    r.detail = detail.str();
    return r;
}

} // namespace

std::vector<CheckResult> runValidationSuite(const ValidationOptions& options) {
    std::vector<CheckResult> checks;
    checks.push_back(checkNoDependenceAnchor(options));
    checks.push_back(checkClaytonIdentities(options));
    checks.push_back(checkJumpContagion(options));
    checks.push_back(checkClosedFormHazards(options));
    checks.push_back(checkMcPriceAgreement(options));
    checks.push_back(checkHazardBinning(options));
    checks.push_back(checkDominance(options));
    checks.push_back(checkB2bGap(options));
    checks.push_back(checkOdeGateaux(options));
    checks.push_back(checkQPrimeMass(options));
    checks.push_back(checkReproducibility(options));
    return checks;
}

std::string validationReport(const std::vector<CheckResult>& checks) {
    std::ostringstream out;
    for (std::size_t k = 0; k < checks.size(); ++k) {
        const auto& c = checks[k];
        out << (c.pass ? "PASS" : "FAIL") << ' ' << (k + 1) << '/' << checks.size() << ' '
            << c.name << ": " << c.detail << '\n';
    }
    out << (allPassed(checks) ? "ALL CHECKS PASSED" : "CHECKS FAILED") << '\n';
    return out.str();
}

bool allPassed(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.pass)
            return false;
    return true;
}

} // namespace ccds
