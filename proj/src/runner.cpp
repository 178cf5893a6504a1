#include "ccds/runner.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ccds/errors.hpp"
#include "ccds/mc.hpp"
#include "ccds/parallel.hpp"
#include "ccds/pricer.hpp"
#include "ccds/validation.hpp"

namespace ccds {

std::string formatBpCell(double bp) {
    // half-even at 0.01bp, in the output layer only
    const double rounded = std::nearbyint(bp * 100.0) / 100.0;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", rounded);
    return buf;
}

std::string formatPvCell(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::string formatGrid(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void applyOverrides(ExperimentConfig& cfg, const RunOptions& options) {
    if (options.seed)
        cfg.sim.seed = *options.seed;
    if (options.paths)
        cfg.sim.paths = *options.paths;
    if (options.jobs > 0)
        cfg.sim.jobs = options.jobs;
}

bool isKnot(const ExperimentConfig& cfg, double alpha, double maturity) {
    auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
    bool alphaHit = false, maturityHit = false;
    for (double a : cfg.validateAlphas)
        alphaHit = alphaHit || near(a, alpha);
    for (double m : cfg.validateMaturities)
        maturityHit = maturityHit || near(m, maturity);
    return alphaHit && maturityHit;
}

} // namespace

RunResult runFig1(ExperimentConfig cfg, const RunOptions& options) {
    applyOverrides(cfg, options);
    if (cfg.dim() != 3)
        throw ConfigError("parties", "fig1 requires exactly 3 parties");

    const auto cells = parCurve(cfg.alphaGrid, cfg.maturities, cfg.curves, cfg.deal, cfg.pricing,
                                cfg.sim.jobs);
    RunResult result;
    std::ostringstream csv;
    csv << "alpha,maturity_years,par_spread_bp,protection_pv,annuity_pv,mc_par_bp,mc_se_bp\n";
    for (const auto& cell : cells) {
        csv << formatGrid(cell.alpha) << ',' << formatGrid(cell.maturity) << ','
            << formatBpCell(cell.parSpreadBp) << ',' << formatPvCell(cell.protection) << ','
            << formatPvCell(cell.annuity) << ',';
        if (options.validate && isKnot(cfg, cell.alpha, cell.maturity)) {
            DealSpec deal = cfg.deal;
            deal.maturity = cell.maturity;
            const McEstimate par =
                mcLegsWeighted(cell.alpha, cfg.curves, deal, cfg.sim).parSpread();
            const double mcParBp = 1e4 * par.mean;
            const double mcSeBp = 1e4 * par.standardError;
            csv << formatBpCell(mcParBp) << ',' << formatBpCell(mcSeBp);
            if (std::abs(cell.parSpreadBp - mcParBp) > kZ999 * mcSeBp)
                result.ok = false;
        } else {
            csv << ',';
        }
        csv << '\n';
    }
    result.text = csv.str();
    return result;
}

RunResult runFig2(ExperimentConfig cfg, const RunOptions& options) {
    applyOverrides(cfg, options);
    if (cfg.dim() != 4)
        throw ConfigError("parties", "fig2 requires exactly 4 parties");

    struct Row {
        double alpha = 0.0, maturity = 0.0;
        LegValues buy, sell;
    };
    std::vector<Row> rows(cfg.alphaGrid.size() * cfg.maturities.size());
    parallelFor(static_cast<std::int64_t>(rows.size()), cfg.sim.jobs, [&](std::int64_t idx) {
        Row& row = rows[static_cast<std::size_t>(idx)];
        row.alpha = cfg.alphaGrid[static_cast<std::size_t>(idx) / cfg.maturities.size()];
        row.maturity = cfg.maturities[static_cast<std::size_t>(idx) % cfg.maturities.size()];
        DealSpec deal = cfg.deal;
        deal.maturity = row.maturity;
        row.buy = legs4Party(row.alpha, cfg.curves, deal, 2, cfg.pricing);
        row.sell = legs4Party(row.alpha, cfg.curves, deal, 3, cfg.pricing);
    });

    RunResult result;
    std::ostringstream csv;
    csv << "alpha,maturity_years,par_vs_party2_bp,par_vs_party3_bp,b2b_gap_pv,"
           "mc_par2_bp,mc_se2_bp,mc_par3_bp,mc_se3_bp\n";
    for (const Row& row : rows) {
        {
            const double alpha = row.alpha;
            const double maturity = row.maturity;
            DealSpec deal = cfg.deal;
            deal.maturity = maturity;
            const LegValues& buy = row.buy;
            const LegValues& sell = row.sell;
            const double premium = buy.parSpread(); // buy-leg par
            const double gap = buy.value(premium) - sell.value(premium);

            csv << formatGrid(alpha) << ',' << formatGrid(maturity) << ','
                << formatBpCell(1e4 * buy.parSpread()) << ','
                << formatBpCell(1e4 * sell.parSpread()) << ',' << formatPvCell(gap) << ',';
            if (options.validate && isKnot(cfg, alpha, maturity)) {
                DealSpec buyDeal = deal, sellDeal = deal;
                buyDeal.protectionSeller = 2;
                sellDeal.protectionSeller = 3;
                SimConfig simSell = cfg.sim;
                simSell.seed = cfg.sim.seed + 1; // independent draw for the offsetting leg
                const McEstimate par2 =
                    mcLegsWeighted(alpha, cfg.curves, buyDeal, cfg.sim).parSpread();
                const McEstimate par3 =
                    mcLegsWeighted(alpha, cfg.curves, sellDeal, simSell).parSpread();
                csv << formatBpCell(1e4 * par2.mean) << ',' << formatBpCell(1e4 * par2.standardError)
                    << ',' << formatBpCell(1e4 * par3.mean) << ','
                    << formatBpCell(1e4 * par3.standardError);
                if (std::abs(1e4 * buy.parSpread() - 1e4 * par2.mean) > 1e4 * kZ999 * par2.standardError ||
                    std::abs(1e4 * sell.parSpread() - 1e4 * par3.mean) > 1e4 * kZ999 * par3.standardError)
                    result.ok = false;
            } else {
                csv << ",,,";
            }
            csv << '\n';
        }
    }
    result.text = csv.str();
    return result;
}

RunResult runB2b(ExperimentConfig cfg, const RunOptions& options) {
    applyOverrides(cfg, options);
    if (cfg.dim() != 4)
        throw ConfigError("parties", "b2b requires exactly 4 parties");

    struct Row {
        double alpha = 0.0, maturity = 0.0, premium = 0.0, gap = 0.0;
    };
    std::vector<Row> rows(cfg.alphaGrid.size() * cfg.maturities.size());
    parallelFor(static_cast<std::int64_t>(rows.size()), cfg.sim.jobs, [&](std::int64_t idx) {
        Row& row = rows[static_cast<std::size_t>(idx)];
        row.alpha = cfg.alphaGrid[static_cast<std::size_t>(idx) / cfg.maturities.size()];
        row.maturity = cfg.maturities[static_cast<std::size_t>(idx) % cfg.maturities.size()];
        DealSpec deal = cfg.deal;
        deal.maturity = row.maturity;
        const LegValues buy = legs4Party(row.alpha, cfg.curves, deal, 2, cfg.pricing);
        const LegValues sell = legs4Party(row.alpha, cfg.curves, deal, 3, cfg.pricing);
        row.premium = cfg.deal.premium > 0.0 ? cfg.deal.premium : buy.parSpread();
        row.gap = buy.value(row.premium) - sell.value(row.premium);
    });

    RunResult result;
    std::ostringstream csv;
    csv << "alpha,maturity_years,premium_bp,b2b_gap_pv\n";
    for (const Row& row : rows)
        csv << formatGrid(row.alpha) << ',' << formatGrid(row.maturity) << ','
            << formatBpCell(1e4 * row.premium) << ',' << formatPvCell(row.gap) << '\n';
    result.text = csv.str();
    return result;
}

RunResult runPrice(ExperimentConfig cfg, const RunOptions& options) {
    applyOverrides(cfg, options);
    RunResult result;
    std::ostringstream out;
    const double alpha = cfg.family == CopulaFamily::Product ? 0.0 : cfg.alpha;

    if (cfg.dim() == 3) {
        const LegValues legs = legs3Party(alpha, cfg.curves, cfg.deal, cfg.pricing);
        const double premium = cfg.deal.premium > 0.0 ? cfg.deal.premium : legs.parSpread();
        DealSpec deal = cfg.deal;
        deal.premium = premium;
        const PriceBreakdown pb = priceBreakdown(alpha, cfg.curves, deal, cfg.pricing);
        out << "case = 3-party\n"
            << "alpha = " << formatGrid(alpha) << "\n"
            << "maturity_years = " << formatGrid(deal.maturity) << "\n"
            << "premium_bp = " << formatBpCell(1e4 * premium) << "\n"
            << "protection_pv = " << formatPvCell(legs.protection) << "\n"
            << "annuity_pv = " << formatPvCell(legs.annuity) << "\n"
            << "par_spread_bp = " << formatBpCell(1e4 * legs.parSpread()) << "\n"
            << "v_bar_pv = " << formatPvCell(pb.vBar) << "\n"
            << "cca_pv = " << formatPvCell(pb.cca) << "\n"
            << "cva_pv = " << formatPvCell(pb.cva) << "\n"
            << "first_order_pv = " << formatPvCell(pb.firstOrderValue()) << "\n"
            << "v_rf_pv = " << formatPvCell(pb.vRf) << "\n"
            << "rf_gap_pv = " << formatPvCell(pb.rfGap) << "\n"
            << "backward_ode_pv = " << formatPvCell(backwardOdeValue(alpha, cfg.curves, deal, cfg.pricing))
            << "\n";
    } else if (cfg.dim() == 4) {
        const LegValues buy = legs4Party(alpha, cfg.curves, cfg.deal, 2, cfg.pricing);
        const LegValues sell = legs4Party(alpha, cfg.curves, cfg.deal, 3, cfg.pricing);
        const double premium = cfg.deal.premium > 0.0 ? cfg.deal.premium : buy.parSpread();
        out << "case = 4-party\n"
            << "alpha = " << formatGrid(alpha) << "\n"
            << "maturity_years = " << formatGrid(cfg.deal.maturity) << "\n"
            << "premium_bp = " << formatBpCell(1e4 * premium) << "\n"
            << "par_vs_party2_bp = " << formatBpCell(1e4 * buy.parSpread()) << "\n"
            << "par_vs_party3_bp = " << formatBpCell(1e4 * sell.parSpread()) << "\n"
            << "protection2_pv = " << formatPvCell(buy.protection) << "\n"
            << "annuity2_pv = " << formatPvCell(buy.annuity) << "\n"
            << "protection3_pv = " << formatPvCell(sell.protection) << "\n"
            << "annuity3_pv = " << formatPvCell(sell.annuity) << "\n"
            << "b2b_gap_pv = " << formatPvCell(buy.value(premium) - sell.value(premium)) << "\n";
    } else {
        throw ConfigError("parties", "price requires 3 or 4 parties");
    }
    result.text = out.str();
    return result;
}

RunResult runValidate(const ExperimentConfig& cfg, const RunOptions& options) {
    ValidationOptions vopt;
    vopt.seed = options.seed ? *options.seed : cfg.sim.seed;
    vopt.mcPaths = options.paths ? *options.paths : cfg.sim.paths;
    vopt.binnedPaths = std::max<std::int64_t>(vopt.mcPaths, 10'000'000);
    vopt.jobs = options.jobs > 0 ? options.jobs : cfg.sim.jobs;
    const auto checks = runValidationSuite(vopt);
    return RunResult{validationReport(checks), allPassed(checks)};
}

} // namespace ccds
