#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "ccds/config.hpp"
#include "ccds/errors.hpp"
#include "ccds/runner.hpp"
#include "ccds/validation.hpp"

using namespace ccds;

namespace {

const char* kFullConfig = R"json({
  "parties": [
    {"id": 0, "recovery": 0.4, "effective_spread_bp": 200},
    {"id": 1, "recovery": 0.4, "effective_spread_bp": 100},
    {"id": 2, "recovery": 0.4, "lambda": [{"until": 2.0, "rate": 0.01}, {"rate": 0.03}]}
  ],
  "copula": {"family": "clayton", "alpha": 2.0, "alpha_grid": {"start": 0, "stop": 1, "step": 0.5}},
  "deal": {"premium_bp": 200, "maturities": [1, 5], "collateral_rate": 0.02,
           "collateral_return": 0.005, "coverage_buyer": 0.95, "coverage_seller": 0.95},
  "quadrature": {"rel_tol": 1e-10, "inner_tol": 1e-11},
  "sim": {"paths": 1000, "seed": 7, "batch": 128, "jobs": 2},
  "validation": {"alphas": [0.5], "maturities": [5]},
  "output": "out.csv"
})json";

std::string replaced(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

} // namespace

TEST_CASE("full config round trip") {
    const ExperimentConfig cfg = parseConfig(kFullConfig);
    CHECK(cfg.dim() == 3);
    CHECK(cfg.curves[0].lambda(0.0) == doctest::Approx(0.02 / 0.6).epsilon(1e-14));
    CHECK(cfg.curves[2].lambda(1.0) == 0.01);
    CHECK(cfg.curves[2].lambda(3.0) == 0.03);
    CHECK(cfg.family == CopulaFamily::Clayton);
    CHECK(cfg.alpha == 2.0);
    CHECK(cfg.alphaGrid == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(cfg.maturities == std::vector<double>{1.0, 5.0});
    CHECK(cfg.deal.premium == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(cfg.deal.collateralReturn == 0.005);
    CHECK(cfg.deal.coverageBuyer == 0.95);
    CHECK(cfg.sim.paths == 1000);
    CHECK(cfg.sim.seed == 7);
    CHECK(cfg.validateAlphas == std::vector<double>{0.5});
    CHECK(cfg.output == "out.csv");
}

TEST_CASE("config errors carry the field path") {
    auto fieldOf = [](const std::string& text) {
        try {
            parseConfig(text);
        } catch (const ConfigError& e) {
            return e.fieldPath();
        }
        return std::string("<no error>");
    };
    CHECK(fieldOf(replaced(kFullConfig, "\"alpha\": 2.0", "\"alpha\": -1.0")) == "copula.alpha");
    CHECK(fieldOf(replaced(kFullConfig, "\"recovery\": 0.4, \"effective_spread_bp\": 200",
                           "\"recovery\": 1.4, \"effective_spread_bp\": 200")) ==
          "parties[0].recovery");
    CHECK(fieldOf(replaced(kFullConfig, "\"family\": \"clayton\"", "\"family\": \"gumbel\"")) ==
          "copula.family");
    CHECK(fieldOf(replaced(kFullConfig, "\"maturities\": [1, 5]", "\"maturities\": [0]")) ==
          "deal.maturities");
    CHECK(fieldOf(replaced(kFullConfig, "\"paths\": 1000", "\"paths\": 0")) == "sim");
    CHECK(fieldOf(replaced(kFullConfig, "\"id\": 1", "\"id\": 0")) == "parties[1].id");
    CHECK(fieldOf("not json at all") == "<root>");
    CHECK(fieldOf(replaced(kFullConfig,
                           "\"lambda\": [{\"until\": 2.0, \"rate\": 0.01}, {\"rate\": 0.03}]",
                           "\"lambda\": [{\"rate\": 0.01}, {\"rate\": 0.03}]")) ==
          "parties[2].lambda[0].until");
}

TEST_CASE("loadConfig reads files and reports missing ones") {
    namespace fs = std::filesystem;
    const fs::path tmp = fs::temp_directory_path() / "ccds_test_config.json";
    {
        std::ofstream out(tmp);
        out << kFullConfig;
    }
    const ExperimentConfig cfg = loadConfig(tmp.string());
    CHECK(cfg.dim() == 3);
    fs::remove(tmp);
    CHECK_THROWS_AS(loadConfig((fs::temp_directory_path() / "ccds_absent.json").string()),
                    ConfigError);
}

TEST_CASE("built-in figure configs reproduce the marginal setups") {
    const auto fig1 = defaultFig1Config();
    CHECK(fig1.dim() == 3);
    CHECK(fig1.curves[0].lambda(0.0) == doctest::Approx(0.02 / 0.6).epsilon(1e-14));
    CHECK(fig1.curves[1].lambda(0.0) == doctest::Approx(0.01 / 0.6).epsilon(1e-14));
    CHECK(fig1.curves[2].lambda(0.0) == doctest::Approx(0.012 / 0.6).epsilon(1e-14));
    CHECK(fig1.alphaGrid.size() == 21);
    CHECK(fig1.maturities == std::vector<double>{1.0, 5.0, 10.0, 20.0});

    const auto fig2 = defaultFig2Config();
    CHECK(fig2.dim() == 4);
    CHECK(fig2.curves[3].lambda(0.0) == doctest::Approx(0.0075 / 0.6).epsilon(1e-14));
}

TEST_CASE("output formatting: half-even basis points, 12-digit PVs") {
    CHECK(formatBpCell(200.0) == "200.00");
    CHECK(formatBpCell(12.5) == "12.50");
    CHECK(formatBpCell(0.125) == "0.12");  // 12.5 hundredths rounds to even
    CHECK(formatBpCell(0.375) == "0.38");  // 37.5 hundredths rounds to even
    CHECK(formatBpCell(-0.125) == "-0.12");
    CHECK(formatPvCell(0.0123456789012345) == "0.0123456789012");
    CHECK(formatPvCell(1.0) == "1");
}

TEST_CASE("fig1 runner: header, anchor row, byte-stable reruns") {
    ExperimentConfig cfg = defaultFig1Config();
    cfg.alphaGrid = {0.0, 1.0};
    cfg.maturities = {1.0, 5.0};
    RunOptions options;
    options.jobs = 2;
    const RunResult a = runFig1(cfg, options);
    const RunResult b = runFig1(cfg, options);
    CHECK(a.ok);
    CHECK(a.text == b.text);

    std::istringstream lines(a.text);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "alpha,maturity_years,par_spread_bp,protection_pv,annuity_pv,mc_par_bp,mc_se_bp");
    std::string row;
    std::getline(lines, row);
    CHECK(row.substr(0, 11) == "0,1,200.00,");
    // MC columns stay empty without --validate
    CHECK(row.substr(row.size() - 1) == ",");
    int rows = 1;
    while (std::getline(lines, row))
        ++rows;
    CHECK(rows == 4);
}

TEST_CASE("fig1 runner: MC knots populated and gated with --validate") {
    ExperimentConfig cfg = defaultFig1Config();
    cfg.alphaGrid = {1.0};
    cfg.maturities = {5.0};
    cfg.validateAlphas = {1.0};
    cfg.validateMaturities = {5.0};
    cfg.sim.paths = 50'000;
    RunOptions options;
    options.validate = true;
    options.jobs = 2;
    const RunResult r = runFig1(cfg, options);
    CHECK(r.ok); // par agreement within 3.29 SE
    std::istringstream lines(r.text);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    // all seven columns populated on the knot row
    CHECK(std::count(row.begin(), row.end(), ',') == 6);
    CHECK(row.back() != ',');
}

TEST_CASE("fig2 runner: independence anchors and stable separation") {
    ExperimentConfig cfg = defaultFig2Config();
    cfg.alphaGrid = {0.0, 2.0};
    cfg.maturities = {5.0};
    RunOptions options;
    options.jobs = 2;
    const RunResult r = runFig2(cfg, options);
    std::istringstream lines(r.text);
    std::string header, row0, row2;
    std::getline(lines, header);
    CHECK(header ==
          "alpha,maturity_years,par_vs_party2_bp,par_vs_party3_bp,b2b_gap_pv,mc_par2_bp,mc_se2_bp,"
          "mc_par3_bp,mc_se3_bp");
    std::getline(lines, row0);
    CHECK(row0.substr(0, 18) == "0,5,200.00,200.00,");
    std::getline(lines, row2);
    // the two par columns separate under contagion
    std::istringstream cells(row2);
    std::string cell;
    std::getline(cells, cell, ','); // alpha
    std::getline(cells, cell, ','); // maturity
    std::string par2, par3;
    std::getline(cells, par2, ',');
    std::getline(cells, par3, ',');
    CHECK(par2 != par3);
    CHECK(std::stod(par3) > std::stod(par2));
}

TEST_CASE("b2b runner uses the buy-leg par when no premium is configured") {
    ExperimentConfig cfg = defaultFig2Config();
    cfg.alphaGrid = {2.0};
    cfg.maturities = {5.0};
    cfg.deal.premium = 0.0;
    const RunResult r = runB2b(cfg, RunOptions{});
    std::istringstream lines(r.text);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "alpha,maturity_years,premium_bp,b2b_gap_pv");
    std::getline(lines, row);
    std::istringstream cells(row);
    std::string cell;
    std::getline(cells, cell, ',');
    std::getline(cells, cell, ',');
    std::getline(cells, cell, ',');
    CHECK(std::stod(cell) < 200.0); // buy-leg par sits below the marginal spread
    std::getline(cells, cell, ',');
    CHECK(std::stod(cell) < 0.0); // riskier party 2 makes the buy-minus-sell gap negative
}

TEST_CASE("validation report bytes repeat under seed repetition") {
    ValidationOptions small;
    small.seed = 99;
    small.mcPaths = 20'000;
    small.binnedPaths = 200'000;
    small.jobs = 2;
    const std::string a = validationReport(runValidationSuite(small));
    const std::string b = validationReport(runValidationSuite(small));
    CHECK(a == b);
    CHECK(a.find("no-dependence-anchor") != std::string::npos);
}

TEST_CASE("price runner emits the breakdown for both cases") {
    ExperimentConfig three = defaultFig1Config();
    three.alpha = 1.0;
    three.deal.maturity = 5.0;
    const RunResult r3 = runPrice(three, RunOptions{});
    CHECK(r3.text.find("case = 3-party\n") == 0);
    CHECK(r3.text.find("backward_ode_pv = ") != std::string::npos);
    CHECK(r3.text.find("rf_gap_pv = ") != std::string::npos);

    ExperimentConfig four = defaultFig2Config();
    four.alpha = 1.0;
    const RunResult r4 = runPrice(four, RunOptions{});
    CHECK(r4.text.find("case = 4-party\n") == 0);
    CHECK(r4.text.find("b2b_gap_pv = ") != std::string::npos);

    // grid-shape mismatches surface as config errors
    CHECK_THROWS_AS(runFig1(four, RunOptions{}), ConfigError);
    CHECK_THROWS_AS(runFig2(three, RunOptions{}), ConfigError);
}
