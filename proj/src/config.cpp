#include "ccds/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ccds/errors.hpp"

namespace ccds {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path, what);
}

const json& member(const json& node, const std::string& path, const char* key) {
    const auto it = node.find(key);
    if (it == node.end())
        fail(path + "." + key, "missing required field");
    return *it;
}

double number(const json& node, const std::string& path) {
    if (!node.is_number())
        fail(path, "expected a number");
    return node.get<double>();
}

double numberField(const json& node, const std::string& path, const char* key) {
    return number(member(node, path, key), path + "." + key);
}

double numberOr(const json& node, const std::string& path, const char* key, double fallback) {
    const auto it = node.find(key);
    if (it == node.end())
        return fallback;
    return number(*it, path + "." + key);
}

std::int64_t integerOr(const json& node, const std::string& path, const char* key,
                       std::int64_t fallback) {
    const auto it = node.find(key);
    if (it == node.end())
        return fallback;
    if (!it->is_number_integer() && !it->is_number_unsigned())
        fail(path + "." + key, "expected an integer");
    return it->get<std::int64_t>();
}

std::vector<double> numberArray(const json& node, const std::string& path) {
    if (!node.is_array() || node.empty())
        fail(path, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < node.size(); ++k)
        out.push_back(number(node[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

PiecewiseConstantCurve parseLambda(const json& node, const std::string& path) {
    if (node.is_number()) {
        const double rate = node.get<double>();
        if (rate < 0.0)
            fail(path, "intensity must be >= 0");
        return PiecewiseConstantCurve(rate);
    }
    if (!node.is_array() || node.empty())
        fail(path, "expected a rate or an array of {until?, rate} segments");
    std::vector<double> times, values;
    for (std::size_t k = 0; k < node.size(); ++k) {
        const std::string segPath = path + "[" + std::to_string(k) + "]";
        const json& seg = node[k];
        if (!seg.is_object())
            fail(segPath, "expected an object {until?, rate}");
        values.push_back(numberField(seg, segPath, "rate"));
        const bool last = k + 1 == node.size();
        if (seg.contains("until")) {
            if (last)
                fail(segPath + ".until", "the last segment must be open-ended (no `until`)");
            times.push_back(numberField(seg, segPath, "until"));
        } else if (!last) {
            fail(segPath + ".until", "missing segment end");
        }
    }
    try {
        return PiecewiseConstantCurve(std::move(times), std::move(values));
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

std::vector<MarginalCurve> parseParties(const json& root) {
    const json& parties = member(root, "", "parties");
    if (!parties.is_array() || parties.size() < 3)
        fail("parties", "expected an array of at least 3 parties");
    std::vector<MarginalCurve> curves(parties.size());
    std::vector<bool> seen(parties.size(), false);
    for (std::size_t k = 0; k < parties.size(); ++k) {
        const std::string path = "parties[" + std::to_string(k) + "]";
        const json& p = parties[k];
        if (!p.is_object())
            fail(path, "expected an object");
        const double idRaw = numberField(p, path, "id");
        const int id = static_cast<int>(idRaw);
        if (idRaw != id || id < 0 || id >= static_cast<int>(parties.size()))
            fail(path + ".id", "party ids must be 0..n and each appear once");
        if (seen[static_cast<std::size_t>(id)])
            fail(path + ".id", "duplicate party id");
        seen[static_cast<std::size_t>(id)] = true;

        const double recovery = numberField(p, path, "recovery");
        if (recovery < 0.0 || recovery > 1.0)
            fail(path + ".recovery", "recovery must lie in [0,1]");

        MarginalCurve curve;
        if (p.contains("effective_spread_bp")) {
            if (p.contains("lambda"))
                fail(path, "give either effective_spread_bp or lambda, not both");
            const double bp = numberField(p, path, "effective_spread_bp");
            if (bp < 0.0)
                fail(path + ".effective_spread_bp", "must be >= 0");
            if (recovery >= 1.0)
                fail(path + ".recovery", "recovery must be < 1 with effective_spread_bp");
            curve = marginalFromEffectiveSpread(id, bp * 1e-4, recovery);
        } else if (p.contains("lambda")) {
            curve = MarginalCurve{id, parseLambda(p["lambda"], path + ".lambda"), recovery};
        } else {
            fail(path, "party needs effective_spread_bp or lambda");
        }
        curves[static_cast<std::size_t>(id)] = curve;
    }
    return curves;
}

std::vector<double> parseAlphaGrid(const json& copula) {
    if (copula.contains("alpha_grid")) {
        const json& g = copula["alpha_grid"];
        if (g.is_array())
            return numberArray(g, "copula.alpha_grid");
        if (!g.is_object())
            fail("copula.alpha_grid", "expected an array or {start, stop, step}");
        const double start = numberField(g, "copula.alpha_grid", "start");
        const double stop = numberField(g, "copula.alpha_grid", "stop");
        const double step = numberField(g, "copula.alpha_grid", "step");
        if (step <= 0.0 || stop < start)
            fail("copula.alpha_grid", "need step > 0 and stop >= start");
        std::vector<double> grid;
        for (int k = 0;; ++k) {
            const double a = start + k * step;
            if (a > stop + 1e-12)
                break;
            grid.push_back(a);
        }
        return grid;
    }
    // default grid [0, 5] in steps of 0.25
    std::vector<double> grid;
    for (int k = 0; k <= 20; ++k)
        grid.push_back(0.25 * k);
    return grid;
}

} // namespace

ExperimentConfig parseConfig(const std::string& jsonText) {
    json root;
    try {
        root = json::parse(jsonText);
    } catch (const json::parse_error& e) {
        fail("<root>", std::string("not valid JSON: ") + e.what());
    }
    if (!root.is_object())
        fail("<root>", "expected a JSON object");

    ExperimentConfig cfg;
    cfg.curves = parseParties(root);

    const json& copula = member(root, "", "copula");
    const std::string family = member(copula, "copula", "family").is_string()
                                   ? copula["family"].get<std::string>()
                                   : std::string();
    if (family == "clayton")
        cfg.family = CopulaFamily::Clayton;
    else if (family == "product")
        cfg.family = CopulaFamily::Product;
    else
        fail("copula.family", "expected \"clayton\" or \"product\"");
    cfg.alpha = numberOr(copula, "copula", "alpha", 0.0);
    if (cfg.alpha < 0.0)
        fail("copula.alpha", "alpha must be >= 0");
    cfg.alphaGrid = parseAlphaGrid(copula);
    for (double a : cfg.alphaGrid)
        if (a < 0.0)
            fail("copula.alpha_grid", "alpha values must be >= 0");

    const json& deal = member(root, "", "deal");
    if (deal.contains("maturities"))
        cfg.maturities = numberArray(deal["maturities"], "deal.maturities");
    else
        cfg.maturities = {numberOr(deal, "deal", "maturity", 5.0)};
    for (double T : cfg.maturities)
        if (T <= 0.0)
            fail("deal.maturities", "maturities must be positive");

    cfg.deal.maturity = cfg.maturities.front();
    cfg.deal.premium = numberOr(deal, "deal", "premium_bp", 0.0) * 1e-4;
    cfg.deal.collateralRate = numberOr(deal, "deal", "collateral_rate", 0.02);
    cfg.deal.collateralReturn = numberOr(deal, "deal", "collateral_return", 0.0);
    cfg.deal.foreignCollateralSpread = numberOr(deal, "deal", "foreign_collateral_spread", 0.0);
    cfg.deal.coverageBuyer = numberOr(deal, "deal", "coverage_buyer", 1.0);
    cfg.deal.coverageSeller = numberOr(deal, "deal", "coverage_seller", 1.0);
    cfg.deal.protectionBuyer = static_cast<int>(integerOr(deal, "deal", "buyer", 1));
    cfg.deal.protectionSeller = static_cast<int>(integerOr(deal, "deal", "seller", 2));
    try {
        cfg.deal.validate();
    } catch (const std::invalid_argument& e) {
        fail("deal", e.what());
    }
    if (cfg.deal.protectionBuyer >= cfg.dim() || cfg.deal.protectionSeller >= cfg.dim())
        fail("deal", "buyer/seller outside the party set");

    if (root.contains("quadrature")) {
        const json& q = root["quadrature"];
        cfg.pricing.relTol = numberOr(q, "quadrature", "rel_tol", cfg.pricing.relTol);
        cfg.pricing.innerTol = numberOr(q, "quadrature", "inner_tol", cfg.pricing.innerTol);
        if (cfg.pricing.relTol <= 0.0 || cfg.pricing.innerTol <= 0.0)
            fail("quadrature", "tolerances must be positive");
    }

    if (root.contains("sim")) {
        const json& s = root["sim"];
        cfg.sim.paths = integerOr(s, "sim", "paths", cfg.sim.paths);
        cfg.sim.seed = static_cast<std::uint64_t>(integerOr(s, "sim", "seed", 42));
        cfg.sim.batch = integerOr(s, "sim", "batch", cfg.sim.batch);
        cfg.sim.jobs = static_cast<int>(integerOr(s, "sim", "jobs", 0));
        try {
            cfg.sim.validate();
        } catch (const std::invalid_argument& e) {
            fail("sim", e.what());
        }
    }

    if (root.contains("validation")) {
        const json& v = root["validation"];
        if (v.contains("alphas"))
            cfg.validateAlphas = numberArray(v["alphas"], "validation.alphas");
        if (v.contains("maturities"))
            cfg.validateMaturities = numberArray(v["maturities"], "validation.maturities");
    }
    if (cfg.validateAlphas.empty())
        cfg.validateAlphas = {1.0, 3.0};
    if (cfg.validateMaturities.empty())
        cfg.validateMaturities = {5.0};

    if (root.contains("output")) {
        if (!root["output"].is_string())
            fail("output", "expected a string path");
        cfg.output = root["output"].get<std::string>();
    }
    return cfg;
}

ExperimentConfig loadConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail("<file>", "cannot open config file " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parseConfig(buffer.str());
}

namespace {

ExperimentConfig figConfig(const std::vector<double>& effectiveSpreadsBp) {
    ExperimentConfig cfg;
    for (std::size_t k = 0; k < effectiveSpreadsBp.size(); ++k)
        cfg.curves.push_back(
            marginalFromEffectiveSpread(static_cast<int>(k), effectiveSpreadsBp[k] * 1e-4, 0.4));
    cfg.family = CopulaFamily::Clayton;
    cfg.alpha = 2.0;
    for (int k = 0; k <= 20; ++k)
        cfg.alphaGrid.push_back(0.25 * k);
    cfg.maturities = {1.0, 5.0, 10.0, 20.0};
    cfg.deal.maturity = 5.0;
    cfg.deal.premium = 0.02;
    cfg.deal.collateralRate = 0.02;
    cfg.validateAlphas = {1.0, 3.0};
    cfg.validateMaturities = {5.0};
    return cfg;
}

} // namespace

ExperimentConfig defaultFig1Config() { return figConfig({200.0, 100.0, 120.0}); }

ExperimentConfig defaultFig2Config() { return figConfig({200.0, 30.0, 150.0, 75.0}); }

} // namespace ccds
