#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ccds/config.hpp"
#include "ccds/errors.hpp"
#include "ccds/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;

struct CliArgs {
    std::string configPath;
    std::string outPath;
    bool validate = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> paths;
    int jobs = 0;
};

ccds::RunOptions toRunOptions(const CliArgs& args) {
    ccds::RunOptions options;
    options.validate = args.validate;
    options.jobs = args.jobs;
    if (!args.outPath.empty())
        options.out = args.outPath;
    options.seed = args.seed;
    options.paths = args.paths;
    return options;
}

int emit(const ccds::RunResult& result, const ccds::ExperimentConfig& cfg, const CliArgs& args,
         bool toStdoutByDefault) {
    std::string target = !args.outPath.empty() ? args.outPath : cfg.output;
    if (target.empty() && toStdoutByDefault)
        target = "-";
    if (target.empty())
        throw ccds::ConfigError("output", "no output path given (config `output` or --out)");
    if (target == "-") {
        std::cout << result.text;
    } else {
        std::ofstream out(target, std::ios::binary);
        if (!out)
            throw ccds::ConfigError("output", "cannot open " + target + " for writing");
        out << result.text;
        if (!out)
            throw ccds::ConfigError("output", "failed writing " + target);
        std::cerr << "wrote " << target << "\n";
    }
    return result.ok ? kExitOk : kExitValidationFailure;
}

void addCommon(CLI::App* cmd, CliArgs& args, bool needsConfig) {
    auto* opt = cmd->add_option("--config", args.configPath, "experiment config (JSON)");
    if (needsConfig)
        opt->required();
    cmd->add_option("--out", args.outPath, "output path ('-' for stdout)");
    cmd->add_option("--seed", args.seed, "override sim.seed");
    cmd->add_option("--paths", args.paths, "override sim.paths");
    cmd->add_option("--jobs", args.jobs, "worker threads (0 = all cores)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"collateralized CDS pricing under Clayton default contagion"};
    app.require_subcommand(1);

    CliArgs args;
    auto* price = app.add_subcommand("price", "value the configured deal");
    addCommon(price, args, true);
    auto* fig1 = app.add_subcommand("fig1", "3-party par grid CSV");
    addCommon(fig1, args, true);
    fig1->add_flag("--validate", args.validate, "populate MC columns and gate on 3.29-SE agreement");
    auto* fig2 = app.add_subcommand("fig2", "4-party par grid and back-to-back gap CSV");
    addCommon(fig2, args, true);
    fig2->add_flag("--validate", args.validate, "populate MC columns and gate on 3.29-SE agreement");
    auto* b2b = app.add_subcommand("b2b", "back-to-back gap table CSV");
    addCommon(b2b, args, true);
    auto* validate = app.add_subcommand("validate", "run the full invariant suite");
    addCommon(validate, args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        ccds::ExperimentConfig cfg;
        if (!args.configPath.empty())
            cfg = ccds::loadConfig(args.configPath);
        else
            cfg = ccds::defaultFig1Config();
        const ccds::RunOptions options = toRunOptions(args);

        if (price->parsed())
            return emit(ccds::runPrice(cfg, options), cfg, args, true);
        if (fig1->parsed())
            return emit(ccds::runFig1(cfg, options), cfg, args, false);
        if (fig2->parsed())
            return emit(ccds::runFig2(cfg, options), cfg, args, false);
        if (b2b->parsed())
            return emit(ccds::runB2b(cfg, options), cfg, args, false);
        if (validate->parsed()) {
            const ccds::RunResult result = ccds::runValidate(cfg, options);
            std::cout << result.text;
            return result.ok ? kExitOk : kExitValidationFailure;
        }
    } catch (const ccds::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidationFailure;
    }
    return kExitOk;
}
