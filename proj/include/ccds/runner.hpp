#ifndef ccds_runner_hpp
#define ccds_runner_hpp

#include <optional>
#include <string>

#include "ccds/config.hpp"

namespace ccds {

struct RunOptions {
    bool validate = false; // populate MC columns at the validation knots
    int jobs = 0;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> paths;
};

struct RunResult {
    std::string text; // CSV body or report, LF line endings
    bool ok = true;   // false when an in-run validation check failed
};

//! 3-party par grid: alpha, maturity_years, par_spread_bp, protection_pv,
//! annuity_pv, mc_par_bp, mc_se_bp (MC columns only at validation knots)
RunResult runFig1(ExperimentConfig cfg, const RunOptions& options);

//! 4-party grid: par vs both counterparties and the back-to-back gap at the
//! buy-leg par
RunResult runFig2(ExperimentConfig cfg, const RunOptions& options);

//! back-to-back gap table at a fixed premium (config premium, else buy-leg par)
RunResult runB2b(ExperimentConfig cfg, const RunOptions& options);

//! single-deal report: legs, par, first-order breakdown, backward-ODE value
RunResult runPrice(ExperimentConfig cfg, const RunOptions& options);

//! full invariant suite; canonical report text
RunResult runValidate(const ExperimentConfig& cfg, const RunOptions& options);

//! fixed output formatting: bp half-even to 2 decimals; PV to 12 significant digits
std::string formatBpCell(double bp);
std::string formatPvCell(double v);

} // namespace ccds

#endif
