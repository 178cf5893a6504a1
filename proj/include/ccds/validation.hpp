#ifndef ccds_validation_hpp
#define ccds_validation_hpp

#include <cstdint>
#include <string>
#include <vector>

namespace ccds {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;   // deterministic for a fixed seed; no wall-clock text
    double seconds = 0.0; // informational; kept out of the canonical report
};

struct ValidationOptions {
    std::uint64_t seed = 42;
    std::int64_t mcPaths = 1'000'000;
    std::int64_t binnedPaths = 10'000'000;
    int jobs = 0; // 0 -> hardware concurrency
};

/*! The full invariant suite on the built-in 3- and 4-party setups: copula
    identities, contagion jumps, closed-form vs generic hazards, MC price and
    hazard agreement, dominance bounds, B2B symmetry, ODE/Gateaux order check,
    survival-measure mass and reproducibility. */
std::vector<CheckResult> runValidationSuite(const ValidationOptions& options);

//! canonical pass/fail lines (byte-identical across reruns with one seed)
std::string validationReport(const std::vector<CheckResult>& checks);

bool allPassed(const std::vector<CheckResult>& checks);

} // namespace ccds

#endif
