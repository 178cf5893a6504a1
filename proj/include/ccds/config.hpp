#ifndef ccds_config_hpp
#define ccds_config_hpp

#include <string>
#include <vector>

#include "ccds/copula.hpp"
#include "ccds/curves.hpp"
#include "ccds/deal.hpp"
#include "ccds/mc.hpp"
#include "ccds/pricer.hpp"

namespace ccds {

/*! Parsed experiment description. See README for the JSON schema; invalid
    fields raise ConfigError carrying the offending field path. */
struct ExperimentConfig {
    std::vector<MarginalCurve> curves;
    CopulaFamily family = CopulaFamily::Clayton;
    double alpha = 0.0;
    std::vector<double> alphaGrid;    // for the figure commands
    std::vector<double> maturities;   // years
    DealSpec deal;                    // deal.maturity = maturities.front()
    std::vector<double> validateAlphas;     // MC-validation knots of the grid
    std::vector<double> validateMaturities;
    PricingControl pricing;
    SimConfig sim;
    std::string output;

    int dim() const { return static_cast<int>(curves.size()); }
};

ExperimentConfig loadConfig(const std::string& path);
ExperimentConfig parseConfig(const std::string& jsonText);

//! built-in 3-party setup: effective spreads (200, 100, 120) bp, R = 40%, c = 2%
ExperimentConfig defaultFig1Config();
//! built-in 4-party setup: effective spreads (200, 30, 150, 75) bp
ExperimentConfig defaultFig2Config();

} // namespace ccds

#endif
