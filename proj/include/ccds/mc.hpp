#ifndef ccds_mc_hpp
#define ccds_mc_hpp

#include <cstdint>
#include <span>
#include <vector>

#include "ccds/curves.hpp"
#include "ccds/deal.hpp"
#include "ccds/copula.hpp"
#include "ccds/rng.hpp"
#include "ccds/scenario.hpp"

namespace ccds {

//! z for the two-sided 99.9% confidence band quoted by every estimator
inline constexpr double kZ999 = 3.29;

struct SimConfig {
    std::int64_t paths = 1'000'000;
    std::uint64_t seed = 42;
    std::int64_t batch = 65536; // reduction granularity; fixed => worker-count invariant
    int jobs = 0;               // 0 -> hardware concurrency

    void validate() const;
};

struct McEstimate {
    double mean = 0.0;
    double standardError = 0.0;
    std::int64_t paths = 0;

    double lower999() const { return mean - kZ999 * standardError; }
    double upper999() const { return mean + kZ999 * standardError; }
};

//! joint protection/annuity estimate, so values and par spreads inherit the
//! path-level covariance
struct McLegs {
    double meanProtection = 0.0;
    double meanAnnuity = 0.0;
    double varProtection = 0.0; // per-path sample variances
    double varAnnuity = 0.0;
    double covariance = 0.0;
    std::int64_t paths = 0;

    McEstimate value(double premium) const;
    McEstimate parSpread() const; // delta-method ratio estimator
};

//! Clayton-dependent uniforms via the gamma frailty mixture; alpha below the
//! floor falls back to independent uniforms
void sampleClayton(double alpha, int dim, PathRng& rng, std::span<double> out);

//! joint default times tau^i = inf{t : gamma^i(t) <= U^i}; resamples the path
//! on a tie at 64-bit resolution (no simultaneous defaults)
void sampleDefaultTimes(double alpha, std::span<const MarginalCurve> curves, PathRng& rng,
                        std::span<double> tau);

/*! Radon-Nikodym-weighted estimator of the perfect-collateral value under the
    survival measure for S = {0, buyer, seller}:
      legs = E^Q[ int_0^(tau_S ^ T) e^(int_0^s (h^b + h^sell - c - y_ij) du)
                  {1, (1-R^0) h^0_s} ds ]
    with pathwise (Q,F)-hazards conditioned on the simulated defaults of C'. */
McLegs mcLegsWeighted(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                      const SimConfig& sim);

//! value(deal.premium) of the above
McEstimate mcPriceWeighted(double alpha, std::span<const MarginalCurve> curves,
                           const DealSpec& deal, const SimConfig& sim);

/*! Lower-variance 4-party oracle: simulates only the contagion source's
    default time by inverting its Q'-survival function, then evaluates the
    inner time integrals deterministically. */
McLegs mcLegsQPrimeDirect(double alpha, std::span<const MarginalCurve> curves,
                          const DealSpec& deal, const SimConfig& sim);

//! E^Q[ 1_{tau_S > T} exp(int_0^T sum_{i in S} h^i) ]; must be 1 (unit mass
//! of the survival-measure density)
McEstimate mcQPrimeMass(double alpha, std::span<const MarginalCurve> curves,
                        const SurvivalSet& survivalSet, double horizon, const SimConfig& sim);

//! conditioning event for the binned estimators
struct DefaultWindow {
    int party = 0;
    double lo = 0.0, hi = 0.0; // tau in (lo, hi]
};
struct BinnedConditioning {
    std::vector<DefaultWindow> defaulted;
    std::vector<int> alive; // parties required alive at the evaluation time
};

//! P(tau^i in (t, t+dt] | conditioning) / dt
McEstimate mcHazardBinned(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
                          const BinnedConditioning& conditioning, int i, double t, double dt,
                          const SimConfig& sim);

//! P(tau^i > T | conditioning at t)
McEstimate mcConditionalSurvival(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
                                 const BinnedConditioning& conditioning, int i, double t,
                                 double T, const SimConfig& sim);

//! empirical C(u) = P(U <= u componentwise) from the sampler
McEstimate mcJointCdf(const CopulaSpec& copula, std::span<const double> u, const SimConfig& sim);

} // namespace ccds

#endif
