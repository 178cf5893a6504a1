#include "ccds/mc.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ccds/errors.hpp"
#include "ccds/parallel.hpp"

namespace ccds {

void SimConfig::validate() const {
    CCDS_REQUIRE(paths >= 1, "paths must be >= 1, got " << paths);
    CCDS_REQUIRE(batch >= 1, "batch must be >= 1, got " << batch);
}

McEstimate McLegs::value(double premium) const {
    const double var =
        varProtection + premium * premium * varAnnuity - 2.0 * premium * covariance;
    return McEstimate{meanProtection - premium * meanAnnuity,
                      std::sqrt(std::max(var, 0.0) / static_cast<double>(paths)), paths};
}

McEstimate McLegs::parSpread() const {
    CCDS_NUMERIC_CHECK(meanAnnuity > 0.0, "nonpositive annuity estimate; par spread undefined");
    const double theta = meanProtection / meanAnnuity;
    const double var =
        (varProtection - 2.0 * theta * covariance + theta * theta * varAnnuity) /
        (meanAnnuity * meanAnnuity);
    return McEstimate{theta, std::sqrt(std::max(var, 0.0) / static_cast<double>(paths)), paths};
}

void sampleClayton(double alpha, int dim, PathRng& rng, std::span<double> out) {
    CCDS_REQUIRE(alpha >= 0.0, "alpha must be >= 0, got " << alpha);
    CCDS_REQUIRE(static_cast<int>(out.size()) == dim && dim >= 1, "bad output span");
    if (alpha < kClaytonAlphaFloor) {
        for (int i = 0; i < dim; ++i)
            out[static_cast<std::size_t>(i)] = rng.nextUniform();
        return;
    }
    // frailty mixture: W ~ Gamma(1/alpha, 1), U_i = (1 + X_i/W)^(-1/alpha)
    const double w = rng.nextGamma(1.0 / alpha);
    for (int i = 0; i < dim; ++i) {
        const double x = rng.nextExponential();
        const double u = std::exp(-std::log1p(x / w) / alpha);
        out[static_cast<std::size_t>(i)] = std::max(u, 1e-300);
    }
}

void sampleDefaultTimes(double alpha, std::span<const MarginalCurve> curves, PathRng& rng,
                        std::span<double> tau) {
    const int dim = static_cast<int>(curves.size());
    CCDS_REQUIRE(tau.size() == curves.size(), "bad output span");
    std::array<double, 16> u{};
    CCDS_REQUIRE(dim <= 16, "more than 16 parties unsupported");
    for (;;) {
        sampleClayton(alpha, dim, rng, std::span<double>(u.data(), static_cast<std::size_t>(dim)));
        for (int i = 0; i < dim; ++i)
            tau[static_cast<std::size_t>(i)] =
                curves[static_cast<std::size_t>(i)].defaultTimeFromUniform(
                    u[static_cast<std::size_t>(i)]);
        // no simultaneous defaults: resample the whole path on a float-exact tie
        bool tie = false;
        std::array<double, 16> sorted{};
        std::copy(tau.begin(), tau.end(), sorted.begin());
        std::sort(sorted.begin(), sorted.begin() + dim);
        for (int i = 0; i + 1 < dim; ++i)
            if (std::isfinite(sorted[static_cast<std::size_t>(i)]) &&
                sorted[static_cast<std::size_t>(i)] == sorted[static_cast<std::size_t>(i + 1)])
                tie = true;
        if (!tie)
            return;
    }
}

namespace {

constexpr double kPathStep = 1.0 / 64.0; // RK4 step for the per-path weight integrals
constexpr int kPrefixCells = 4096;

/*! Deterministic batch reduction: per-batch Kahan sums of K statistics,
    combined in batch order. Worker count only changes which thread computes
    which batch, so estimates are bitwise identical. */
template <std::size_t K, class PerPath>
std::array<double, K> accumulatePaths(const SimConfig& sim, PerPath&& perPath) {
    sim.validate();
    const std::int64_t nBatches = (sim.paths + sim.batch - 1) / sim.batch;
    std::vector<std::array<double, K>> partials(static_cast<std::size_t>(nBatches));
    parallelFor(nBatches, sim.jobs, [&](std::int64_t b) {
        std::array<double, K> sum{}, comp{};
        const std::int64_t lo = b * sim.batch;
        const std::int64_t hi = std::min(sim.paths, lo + sim.batch);
        std::array<double, K> x;
        for (std::int64_t i = lo; i < hi; ++i) {
            x.fill(0.0);
            PathRng rng(sim.seed, static_cast<std::uint64_t>(i));
            perPath(rng, x);
            for (std::size_t k = 0; k < K; ++k) {
                const double term = x[k] - comp[k];
                const double next = sum[k] + term;
                comp[k] = (next - sum[k]) - term;
                sum[k] = next;
            }
        }
        partials[static_cast<std::size_t>(b)] = sum;
    });
    std::array<double, K> total{}, comp{};
    for (const auto& part : partials) {
        for (std::size_t k = 0; k < K; ++k) {
            const double term = part[k] - comp[k];
            const double next = total[k] + term;
            comp[k] = (next - total[k]) - term;
            total[k] = next;
        }
    }
    return total;
}

//! scenario-conditional Clayton hazards along a simulated path: freezing a
//! defaulted party fixes its phi-term at gamma(tau) and bumps the jump factor
struct PathHazardContext {
    double alpha = 0.0;
    std::span<const MarginalCurve> curves;
    std::uint32_t frozenMask = 0;
    double frozenSum = 0.0; // sum over frozen j of expm1(alpha * Lambda^j(tau_j))
    int numFrozen = 0;

    bool product() const { return alpha < kClaytonAlphaFloor; }

    void freeze(int party, double tau) {
        frozenMask |= 1u << static_cast<unsigned>(party);
        frozenSum +=
            std::expm1(alpha * curves[static_cast<std::size_t>(party)].lambda.integral(0.0, tau));
        ++numFrozen;
    }

    //! h^p(t) for each requested (alive) party p, sharing one copula evaluation
    void hazards(double t, std::span<const int> parties, std::span<double> out) const {
        const int dim = static_cast<int>(curves.size());
        if (product()) {
            for (std::size_t k = 0; k < parties.size(); ++k)
                out[k] = curves[static_cast<std::size_t>(parties[k])].lambda(t);
            return;
        }
        std::array<double, 16> aLambda{}; // alpha * Lambda^m(t) for living parties
        double s = frozenSum;
        for (int m = 0; m < dim; ++m) {
            if (frozenMask & (1u << static_cast<unsigned>(m)))
                continue;
            aLambda[static_cast<std::size_t>(m)] =
                alpha * curves[static_cast<std::size_t>(m)].lambda.integral(0.0, t);
            s += std::expm1(aLambda[static_cast<std::size_t>(m)]);
        }
        const double logC = -std::log1p(s) / alpha;
        const double jump = 1.0 + numFrozen * alpha;
        for (std::size_t k = 0; k < parties.size(); ++k) {
            const int p = parties[k];
            out[k] = curves[static_cast<std::size_t>(p)].lambda(t) * jump *
                     std::exp(alpha * logC + aLambda[static_cast<std::size_t>(p)]);
        }
    }
};

struct LegPoint {
    double e = 0.0;    // accumulated weight exponent
    double ann = 0.0;  // int e^E ds
    double prot = 0.0; // int e^E (1-R^0) h^0 ds
};

//! which hazards enter the weight exponent and with what sign
struct LegIntegrandSpec {
    std::array<int, 3> weightParties{};
    std::array<double, 3> weightCoeffs{};
    int numWeights = 0;
    double drift = 0.0; // c + y_ij
    double lossGivenDefault = 0.0;
};

//! coupled RK4 for (E, ann, prot): E' = sum_k coeff_k h^(w_k) - drift,
//! ann' = e^E, prot' = e^E (1-R^0) h^0
struct PathLegIntegrator {
    const PathHazardContext* ctx = nullptr;
    const LegIntegrandSpec* spec = nullptr;

    struct Rates {
        double e, flow;
    };

    Rates rates(double t) const {
        std::array<int, 4> parties{};
        parties[0] = 0;
        for (int k = 0; k < spec->numWeights; ++k)
            parties[static_cast<std::size_t>(k + 1)] = spec->weightParties[static_cast<std::size_t>(k)];
        std::array<double, 4> h{};
        ctx->hazards(t, std::span<const int>(parties.data(), static_cast<std::size_t>(1 + spec->numWeights)),
                     std::span<double>(h.data(), static_cast<std::size_t>(1 + spec->numWeights)));
        double eRate = -spec->drift;
        for (int k = 0; k < spec->numWeights; ++k)
            eRate += spec->weightCoeffs[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(k + 1)];
        return {eRate, spec->lossGivenDefault * h[0]};
    }

    void advance(LegPoint& p, double a, double b, int substeps) const {
        if (b <= a)
            return;
        const double h = (b - a) / substeps;
        for (int n = 0; n < substeps; ++n) {
            const double t = a + n * h;
            const Rates r1 = rates(t);
            const Rates r2 = rates(t + 0.5 * h);
            const Rates r4 = rates(t + h);
            const double w1 = std::exp(p.e);
            const double e2 = p.e + 0.5 * h * r1.e;
            const double w2 = std::exp(e2);
            const double e3 = p.e + 0.5 * h * r2.e;
            const double w3 = std::exp(e3);
            const double e4 = p.e + h * r2.e; // k3 advances with the midpoint rate
            const double w4 = std::exp(e4);
            p.ann += h / 6.0 * (w1 + 2.0 * w2 + 2.0 * w3 + w4);
            p.prot += h / 6.0 *
                      (w1 * r1.flow + 2.0 * (w2 + w3) * r2.flow + w4 * r4.flow);
            p.e += h / 6.0 * (r1.e + 4.0 * r2.e + r4.e);
        }
    }
};

int substepsFor(double length) {
    return std::max(2, static_cast<int>(std::ceil(length / kPathStep)));
}

std::vector<double> intensityBreakpoints(std::span<const MarginalCurve> curves, double horizon) {
    std::vector<double> pts;
    for (const auto& c : curves)
        for (double t : c.lambda.stepTimes())
            if (t > 0.0 && t < horizon)
                pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

//! advance across [from, to], restarting the RK4 at intensity breakpoints
void advanceSplit(const PathLegIntegrator& integ, LegPoint& p, double from, double to,
                  std::span<const double> breaks) {
    double cur = from;
    for (double brk : breaks) {
        if (brk <= cur)
            continue;
        if (brk >= to)
            break;
        integ.advance(p, cur, brk, substepsFor(brk - cur));
        cur = brk;
    }
    integ.advance(p, cur, to, substepsFor(to - cur));
}

//! shared all-alive prefix of the path integrals, tabulated once per run on a
//! grid whose edges include every intensity breakpoint
class AllAlivePrefix {
public:
    AllAlivePrefix(double alpha, std::span<const MarginalCurve> curves,
                   const LegIntegrandSpec& spec, double horizon, int cells = kPrefixCells)
        : ctx_{alpha, curves}, spec_(spec) {
        edges_.reserve(static_cast<std::size_t>(cells) + 8);
        const auto breaks = intensityBreakpoints(curves, horizon);
        std::size_t nextBreak = 0;
        for (int k = 0; k <= cells; ++k) {
            const double edge = horizon * k / cells;
            while (nextBreak < breaks.size() && breaks[nextBreak] < edge) {
                if (breaks[nextBreak] > edges_.back())
                    edges_.push_back(breaks[nextBreak]);
                ++nextBreak;
            }
            if (edges_.empty() || edge > edges_.back())
                edges_.push_back(edge);
        }
        grid_.resize(edges_.size());
        PathLegIntegrator integ{&ctx_, &spec_};
        LegPoint p;
        grid_[0] = p;
        for (std::size_t k = 1; k < edges_.size(); ++k) {
            integ.advance(p, edges_[k - 1], edges_[k], 2);
            grid_[k] = p;
        }
    }

    LegPoint at(double x) const {
        const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - edges_.begin()) - 1;
        LegPoint p = grid_[k];
        if (x > edges_[k]) {
            PathLegIntegrator integ{&ctx_, &spec_};
            integ.advance(p, edges_[k], std::min(x, edges_.back()), 2);
        }
        return p;
    }

    const PathHazardContext& context() const { return ctx_; }

private:
    PathHazardContext ctx_;
    LegIntegrandSpec spec_;
    std::vector<double> edges_{0.0};
    std::vector<LegPoint> grid_;
};

McLegs legsFromMoments(const std::array<double, 5>& sums, std::int64_t n) {
    McLegs legs;
    legs.paths = n;
    const double dn = static_cast<double>(n);
    legs.meanAnnuity = sums[0] / dn;
    legs.meanProtection = sums[1] / dn;
    if (n > 1) {
        legs.varAnnuity = std::max(0.0, (sums[2] - dn * legs.meanAnnuity * legs.meanAnnuity) / (dn - 1.0));
        legs.varProtection =
            std::max(0.0, (sums[3] - dn * legs.meanProtection * legs.meanProtection) / (dn - 1.0));
        legs.covariance = (sums[4] - dn * legs.meanAnnuity * legs.meanProtection) / (dn - 1.0);
    }
    return legs;
}

void checkMcDeal(std::span<const MarginalCurve> curves, const DealSpec& deal) {
    deal.validate();
    const int dim = static_cast<int>(curves.size());
    CCDS_REQUIRE(dim >= 3 && dim <= 16, "need between 3 and 16 parties, got " << dim);
    for (int k = 0; k < dim; ++k)
        CCDS_REQUIRE(curves[static_cast<std::size_t>(k)].party == k,
                     "curves must be ordered by party index");
    CCDS_REQUIRE(deal.protectionBuyer < dim && deal.protectionSeller < dim,
                 "deal parties outside the curve set");
}

} // namespace

McLegs mcLegsWeighted(double alpha, std::span<const MarginalCurve> curves, const DealSpec& deal,
                      const SimConfig& sim) {
    checkMcDeal(curves, deal);
    CCDS_REQUIRE(alpha >= 0.0, "alpha must be >= 0, got " << alpha);
    const int dim = static_cast<int>(curves.size());
    const double T = deal.maturity;

    LegIntegrandSpec spec;
    spec.weightParties = {deal.protectionBuyer, deal.protectionSeller, 0};
    spec.weightCoeffs = {1.0, 1.0, 0.0};
    spec.numWeights = 2;
    spec.drift = deal.collateralRate + deal.foreignCollateralSpread;
    spec.lossGivenDefault = 1.0 - curves[0].recovery;

    const AllAlivePrefix prefix(alpha, curves, spec, T);
    const std::vector<double> breaks = intensityBreakpoints(curves, T);

    std::array<bool, 16> inSurvivalSet{};
    inSurvivalSet[0] = true;
    inSurvivalSet[static_cast<std::size_t>(deal.protectionBuyer)] = true;
    inSurvivalSet[static_cast<std::size_t>(deal.protectionSeller)] = true;

    const auto sums = accumulatePaths<5>(sim, [&](PathRng& rng, std::array<double, 5>& x) {
        std::array<double, 16> tau{};
        sampleDefaultTimes(alpha, curves, rng, std::span<double>(tau.data(), static_cast<std::size_t>(dim)));

        double tauS = tau[0];
        tauS = std::min(tauS, tau[static_cast<std::size_t>(deal.protectionBuyer)]);
        tauS = std::min(tauS, tau[static_cast<std::size_t>(deal.protectionSeller)]);
        const double tEnd = std::min(tauS, T);

        // contagion events: C' defaults strictly before the integration end
        std::array<std::pair<double, int>, 16> events{};
        int numEvents = 0;
        for (int p = 0; p < dim; ++p)
            if (!inSurvivalSet[static_cast<std::size_t>(p)] &&
                tau[static_cast<std::size_t>(p)] < tEnd)
                events[static_cast<std::size_t>(numEvents++)] = {tau[static_cast<std::size_t>(p)], p};
        std::sort(events.begin(), events.begin() + numEvents);

        LegPoint pt;
        if (numEvents == 0) {
            pt = prefix.at(tEnd);
        } else {
            pt = prefix.at(events[0].first);
            PathHazardContext ctx{alpha, curves};
            PathLegIntegrator integ{&ctx, &spec};
            double t = events[0].first;
            for (int j = 0; j < numEvents; ++j) {
                ctx.freeze(events[static_cast<std::size_t>(j)].second,
                           events[static_cast<std::size_t>(j)].first);
                const double to = (j + 1 < numEvents) ? events[static_cast<std::size_t>(j + 1)].first : tEnd;
                advanceSplit(integ, pt, t, to, breaks);
                t = to;
            }
        }
        CCDS_NUMERIC_CHECK(std::isfinite(pt.ann) && std::isfinite(pt.prot),
                           "non-finite Radon-Nikodym weight: hazard blow-up along a path");
        x = {pt.ann, pt.prot, pt.ann * pt.ann, pt.prot * pt.prot, pt.ann * pt.prot};
    });
    return legsFromMoments(sums, sim.paths);
}

McEstimate mcPriceWeighted(double alpha, std::span<const MarginalCurve> curves,
                           const DealSpec& deal, const SimConfig& sim) {
    return mcLegsWeighted(alpha, curves, deal, sim).value(deal.premium);
}

namespace {

//! inverts the Q'-survival of one party: K(t) = int_0^t h'(u) du, tabulated,
//! with an in-cell Newton refinement on exact hazard evaluations
class SurvivalInverter {
public:
    SurvivalInverter(const PathHazardContext& ctx, int party, double horizon, int cells = kPrefixCells)
        : ctx_(ctx), party_(party), cell_(horizon / cells) {
        grid_.resize(static_cast<std::size_t>(cells) + 1, 0.0);
        for (int k = 1; k <= cells; ++k)
            grid_[static_cast<std::size_t>(k)] =
                grid_[static_cast<std::size_t>(k - 1)] + cellIntegral((k - 1) * cell_, k * cell_);
    }

    //! smallest t with K(t) >= xi, or +inf past the horizon
    double invert(double xi) const {
        if (xi >= grid_.back())
            return kInfiniteTime;
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), xi);
        const int k = static_cast<int>(it - grid_.begin()) - 1;
        const double base = grid_[static_cast<std::size_t>(k)];
        double lo = k * cell_, hi = lo + cell_;
        double x = lo + (xi - base) / std::max(hazard(lo), 1e-300);
        x = std::clamp(x, lo, hi);
        for (int iter = 0; iter < 4; ++iter) {
            const double f = base + cellIntegral(lo, x) - xi;
            const double step = f / std::max(hazard(x), 1e-300);
            x = std::clamp(x - step, lo, hi);
        }
        return x;
    }

private:
    double hazard(double t) const {
        const int parties[1] = {party_};
        double h;
        ctx_.hazards(t, std::span<const int>(parties, 1), std::span<double>(&h, 1));
        return h;
    }

    double cellIntegral(double a, double b) const {
        // two-panel Simpson; cells are far below the hazard's variation scale
        const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        return (b - a) / 12.0 *
               (hazard(a) + 4.0 * hazard(lm) + 2.0 * hazard(m) + 4.0 * hazard(rm) + hazard(b));
    }

    PathHazardContext ctx_;
    int party_;
    double cell_;
    std::vector<double> grid_;
};

} // namespace

McLegs mcLegsQPrimeDirect(double alpha, std::span<const MarginalCurve> curves,
                          const DealSpec& deal, const SimConfig& sim) {
    checkMcDeal(curves, deal);
    CCDS_REQUIRE(curves.size() == 4, "Q'-direct oracle is a 4-party construction, got "
                                         << curves.size() << " parties");
    CCDS_REQUIRE(deal.protectionSeller == 2 || deal.protectionSeller == 3,
                 "seller must be party 2 or 3");
    const int source = deal.protectionSeller == 2 ? 3 : 2;
    const double T = deal.maturity;

    LegIntegrandSpec spec;
    spec.weightParties = {0, 0, 0};
    spec.weightCoeffs = {-1.0, 0.0, 0.0};
    spec.numWeights = 1;
    spec.drift = deal.collateralRate + deal.foreignCollateralSpread;
    spec.lossGivenDefault = 1.0 - curves[0].recovery;

    const AllAlivePrefix prefix(alpha, curves, spec, T);
    const std::vector<double> breaks = intensityBreakpoints(curves, T);
    const LegPoint noContagion = prefix.at(T);
    const SurvivalInverter inverter(prefix.context(), source, T);

    const auto sums = accumulatePaths<5>(sim, [&](PathRng& rng, std::array<double, 5>& x) {
        const double xi = rng.nextExponential();
        const double tauSource = inverter.invert(xi);
        LegPoint pt;
        if (tauSource >= T) {
            pt = noContagion;
        } else {
            pt = prefix.at(tauSource);
            PathHazardContext ctx{alpha, curves};
            ctx.freeze(source, tauSource);
            PathLegIntegrator integ{&ctx, &spec};
            advanceSplit(integ, pt, tauSource, T, breaks);
        }
        x = {pt.ann, pt.prot, pt.ann * pt.ann, pt.prot * pt.prot, pt.ann * pt.prot};
    });
    return legsFromMoments(sums, sim.paths);
}

McEstimate mcQPrimeMass(double alpha, std::span<const MarginalCurve> curves,
                        const SurvivalSet& survivalSet, double horizon, const SimConfig& sim) {
    const int dim = static_cast<int>(curves.size());
    CCDS_REQUIRE(dim >= 2 && dim <= 16, "need between 2 and 16 parties");
    survivalSet.validate(dim);
    CCDS_REQUIRE(!survivalSet.members.empty() && survivalSet.members.size() <= 3,
                 "mass check supports survival sets of 1..3 parties");
    CCDS_REQUIRE(horizon > 0.0, "horizon must be positive");

    LegIntegrandSpec spec;
    spec.numWeights = 0;
    for (int p : survivalSet.members) {
        spec.weightParties[static_cast<std::size_t>(spec.numWeights)] = p;
        spec.weightCoeffs[static_cast<std::size_t>(spec.numWeights)] = 1.0;
        ++spec.numWeights;
    }
    spec.drift = 0.0;
    spec.lossGivenDefault = 0.0;

    const AllAlivePrefix prefix(alpha, curves, spec, horizon);
    const std::vector<double> breaks = intensityBreakpoints(curves, horizon);

    const auto sums = accumulatePaths<2>(sim, [&](PathRng& rng, std::array<double, 2>& x) {
        std::array<double, 16> tau{};
        sampleDefaultTimes(alpha, curves, rng, std::span<double>(tau.data(), static_cast<std::size_t>(dim)));
        for (int p : survivalSet.members)
            if (tau[static_cast<std::size_t>(p)] <= horizon)
                return; // zero weight: the survival-set indicator kills the path

        std::array<std::pair<double, int>, 16> events{};
        int numEvents = 0;
        for (int p = 0; p < dim; ++p)
            if (!survivalSet.contains(p) && tau[static_cast<std::size_t>(p)] < horizon)
                events[static_cast<std::size_t>(numEvents++)] = {tau[static_cast<std::size_t>(p)], p};
        std::sort(events.begin(), events.begin() + numEvents);

        LegPoint pt;
        if (numEvents == 0) {
            pt = prefix.at(horizon);
        } else {
            pt = prefix.at(events[0].first);
            PathHazardContext ctx{alpha, curves};
            PathLegIntegrator integ{&ctx, &spec};
            double t = events[0].first;
            for (int j = 0; j < numEvents; ++j) {
                ctx.freeze(events[static_cast<std::size_t>(j)].second,
                           events[static_cast<std::size_t>(j)].first);
                const double to = (j + 1 < numEvents) ? events[static_cast<std::size_t>(j + 1)].first : horizon;
                advanceSplit(integ, pt, t, to, breaks);
                t = to;
            }
        }
        const double w = std::exp(pt.e);
        CCDS_NUMERIC_CHECK(std::isfinite(w), "non-finite survival-measure weight");
        x = {w, w * w};
    });

    McEstimate est;
    est.paths = sim.paths;
    const double dn = static_cast<double>(sim.paths);
    est.mean = sums[0] / dn;
    if (sim.paths > 1) {
        const double var = std::max(0.0, (sums[1] - dn * est.mean * est.mean) / (dn - 1.0));
        est.standardError = std::sqrt(var / dn);
    }
    return est;
}

namespace {

struct ConditioningCounter {
    const BinnedConditioning* cond;
    double t;

    bool satisfied(std::span<const double> tau) const {
        for (const auto& w : cond->defaulted) {
            const double x = tau[static_cast<std::size_t>(w.party)];
            if (!(x > w.lo && x <= w.hi))
                return false;
        }
        for (int p : cond->alive)
            if (tau[static_cast<std::size_t>(p)] <= t)
                return false;
        return true;
    }
};

void checkConditioning(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
                       const BinnedConditioning& conditioning, int i, double t) {
    copula.validate();
    CCDS_REQUIRE(static_cast<int>(curves.size()) == copula.dim, "curve count != copula dim");
    CCDS_REQUIRE(copula.dim <= 16, "more than 16 parties unsupported");
    CCDS_REQUIRE(i >= 0 && i < copula.dim, "party " << i << " out of range");
    CCDS_REQUIRE(t >= 0.0, "time must be >= 0");
    for (const auto& w : conditioning.defaulted) {
        CCDS_REQUIRE(w.party >= 0 && w.party < copula.dim && w.party != i,
                     "bad conditioning party " << w.party);
        CCDS_REQUIRE(w.lo >= 0.0 && w.hi > w.lo && w.hi <= t,
                     "conditioning window must sit inside [0, t]");
    }
    for (int p : conditioning.alive)
        CCDS_REQUIRE(p >= 0 && p < copula.dim, "bad alive party " << p);
}

} // namespace

McEstimate mcHazardBinned(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
                          const BinnedConditioning& conditioning, int i, double t, double dt,
                          const SimConfig& sim) {
    checkConditioning(copula, curves, conditioning, i, t);
    CCDS_REQUIRE(dt > 0.0, "dt must be positive, got " << dt);
    const int dim = copula.dim;
    const double alpha = copula.family == CopulaFamily::Product ? 0.0 : copula.alpha;
    const ConditioningCounter counter{&conditioning, t};

    const auto sums = accumulatePaths<2>(sim, [&](PathRng& rng, std::array<double, 2>& x) {
        std::array<double, 16> tau{};
        sampleDefaultTimes(alpha, curves, rng, std::span<double>(tau.data(), static_cast<std::size_t>(dim)));
        const double taui = tau[static_cast<std::size_t>(i)];
        if (taui <= t || !counter.satisfied(std::span<const double>(tau.data(), static_cast<std::size_t>(dim))))
            return;
        x[0] = 1.0;
        x[1] = (taui <= t + dt) ? 1.0 : 0.0;
    });

    const double conditioned = sums[0], hits = sums[1];
    CCDS_NUMERIC_CHECK(conditioned > 0.0,
                       "insufficient paths: conditioning event never simulated");
    const double p = hits / conditioned;
    McEstimate est;
    est.paths = static_cast<std::int64_t>(conditioned);
    est.mean = p / dt;
    est.standardError = std::sqrt(std::max(p * (1.0 - p), 0.0) / conditioned) / dt;
    return est;
}

McEstimate mcConditionalSurvival(const CopulaSpec& copula, std::span<const MarginalCurve> curves,
                                 const BinnedConditioning& conditioning, int i, double t,
                                 double T, const SimConfig& sim) {
    checkConditioning(copula, curves, conditioning, i, t);
    CCDS_REQUIRE(T >= t, "T must be >= t");
    const int dim = copula.dim;
    const double alpha = copula.family == CopulaFamily::Product ? 0.0 : copula.alpha;
    const ConditioningCounter counter{&conditioning, t};

    const auto sums = accumulatePaths<2>(sim, [&](PathRng& rng, std::array<double, 2>& x) {
        std::array<double, 16> tau{};
        sampleDefaultTimes(alpha, curves, rng, std::span<double>(tau.data(), static_cast<std::size_t>(dim)));
        const double taui = tau[static_cast<std::size_t>(i)];
        if (taui <= t || !counter.satisfied(std::span<const double>(tau.data(), static_cast<std::size_t>(dim))))
            return;
        x[0] = 1.0;
        x[1] = (taui > T) ? 1.0 : 0.0;
    });

    const double conditioned = sums[0], hits = sums[1];
    CCDS_NUMERIC_CHECK(conditioned > 0.0,
                       "insufficient paths: conditioning event never simulated");
    const double p = hits / conditioned;
    McEstimate est;
    est.paths = static_cast<std::int64_t>(conditioned);
    est.mean = p;
    est.standardError = std::sqrt(std::max(p * (1.0 - p), 0.0) / conditioned);
    return est;
}

McEstimate mcJointCdf(const CopulaSpec& copula, std::span<const double> u, const SimConfig& sim) {
    copula.validate();
    CCDS_REQUIRE(static_cast<int>(u.size()) == copula.dim, "threshold size != copula dim");
    CCDS_REQUIRE(copula.dim <= 16, "more than 16 parties unsupported");
    const int dim = copula.dim;
    const double alpha = copula.family == CopulaFamily::Product ? 0.0 : copula.alpha;

    const auto sums = accumulatePaths<1>(sim, [&](PathRng& rng, std::array<double, 1>& x) {
        std::array<double, 16> draw{};
        sampleClayton(alpha, dim, rng, std::span<double>(draw.data(), static_cast<std::size_t>(dim)));
        for (int k = 0; k < dim; ++k)
            if (draw[static_cast<std::size_t>(k)] > u[static_cast<std::size_t>(k)])
                return;
        x[0] = 1.0;
    });

    const double dn = static_cast<double>(sim.paths);
    const double p = sums[0] / dn;
    return McEstimate{p, std::sqrt(std::max(p * (1.0 - p), 0.0) / dn), sim.paths};
}

} // namespace ccds
