#include "ccds/curves.hpp"

#include <algorithm>
#include <cmath>

#include "ccds/errors.hpp"

namespace ccds {

PiecewiseConstantCurve::PiecewiseConstantCurve(double constantValue) : values_{constantValue} {
    CCDS_REQUIRE(constantValue >= 0.0 && std::isfinite(constantValue),
                 "rate must be finite and >= 0, got " << constantValue);
}

PiecewiseConstantCurve::PiecewiseConstantCurve(std::vector<double> stepTimes,
                                               std::vector<double> values)
    : stepTimes_(std::move(stepTimes)), values_(std::move(values)) {
    CCDS_REQUIRE(values_.size() == stepTimes_.size() + 1,
                 "need one more value than step times, got " << values_.size() << " values for "
                                                             << stepTimes_.size() << " steps");
    double prev = 0.0;
    for (double t : stepTimes_) {
        CCDS_REQUIRE(t > prev, "step times must be strictly increasing and positive");
        prev = t;
    }
    for (double v : values_)
        CCDS_REQUIRE(v >= 0.0 && std::isfinite(v), "rate must be finite and >= 0, got " << v);
}

double PiecewiseConstantCurve::operator()(double t) const {
    CCDS_REQUIRE(t >= 0.0, "time must be >= 0, got " << t);
    const auto it = std::upper_bound(stepTimes_.begin(), stepTimes_.end(), t);
    return values_[static_cast<std::size_t>(it - stepTimes_.begin())];
}

double PiecewiseConstantCurve::integral(double a, double b) const {
    CCDS_REQUIRE(a >= 0.0 && b >= a, "bad integration range [" << a << "," << b << "]");
    double sum = 0.0;
    double left = a;
    std::size_t seg = static_cast<std::size_t>(
        std::upper_bound(stepTimes_.begin(), stepTimes_.end(), a) - stepTimes_.begin());
    while (left < b) {
        const double right = seg < stepTimes_.size() ? std::min(stepTimes_[seg], b) : b;
        sum += values_[seg] * (right - left);
        left = right;
        ++seg;
    }
    return sum;
}

double PiecewiseConstantCurve::inverseIntegral(double target) const {
    CCDS_REQUIRE(target >= 0.0, "target must be >= 0, got " << target);
    if (target == 0.0)
        return 0.0;
    double cum = 0.0, left = 0.0;
    for (std::size_t seg = 0; seg < values_.size(); ++seg) {
        const bool last = seg + 1 == values_.size();
        const double right = last ? kInfiniteTime : stepTimes_[seg];
        if (values_[seg] > 0.0) {
            const double inc = values_[seg] * (right - left);
            if (last || cum + inc >= target)
                return left + (target - cum) / values_[seg];
            cum += inc;
        }
        left = right;
    }
    return kInfiniteTime;
}

double PiecewiseConstantCurve::maxValue() const {
    return *std::max_element(values_.begin(), values_.end());
}

double MarginalCurve::logSurvival(double t) const { return -lambda.integral(0.0, t); }

double MarginalCurve::survival(double t) const { return std::exp(logSurvival(t)); }

double MarginalCurve::defaultTimeFromUniform(double u) const {
    CCDS_REQUIRE(u > 0.0 && u <= 1.0, "uniform draw " << u << " outside (0,1]");
    return lambda.inverseIntegral(-std::log(u));
}

void MarginalCurve::validate(double horizon) const {
    CCDS_REQUIRE(party >= 0, "party index must be >= 0, got " << party);
    CCDS_REQUIRE(recovery >= 0.0 && recovery <= 1.0, "recovery " << recovery << " outside [0,1]");
    (void)horizon; // every curve extends to infinity by construction
}

MarginalCurve marginalFromEffectiveSpread(int party, double effectiveSpread, double recovery) {
    CCDS_REQUIRE(recovery < 1.0, "effective spread needs recovery < 1, got " << recovery);
    CCDS_REQUIRE(effectiveSpread >= 0.0, "effective spread must be >= 0, got " << effectiveSpread);
    return MarginalCurve{party, PiecewiseConstantCurve(effectiveSpread / (1.0 - recovery)),
                         recovery};
}

} // namespace ccds
