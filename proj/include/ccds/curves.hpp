#ifndef ccds_curves_hpp
#define ccds_curves_hpp

#include <limits>
#include <vector>

namespace ccds {

//! Right-continuous piecewise-constant nonnegative rate on [0, inf).
//! values[k] applies on [stepTimes[k-1], stepTimes[k]) with stepTimes[-1] = 0
//! and an implicit final segment extending to infinity.
class PiecewiseConstantCurve {
public:
    PiecewiseConstantCurve() : values_{0.0} {}
    explicit PiecewiseConstantCurve(double constantValue);
    PiecewiseConstantCurve(std::vector<double> stepTimes, std::vector<double> values);

    double operator()(double t) const;
    //! exact integral over [a, b]
    double integral(double a, double b) const;
    //! smallest t with integral(0, t) >= target; +inf when never reached
    double inverseIntegral(double target) const;

    const std::vector<double>& stepTimes() const { return stepTimes_; }
    const std::vector<double>& values() const { return values_; }
    double maxValue() const;
    bool isConstant() const { return stepTimes_.empty(); }

private:
    std::vector<double> stepTimes_; // strictly increasing interior breakpoints
    std::vector<double> values_;    // size stepTimes_.size() + 1
};

//! Marginal default description of one party: intensity lambda^i, recovery R^i.
struct MarginalCurve {
    int party = 0;
    PiecewiseConstantCurve lambda;
    double recovery = 0.0;

    //! gamma^i(t) = exp(-int_0^t lambda)
    double survival(double t) const;
    double logSurvival(double t) const;
    //! inf{ t : gamma(t) <= u }, the copula-threshold default time
    double defaultTimeFromUniform(double u) const;

    void validate(double horizon) const;
};

//! flat-intensity curve from an effective spread lambda_bar = (1-R) * lambda
MarginalCurve marginalFromEffectiveSpread(int party, double effectiveSpread, double recovery);

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

} // namespace ccds

#endif
