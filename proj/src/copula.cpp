#include "ccds/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccds/errors.hpp"

namespace ccds {

CopulaSpec CopulaSpec::clayton(double alpha, int dim) {
    CopulaSpec spec{CopulaFamily::Clayton, alpha, dim};
    spec.validate();
    return spec;
}

CopulaSpec CopulaSpec::product(int dim) {
    CopulaSpec spec{CopulaFamily::Product, 0.0, dim};
    spec.validate();
    return spec;
}

void CopulaSpec::validate() const {
    CCDS_REQUIRE(dim >= 2, "copula dim must be >= 2, got " << dim);
    if (family == CopulaFamily::Clayton)
        CCDS_REQUIRE(alpha >= 0.0 && std::isfinite(alpha),
                     "Clayton alpha must be finite and >= 0, got " << alpha);
}

void CopulaSpec::checkArgs(std::span<const double> u) const {
    CCDS_REQUIRE(static_cast<int>(u.size()) == dim,
                 "copula argument has length " << u.size() << ", expected " << dim);
    for (double x : u)
        CCDS_REQUIRE(x > 0.0 && x <= 1.0, "copula argument " << x << " outside (0,1]");
}

namespace {

// Kahan-compensated sum of expm1(-alpha*ln u_i); this is alpha * sum phi(u_i)
// for the Clayton generator phi(u) = (u^-alpha - 1)/alpha.
double phiSum(std::span<const double> u, double alpha, double& maxExponent) {
    double sum = 0.0, comp = 0.0;
    maxExponent = 0.0;
    for (double x : u) {
        const double e = -alpha * std::log(x);
        maxExponent = std::max(maxExponent, e);
        const double term = std::expm1(e) - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

// ln C for arguments so small that u^-alpha overflows: factor out the largest
// exponent m: sum u_i^-alpha - n = e^m * (sum e^(e_i - m) - n e^-m).
double logValueScaled(std::span<const double> u, double alpha) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : u)
        m = std::max(m, -alpha * std::log(x));
    double sum = 0.0;
    for (double x : u)
        sum += std::exp(-alpha * std::log(x) - m);
    sum -= static_cast<double>(u.size()) * std::exp(-m);
    return -(m + std::log(sum)) / alpha;
}

double productOfCoefficients(double alpha, int order) {
    // prod_{m=1}^{order} (1 + (m-1) alpha)
    double c = 1.0;
    for (int m = 1; m < order; ++m)
        c *= 1.0 + m * alpha;
    return c;
}

} // namespace

double CopulaSpec::logValue(std::span<const double> u) const {
    checkArgs(u);
    if (effectivelyProduct()) {
        double s = 0.0;
        for (double x : u)
            s += std::log(x);
        return s;
    }
    double maxExponent = 0.0;
    const double s = phiSum(u, alpha, maxExponent);
    if (maxExponent > 690.0) // expm1 would overflow
        return logValueScaled(u, alpha);
    return -std::log1p(s) / alpha;
}

double CopulaSpec::value(std::span<const double> u) const { return std::exp(logValue(u)); }

double CopulaSpec::logSubsetPartial(std::span<const double> u, std::span<const int> D) const {
    checkArgs(u);
    CCDS_REQUIRE(!D.empty(), "subsetPartial: empty index set");
    CCDS_REQUIRE(static_cast<int>(D.size()) <= dim,
                 "subsetPartial: |D| = " << D.size() << " exceeds dim = " << dim);
    std::vector<int> sorted(D.begin(), D.end());
    std::sort(sorted.begin(), sorted.end());
    CCDS_REQUIRE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                 "subsetPartial: duplicate index in D");
    CCDS_REQUIRE(sorted.front() >= 0 && sorted.back() < dim,
                 "subsetPartial: index out of range of dim " << dim);

    if (effectivelyProduct()) {
        // d_D prod u_k = prod over k not in D
        double s = 0.0;
        std::size_t pos = 0;
        for (int k = 0; k < dim; ++k) {
            if (pos < sorted.size() && sorted[pos] == k) {
                ++pos;
                continue;
            }
            s += std::log(u[k]);
        }
        return s;
    }

    const int order = static_cast<int>(D.size());
    const double logC = logValue(u);
    double logUprod = 0.0;
    for (int j : sorted)
        logUprod += std::log(u[j]);
    return std::log(productOfCoefficients(alpha, order)) + (1.0 + order * alpha) * logC -
           (1.0 + alpha) * logUprod;
}

double CopulaSpec::subsetPartial(std::span<const double> u, std::span<const int> D) const {
    return std::exp(logSubsetPartial(u, D));
}

double CopulaSpec::partial(std::span<const double> u, int i) const {
    const int D[1] = {i};
    return subsetPartial(u, D);
}

double CopulaSpec::partial2(std::span<const double> u, int i, int j) const {
    CCDS_REQUIRE(i != j, "partial2 requires distinct indices, got i = j = " << i);
    const int D[2] = {i, j};
    return subsetPartial(u, D);
}

} // namespace ccds
