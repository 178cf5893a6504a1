#ifndef ccds_quadrature_hpp
#define ccds_quadrature_hpp

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "ccds/errors.hpp"

namespace ccds {

struct QuadratureControl {
    double relTol = 1e-10;
    double absTol = 0.0; // floor on the error target; 0 means purely relative
    int maxDepth = 48;
};

namespace detail {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
Vec<N> vecAdd(const Vec<N>& a, const Vec<N>& b) {
    Vec<N> r;
    for (std::size_t k = 0; k < N; ++k)
        r[k] = a[k] + b[k];
    return r;
}

template <std::size_t N>
double maxAbs(const Vec<N>& a) {
    double m = 0.0;
    for (double x : a)
        m = std::max(m, std::abs(x));
    return m;
}

template <std::size_t N>
Vec<N> simpson(double a, double b, const Vec<N>& fa, const Vec<N>& fm, const Vec<N>& fb) {
    Vec<N> r;
    const double h6 = (b - a) / 6.0;
    for (std::size_t k = 0; k < N; ++k)
        r[k] = (fa[k] + 4.0 * fm[k] + fb[k]) * h6;
    return r;
}

template <std::size_t N, class F>
Vec<N> adaptStep(F& f, double a, double m, double b, const Vec<N>& fa, const Vec<N>& fm,
                 const Vec<N>& fb, const Vec<N>& whole, double eps, double epsPerWidth, int depth,
                 bool& converged) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const Vec<N> flm = f(lm), frm = f(rm);
    const Vec<N> left = simpson<N>(a, m, fa, flm, fm);
    const Vec<N> right = simpson<N>(m, b, fm, frm, fb);
    Vec<N> delta;
    for (std::size_t k = 0; k < N; ++k)
        delta[k] = left[k] + right[k] - whole[k];
    // the halved budget sharpens early; the width-proportional floor keeps the
    // leaf budgets summing to the global target, so evaluation noise from
    // nested quadratures cannot force runaway refinement
    const double budget = 15.0 * std::max(eps, epsPerWidth * (b - a));
    const double noiseFloor =
        32.0 * std::numeric_limits<double>::epsilon() *
        (maxAbs(left) + maxAbs(right) + maxAbs(whole));
    if (maxAbs(delta) <= budget || maxAbs(delta) <= noiseFloor || depth <= 0) {
        if (depth <= 0 && maxAbs(delta) > std::max(budget, noiseFloor))
            converged = false;
        Vec<N> r;
        for (std::size_t k = 0; k < N; ++k)
            r[k] = left[k] + right[k] + delta[k] / 15.0;
        return r;
    }
    return vecAdd(adaptStep<N>(f, a, lm, m, fa, flm, fm, left, 0.5 * eps, epsPerWidth, depth - 1,
                               converged),
                  adaptStep<N>(f, m, rm, b, fm, frm, fb, right, 0.5 * eps, epsPerWidth, depth - 1,
                               converged));
}

} // namespace detail

//! Adaptive Simpson over [a,b] for an array-valued integrand, with forced
//! interior nodes at the supplied breakpoints (piecewise-smooth integrands).
template <std::size_t N, class F>
std::array<double, N> integrateVec(F&& f, double a, double b, const QuadratureControl& ctl = {},
                                   std::span<const double> breakpoints = {}) {
    CCDS_REQUIRE(b >= a, "integrateVec: b < a");
    std::array<double, N> zero{};
    if (b == a)
        return zero;

    std::vector<double> edges{a};
    for (double x : breakpoints)
        if (x > a && x < b)
            edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    struct Seg {
        double a, m, b;
        detail::Vec<N> fa, fm, fb, rough;
    };
    std::vector<Seg> segs;
    segs.reserve(edges.size() - 1);
    detail::Vec<N> total{};
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        Seg seg;
        seg.a = edges[s];
        seg.b = edges[s + 1];
        seg.m = 0.5 * (seg.a + seg.b);
        seg.fa = f(seg.a);
        seg.fm = f(seg.m);
        // right-continuous integrands (piecewise-constant rates) jump exactly
        // at segment edges; sample the right endpoint one ulp inside so every
        // segment sees its own one-sided limit
        seg.fb = f(std::nextafter(seg.b, seg.a));
        seg.rough = detail::simpson<N>(seg.a, seg.b, seg.fa, seg.fm, seg.fb);
        total = detail::vecAdd(total, seg.rough);
        segs.push_back(seg);
    }

    const double scale = detail::maxAbs(total);
    const double eps = std::max(ctl.absTol, ctl.relTol * scale);
    CCDS_REQUIRE(eps > 0.0, "integrateVec: zero error target (set relTol or absTol)");

    bool converged = true;
    detail::Vec<N> result{};
    const double width = b - a;
    for (auto& seg : segs) {
        const double epsSeg = eps * (seg.b - seg.a) / width;
        result = detail::vecAdd(result, detail::adaptStep<N>(f, seg.a, seg.m, seg.b, seg.fa,
                                                             seg.fm, seg.fb, seg.rough, epsSeg,
                                                             eps / width, ctl.maxDepth,
                                                             converged));
    }
    CCDS_NUMERIC_CHECK(converged, "adaptive Simpson failed to converge on ["
                                      << a << "," << b << "] at tolerance " << eps);
    return result;
}

//! Scalar adaptive Simpson.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureControl& ctl = {},
                 std::span<const double> breakpoints = {}) {
    auto wrapped = [&f](double x) -> std::array<double, 1> { return {f(x)}; };
    return integrateVec<1>(wrapped, a, b, ctl, breakpoints)[0];
}

//! Cumulative integral F(x) = ∫_0^x f with anchor caching on a fixed lattice.
//! Queries integrate adaptively only from the nearest lattice anchor below x,
//! so scattered query patterns (as generated by an outer adaptive rule) stay cheap.
template <class F>
class CumulativeIntegral {
public:
    CumulativeIntegral(F f, double horizon, std::vector<double> breakpoints, double absTol,
                       int latticeCells = 64)
        : f_(std::move(f)), horizon_(horizon), breakpoints_(std::move(breakpoints)),
          cells_(latticeCells), cell_(horizon / latticeCells) {
        CCDS_REQUIRE(horizon > 0.0 && latticeCells > 0, "CumulativeIntegral: bad horizon/lattice");
        anchors_[0] = 0.0;
        ctl_.relTol = 0.0;
        ctl_.absTol = absTol / (latticeCells + 1);
    }

    double operator()(double x) {
        CCDS_REQUIRE(x >= 0.0 && x <= horizon_ * (1.0 + 1e-12),
                     "CumulativeIntegral: x out of range");
        x = std::min(x, horizon_);
        int k = std::min(cells_, static_cast<int>(std::floor(x / cell_)));
        const double anchorTime = k * cell_;
        const double base = anchorValue(k);
        if (x <= anchorTime)
            return base;
        return base + integrate(f_, anchorTime, x, ctl_, breakpoints_);
    }

private:
    double anchorValue(int k) {
        auto it = anchors_.find(k);
        if (it != anchors_.end())
            return it->second;
        // extend from the largest known anchor below k, one cell at a time
        auto below = std::prev(anchors_.upper_bound(k)); // anchors_ always holds 0
        int j = below->first;
        double value = below->second;
        while (j < k) {
            value += integrate(f_, j * cell_, (j + 1) * cell_, ctl_, breakpoints_);
            ++j;
            anchors_[j] = value;
        }
        return value;
    }

    F f_;
    double horizon_;
    std::vector<double> breakpoints_;
    int cells_;
    double cell_;
    QuadratureControl ctl_;
    std::map<int, double> anchors_;
};

} // namespace ccds

#endif
