#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "ccds/rng.hpp"

using namespace ccds;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Random123 distribution KAT vectors
    CHECK(Philox4x32::block({0u, 0u, 0u, 0u}, {0u, 0u}) ==
          std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu}) ==
          std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u}) ==
          std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("per-path streams are deterministic and distinct") {
    PathRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::vector<double> seqA, seqB, seqC, seqD;
    for (int k = 0; k < 64; ++k) {
        seqA.push_back(a.nextUniform());
        seqB.push_back(b.nextUniform());
        seqC.push_back(c.nextUniform());
        seqD.push_back(d.nextUniform());
    }
    CHECK(seqA == seqB);
    CHECK(seqA != seqC);
    CHECK(seqA != seqD);
}

TEST_CASE("uniforms live strictly inside (0,1)") {
    PathRng rng(1, 0);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double u = rng.nextUniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / n == doctest::Approx(0.5).epsilon(5e-3));
}

TEST_CASE("normal and exponential moments") {
    PathRng rng(5, 0);
    const int n = 200000;
    double sn = 0.0, sn2 = 0.0, se = 0.0, se2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double z = rng.nextNormal();
        sn += z;
        sn2 += z * z;
        const double e = rng.nextExponential();
        se += e;
        se2 += e * e;
    }
    CHECK(sn / n == doctest::Approx(0.0).epsilon(0.01));
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(se / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(se2 / n == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("gamma sampler matches mean/variance across the shape boost") {
    PathRng rng(9, 0);
    const int n = 200000;
    for (double shape : {0.4, 1.0, 3.0, 25.0}) {
        double s = 0.0, s2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double g = rng.nextGamma(shape);
            CHECK(g > 0.0);
            s += g;
            s2 += g * g;
        }
        const double mean = s / n;
        const double var = s2 / n - mean * mean;
        CHECK(mean == doctest::Approx(shape).epsilon(0.02));
        CHECK(var == doctest::Approx(shape).epsilon(0.06));
    }
    CHECK_THROWS_AS(rng.nextGamma(0.0), std::invalid_argument);
}
