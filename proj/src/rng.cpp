#include "ccds/rng.hpp"

#include <cmath>
#include <numbers>

#include "ccds/errors.hpp"

namespace ccds {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * x[2];
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0), hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1), hi1 = static_cast<std::uint32_t>(p1 >> 32);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

} // namespace

std::array<std::uint32_t, 4> Philox4x32::block(const std::array<std::uint32_t, 4>& counter,
                                               const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> x = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int r = 0;;) {
        round(x, k);
        if (++r == 10)
            break;
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return x;
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t pathIndex)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      path_(pathIndex) {}

void PathRng::refill() {
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32),
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32)};
    buffer_ = Philox4x32::block(counter, key_);
    ++block_;
    pos_ = 0;
}

std::uint32_t PathRng::nextU32() {
    if (pos_ == 4)
        refill();
    return buffer_[static_cast<std::size_t>(pos_++)];
}

double PathRng::nextUniform() {
    const std::uint64_t hi = nextU32(), lo = nextU32();
    const std::uint64_t bits = ((hi << 32) | lo) >> 11; // 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double PathRng::nextNormal() {
    const double u1 = nextUniform();
    const double u2 = nextUniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double PathRng::nextExponential() { return -std::log(nextUniform()); }

double PathRng::nextGamma(double shape) {
    CCDS_REQUIRE(shape > 0.0, "gamma shape must be positive, got " << shape);
    if (shape < 1.0) {
        // G(a) = G(a+1) * U^(1/a)
        const double boosted = nextGamma(shape + 1.0);
        return boosted * std::exp(std::log(nextUniform()) / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        double x, cube;
        do {
            x = nextNormal();
            cube = 1.0 + c * x;
        } while (cube <= 0.0);
        const double v = cube * cube * cube;
        const double u = nextUniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
            return d * v;
    }
}

} // namespace ccds
