#ifndef ccds_rng_hpp
#define ccds_rng_hpp

#include <array>
#include <cstdint>

namespace ccds {

/*! Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
    Stateless block function: any (counter, key) pair maps to four words, so
    per-path streams are just distinct counter prefixes under one key. */
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                              const std::array<std::uint32_t, 2>& key);
};

/*! Independent random stream for one simulation path: key carries the seed,
    the counter prefix carries the path index, so streams never overlap and
    results do not depend on how paths are assigned to workers. */
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t pathIndex);

    std::uint32_t nextU32();
    //! uniform on the open interval (0,1), 53-bit resolution
    double nextUniform();
    double nextNormal();      // Box-Muller
    double nextExponential(); // unit rate
    //! Gamma(shape, scale 1) via Marsaglia-Tsang; shape < 1 boosted by one
    double nextGamma(double shape);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t path_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int pos_ = 4;
};

} // namespace ccds

#endif
