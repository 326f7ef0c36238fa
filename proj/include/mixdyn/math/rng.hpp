#pragma once

#include <cstdint>
#include <utility>

#include "mixdyn/math/normal.hpp"

namespace mixdyn {

// Philox-2x64-10 counter-based generator. Each (key, counter) pair maps to
// 128 pseudo-random bits with no sequential state, so per-path substreams
// are deterministic no matter how work is scheduled.
struct Philox2x64 {
    static constexpr std::uint64_t kMultiplier = 0xD2B74407B1CE6E93ULL;
    static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;

    static std::pair<std::uint64_t, std::uint64_t> block(std::uint64_t key,
                                                         std::uint64_t c0,
                                                         std::uint64_t c1) {
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 product =
                static_cast<unsigned __int128>(kMultiplier) * c0;
            const std::uint64_t hi = static_cast<std::uint64_t>(product >> 64);
            const std::uint64_t lo = static_cast<std::uint64_t>(product);
            c0 = hi ^ key ^ c1;
            c1 = lo;
            key += kWeyl;
        }
        return {c0, c1};
    }
};

// Deterministic per-path random stream: stream (seed, path) yields the same
// draws regardless of evaluation order across paths.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path)
        : seed_(seed), path_(path) {}

    std::uint64_t next_u64() {
        if (!have_spare_) {
            auto [a, b] = Philox2x64::block(seed_, path_, counter_++);
            spare_ = b;
            have_spare_ = true;
            return a;
        }
        have_spare_ = false;
        return spare_;
    }

    // Uniform on the open interval (0,1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return inv_norm_cdf(uniform()); }

private:
    std::uint64_t seed_;
    std::uint64_t path_;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

// 64-bit mix for deriving independent sub-seeds (multi-start optimizers).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    auto [a, b] = Philox2x64::block(seed, salt, 0x6d697864796eULL);
    (void)b;
    return a;
}

}  // namespace mixdyn
