#include "emlab/rng.hpp"

#include <cmath>

#include "emlab/errors.hpp"

namespace emlab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, std::uint32_t k0,
                         std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t key,
                                        std::uint64_t counter_hi,
                                        std::uint64_t counter_lo) {
    std::array<std::uint32_t, 4> x = {
        static_cast<std::uint32_t>(counter_lo),
        static_cast<std::uint32_t>(counter_lo >> 32),
        static_cast<std::uint32_t>(counter_hi),
        static_cast<std::uint32_t>(counter_hi >> 32),
    };
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        philox_round(x, k0, k1);
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return x;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_(stream_id),
      key_(splitmix64(seed) ^ splitmix64(splitmix64(stream_id) + 1)) {}

void RngStream::refill() {
    buf_ = philox4x32(key_, stream_, block_++);
    avail_ = 4;
}

double RngStream::uniform() {
    if (avail_ == 0) refill();
    const std::uint32_t w = buf_[4 - avail_];
    --avail_;
    // (w + 0.5) / 2^32 lies strictly inside (0,1), so log() is always safe.
    return (static_cast<double>(w) + 0.5) * 0x1p-32;
}

double RngStream::normal() {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    have_cached_normal_ = true;
    return r * std::cos(theta);
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_index: n must be positive");
    // Multiply-shift on a fresh 64-bit draw; bias is negligible for the
    // ensemble sizes used here and the mapping stays deterministic.
    if (avail_ < 2) refill();
    const std::uint32_t a = buf_[4 - avail_];
    const std::uint32_t b = buf_[4 - avail_ + 1];
    avail_ -= 2;
    const std::uint64_t w = (static_cast<std::uint64_t>(a) << 32) | b;
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(w) * n) >> 64);
}

}  // namespace emlab
