#pragma once

#include <array>
#include <cstdint>

namespace emlab {

// Philox 4x32-10 counter-based generator.  Output is a pure function of
// (key, counter), so streams can be partitioned across replicas and threads
// without any shared state; results are bit-identical for any scheduling.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t key,
                                        std::uint64_t counter_hi,
                                        std::uint64_t counter_lo);

// One logical random stream.  A stream is addressed by (seed, stream_id);
// substreams for replicas, experiments or axes are derived by mixing the ids
// into the key.  Draws consume the 128-bit counter in blocks of four words.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    // Uniform on (0,1); never returns exactly 0 or 1.
    double uniform();
    // Standard normal via Box-Muller; values come in deterministic order.
    double normal();
    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

private:
    void refill();
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int avail_ = 0;
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

// Stable 64-bit mix used for key derivation and config hashing.
std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a over a byte string; used for content hashes in run records.
std::uint64_t fnv1a64(const void* data, std::size_t n);

}  // namespace emlab
