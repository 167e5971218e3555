#include <doctest.h>

#include <cmath>
#include <cstring>
#include <set>
#include <vector>

#include "emlab/rng.hpp"

using namespace emlab;

TEST_CASE("philox output is a pure function of key and counter") {
    const auto a = philox4x32(42, 7, 1000);
    const auto b = philox4x32(42, 7, 1000);
    CHECK(a == b);
    CHECK(philox4x32(42, 7, 1001) != a);
    CHECK(philox4x32(42, 8, 1000) != a);
    CHECK(philox4x32(43, 7, 1000) != a);
}

TEST_CASE("philox words spread over the full 32-bit range") {
    std::set<std::uint32_t> seen;
    for (std::uint64_t c = 0; c < 64; ++c) {
        const auto w = philox4x32(1, 0, c);
        seen.insert(w.begin(), w.end());
    }
    CHECK(seen.size() == 256);
}

TEST_CASE("stream draws are deterministic and stream-separated") {
    RngStream a(123, 5);
    RngStream b(123, 5);
    RngStream c(123, 6);
    bool all_equal = true;
    bool any_cross_equal = false;
    for (int i = 0; i < 100; ++i) {
        const double ua = a.uniform();
        const double ub = b.uniform();
        const double uc = c.uniform();
        all_equal = all_equal && ua == ub;
        any_cross_equal = any_cross_equal || ua == uc;
        CHECK(ua > 0.0);
        CHECK(ua < 1.0);
    }
    CHECK(all_equal);
    CHECK_FALSE(any_cross_equal);
}

TEST_CASE("normal draws have standard moments") {
    RngStream s(2024, 0);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("uniform_index stays in range and hits every bucket") {
    RngStream s(7, 3);
    std::vector<int> hits(10, 0);
    for (int i = 0; i < 5000; ++i) {
        const auto k = s.uniform_index(10);
        REQUIRE(k < 10);
        ++hits[static_cast<int>(k)];
    }
    for (int h : hits) CHECK(h > 300);
}

TEST_CASE("splitmix64 matches the reference sequence") {
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
    std::set<std::uint64_t> out;
    for (std::uint64_t i = 0; i < 100; ++i) out.insert(splitmix64(i));
    CHECK(out.size() == 100);
}

TEST_CASE("fnv1a64 matches the published constants") {
    CHECK(fnv1a64("", 0) == 0xCBF29CE484222325ull);
    const char* a = "a";
    CHECK(fnv1a64(a, 1) == 0xAF63DC4C8601EC8Cull);
    const char* foobar = "foobar";
    CHECK(fnv1a64(foobar, std::strlen(foobar)) == 0x85944171F73967E8ull);
}
