// SPDX-License-Identifier: Apache-2.0
#include "bsvrg/rng.hpp"

#include <cmath>

namespace bsvrg {
namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
    // Lemire rejection; unbiased.
    if (n == 0) return 0;
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        const std::uint64_t threshold = -n % n;
        while (lo < threshold) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

void RngStream::fill_normal(Vec& out) {
    for (auto& x : out) x = normal();
}

Vec RngStream::unit_sphere(std::size_t d) {
    Vec v(d);
    double n2 = 0.0;
    do {
        fill_normal(v);
        n2 = norm_sq(v);
    } while (n2 == 0.0);
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& x : v) x *= inv;
    return v;
}

std::uint64_t derive_seed(std::uint64_t root, StreamKind kind, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = root;
    std::uint64_t h = splitmix64(s);
    s ^= static_cast<std::uint64_t>(kind) * 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= (a + 1) * 0xbf58476d1ce4e5b9ULL;
    h ^= splitmix64(s);
    s ^= (b + 1) * 0x94d049bb133111ebULL;
    h ^= splitmix64(s);
    return h;
}

}  // namespace bsvrg
