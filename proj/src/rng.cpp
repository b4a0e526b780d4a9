#include "nfd/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nfd {

namespace {

constexpr uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

inline std::array<uint32_t, 4> single_round(const std::array<uint32_t, 4>& c,
                                            const std::array<uint32_t, 2>& k) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM4x32A, c[0], hi0, lo0);
    mulhilo(kPhiloxM4x32B, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW32A;
            key[1] += kPhiloxW32B;
        }
        ctr = single_round(ctr, key);
    }
    return ctr;
}

uint64_t make_stream(StreamDomain domain, uint32_t a, uint32_t b) {
    if (b >= (1u << 24)) throw std::invalid_argument("stream sub-id exceeds 24 bits");
    return (static_cast<uint64_t>(domain) << 56) | (static_cast<uint64_t>(a) << 24) |
           static_cast<uint64_t>(b);
}

Rng::Rng(uint64_t seed, uint64_t stream)
    : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
      stream_(stream) {}

void Rng::refill() {
    std::array<uint32_t, 4> ctr = {
        static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32),
        static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)};
    buf_ = philox4x32(ctr, key_);
    ++block_;
    buf_pos_ = 0;
}

uint32_t Rng::next_u32() {
    if (buf_pos_ >= 4) refill();
    return buf_[buf_pos_++];
}

uint64_t Rng::next_u64() {
    uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double Rng::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_gauss_;
    }
    // u1 in (0, 1] keeps the log finite
    double u1 = 1.0 - next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * std::numbers::pi * u2;
    cached_gauss_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

uint64_t Rng::next_below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below requires n >= 1");
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

}  // namespace nfd
