#pragma once

#include <array>
#include <cstdint>

namespace nfd {

// One Philox4x32-10 block: 4 counter words + 2 key words -> 4 output words.
// Exposed so tests can check the published known-answer vectors directly.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key);

// Stream ids partition the generator's counter space by purpose. Two streams
// never overlap, so every consumer can be seeded from the one global seed and
// still draw independently, in any order, on any thread.
enum class StreamDomain : uint8_t {
    toy_prototypes = 1,
    toy_samples = 2,
    training = 3,
    contexts = 4,
    negative_rand = 5,
    chain = 6,
    eval_pairs = 7,
    net_init = 8,
};

// Packs (domain, a, b) into a 64-bit stream id; b must fit in 24 bits.
uint64_t make_stream(StreamDomain domain, uint32_t a = 0, uint32_t b = 0);

// Counter-based generator. The (seed, stream) pair fully determines the
// sequence; the block index occupies counter words 0..1 and the stream id
// words 2..3, so sequences from distinct streams are disjoint by construction.
class Rng {
public:
    Rng(uint64_t seed, uint64_t stream);

    uint32_t next_u32();
    uint64_t next_u64();

    // 53-bit uniform in [0, 1)
    double next_uniform();

    // standard normal via Box-Muller; second value of each pair is cached
    double next_gaussian();

    // uniform integer in [0, n), n >= 1, multiply-shift bounded
    uint64_t next_below(uint64_t n);

private:
    void refill();

    std::array<uint32_t, 2> key_;
    uint64_t stream_ = 0;
    uint64_t block_ = 0;
    std::array<uint32_t, 4> buf_{};
    int buf_pos_ = 4;
    double cached_gauss_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace nfd
