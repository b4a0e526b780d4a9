#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nfd/parallel.hpp"

namespace nfd {

// Negative-selection strategy. `baseline` means no negative condition at all
// and is only a dataset label; select_negatives rejects it.
enum class Strategy : uint32_t {
    baseline = 0,
    close_neg = 1,
    rand_neg = 2,
    mid_neg = 3,
    far_neg = 4,
    null_neg = 5,
};

const char* strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);

struct IdentityContext {
    int id = 0;
    std::vector<double> vec;
};

// One negative per positive, aligned with the positives by index.
// negative_ids holds the chosen context id, or -1 for the null strategy.
struct NegativeAssignment {
    Strategy strategy = Strategy::null_neg;
    std::vector<int> positive_ids;
    std::vector<int> negative_ids;
    std::vector<std::vector<double>> negatives;
};

// Gaussian context vectors with ids 0..n-1, optionally unit-normalized.
std::vector<IdentityContext> draw_contexts(int n, int cond_dim, uint64_t seed,
                                           bool normalize);

// Euclidean distance between the directions of a and b; range [0, 2].
// Throws on zero vectors.
double context_distance(std::span<const double> a, std::span<const double> b);

// Assigns one negative context per positive. Distance ties are broken toward
// the smaller candidate id; the mid strategy takes the lower median of the
// ascending distance order. Only rand_neg consumes randomness (one draw per
// positive, in id order, so the result is independent of execution order).
NegativeAssignment select_negatives(const std::vector<IdentityContext>& contexts,
                                    Strategy strategy, uint64_t seed,
                                    ExecPolicy policy = ExecPolicy::serial);

// Line-delimited manifest: positive_id <TAB> strategy <TAB> negative_id_or_NULL.
std::string assignment_manifest(const NegativeAssignment& assignment);

}  // namespace nfd
