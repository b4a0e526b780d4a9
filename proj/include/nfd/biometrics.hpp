#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nfd/parallel.hpp"

namespace nfd {

// Cosine similarities split by ground truth.
struct ScoreSet {
    std::vector<double> genuine;
    std::vector<double> impostor;
};

struct PairingSpec {
    enum class Mode { exhaustive, sampled } mode = Mode::exhaustive;
    int64_t budget = 10000;  // per-class cap in sampled mode
    uint64_t seed = 0;
};

using FeatureExtractor =
    std::function<std::vector<double>(std::span<const double>)>;

// Scores every comparison pair of a generated set laid out row-major by
// (identity, sample). Genuine pairs are within-identity sample pairs ordered
// by (id, i, j); impostor pairs cross identities, ordered by (id_a, id_b, i, j).
// Sampled mode draws without replacement, at most one pair per identity pair.
ScoreSet score_pairs(int identities, int per_identity, int dim,
                     std::span<const float> payload,
                     const FeatureExtractor& extractor, const PairingSpec& pairing,
                     ExecPolicy policy = ExecPolicy::serial);

// A metric value together with the decision threshold that produced it.
struct MetricPoint {
    double value = 0.0;
    double threshold = 0.0;
};

// Decision thresholds considered by every scan: midpoints of adjacent
// distinct pooled scores, plus -inf and +inf.
std::vector<double> threshold_candidates(const ScoreSet& scores);

double fmr_at(const ScoreSet& scores, double threshold);   // impostor >= t
double fnmr_at(const ScoreSet& scores, double threshold);  // genuine < t

// Equal-error operating point: the threshold minimizing |FMR - FNMR| (ties to
// the smaller threshold), reported as (FMR + FNMR) / 2 there. Capped at 0.5:
// worse-than-chance polarity reports as chance.
MetricPoint eer(const ScoreSet& scores);

// Smallest FNMR reachable while FMR stays at or below the ceiling.
MetricPoint fnmr_at_fmr(const ScoreSet& scores, double fmr_ceiling);

// Fisher discriminant ratio of the two score populations
// (population-variance convention).
double fdr(const ScoreSet& scores);

struct ScoreStats {
    double genuine_mean = 0.0;
    double genuine_std = 0.0;
    double impostor_mean = 0.0;
    double impostor_std = 0.0;
};

ScoreStats score_stats(const ScoreSet& scores);

struct Metrics {
    MetricPoint eer;
    MetricPoint fmr100;   // FNMR at FMR <= 1%
    MetricPoint fmr1000;  // FNMR at FMR <= 0.1%
    double fdr = 0.0;
    ScoreStats stats;
};

Metrics compute_metrics(const ScoreSet& scores);

struct LabeledScore {
    double score = 0.0;
    bool genuine = false;
};

// k-fold verification accuracy in percent: contiguous folds, threshold chosen
// to maximize accuracy on the other folds (midpoint candidates plus the two
// trivial thresholds, ties to the smaller), mean of held-out accuracies.
double fold_accuracy(std::span<const LabeledScore> pairs, int k);

struct BiasReport {
    std::vector<double> accuracies;
    double average = 0.0;
    double stddev = 0.0;  // sample standard deviation (n - 1)
    double ser = 0.0;     // (100 - min) / (100 - max)
};

BiasReport bias_metrics(std::span<const double> accuracies);

// Equal-width counts over [lo, hi]; bins are left-closed right-open except the
// last, which also takes hi. Out-of-range scores are dropped.
std::vector<int64_t> histogram(std::span<const double> scores, int bins, double lo,
                               double hi);

}  // namespace nfd
