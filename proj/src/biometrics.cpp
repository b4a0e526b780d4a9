#include "nfd/biometrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nfd/errors.hpp"
#include "nfd/rng.hpp"

namespace nfd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PairRef {
    int id_a = 0, i = 0, id_b = 0, j = 0;
};

double clamped_cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) dot += a[c] * b[c];
    return std::clamp(dot, -1.0, 1.0);
}

// Picks m distinct values from [0, space) without replacement, in draw order.
std::vector<int64_t> sample_without_replacement(int64_t space, int64_t m, Rng& rng) {
    std::vector<int64_t> all(space);
    for (int64_t i = 0; i < space; ++i) all[i] = i;
    for (int64_t i = 0; i < m; ++i) {
        int64_t j = i + static_cast<int64_t>(rng.next_below(space - i));
        std::swap(all[i], all[j]);
    }
    all.resize(m);
    return all;
}

void check_nonempty(const ScoreSet& scores) {
    if (scores.genuine.empty() || scores.impostor.empty()) {
        throw InputError("both genuine and impostor score lists must be non-empty");
    }
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double population_var(const std::vector<double>& v, double mean) {
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size());
}

}  // namespace

ScoreSet score_pairs(int identities, int per_identity, int dim,
                     std::span<const float> payload,
                     const FeatureExtractor& extractor, const PairingSpec& pairing,
                     ExecPolicy policy) {
    const int64_t n = identities, k = per_identity;
    if (n < 2) throw InputError("impostor pairs need at least two identities");
    if (k < 1) throw InputError("need at least one sample per identity");
    if (dim < 1) throw InputError("sample dimension must be >= 1");
    if (payload.size() != static_cast<std::size_t>(n * k * dim)) {
        throw ShapeError("payload size does not match the declared layout");
    }
    if (pairing.mode == PairingSpec::Mode::sampled && pairing.budget < 1) {
        throw InputError("sampled pairing needs a positive budget");
    }

    // extract every row once
    std::vector<double> feats(static_cast<std::size_t>(n * k) * dim);
    std::vector<double> row(dim);
    for (int64_t r = 0; r < n * k; ++r) {
        for (int c = 0; c < dim; ++c) {
            row[c] = static_cast<double>(payload[static_cast<std::size_t>(r) * dim + c]);
        }
        std::vector<double> f = extractor(row);
        if (static_cast<int>(f.size()) != dim) {
            throw ShapeError("extractor changed the feature width");
        }
        std::copy(f.begin(), f.end(), feats.begin() + static_cast<std::size_t>(r) * dim);
    }
    auto feat = [&](int id, int s) {
        return std::span<const double>(
            feats.data() + (static_cast<std::size_t>(id) * k + s) * dim,
            static_cast<std::size_t>(dim));
    };

    std::vector<PairRef> genuine_pairs;
    std::vector<PairRef> impostor_pairs;
    const int64_t genuine_space = n * (k * (k - 1) / 2);
    const int64_t id_pair_space = n * (n - 1) / 2;

    if (pairing.mode == PairingSpec::Mode::exhaustive ||
        genuine_space <= pairing.budget) {
        genuine_pairs.reserve(genuine_space);
        for (int id = 0; id < n; ++id) {
            for (int i = 0; i < k; ++i) {
                for (int j = i + 1; j < k; ++j) {
                    genuine_pairs.push_back({id, i, id, j});
                }
            }
        }
    } else {
        Rng rng(pairing.seed, make_stream(StreamDomain::eval_pairs, 0));
        std::vector<int64_t> picks =
            sample_without_replacement(genuine_space, pairing.budget, rng);
        const int64_t per_id = k * (k - 1) / 2;
        for (int64_t pick : picks) {
            int id = static_cast<int>(pick / per_id);
            int64_t rank = pick % per_id;
            // decode the rank-th (i, j) pair with i < j
            int i = 0;
            int64_t left = rank;
            while (left >= k - 1 - i) {
                left -= k - 1 - i;
                ++i;
            }
            int j = i + 1 + static_cast<int>(left);
            genuine_pairs.push_back({id, i, id, j});
        }
    }

    if (pairing.mode == PairingSpec::Mode::exhaustive) {
        impostor_pairs.reserve(id_pair_space * k * k);
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                for (int i = 0; i < k; ++i) {
                    for (int j = 0; j < k; ++j) {
                        impostor_pairs.push_back({a, i, b, j});
                    }
                }
            }
        }
    } else {
        Rng rng(pairing.seed, make_stream(StreamDomain::eval_pairs, 1));
        int64_t m = std::min(pairing.budget, id_pair_space);
        std::vector<int64_t> picks = sample_without_replacement(id_pair_space, m, rng);
        for (int64_t pick : picks) {
            // decode the rank-th (a, b) pair with a < b
            int a = 0;
            int64_t left = pick;
            while (left >= n - 1 - a) {
                left -= n - 1 - a;
                ++a;
            }
            int b = a + 1 + static_cast<int>(left);
            int i = static_cast<int>(rng.next_below(k));
            int j = static_cast<int>(rng.next_below(k));
            impostor_pairs.push_back({a, i, b, j});
        }
    }

    ScoreSet out;
    out.genuine.resize(genuine_pairs.size());
    out.impostor.resize(impostor_pairs.size());

    auto score_list = [&](const std::vector<PairRef>& pairs,
                          std::vector<double>& dst) {
        const int64_t count = static_cast<int64_t>(pairs.size());
        if (policy == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
            for (int64_t p = 0; p < count; ++p) {
                const PairRef& pr = pairs[p];
                dst[p] = clamped_cosine(feat(pr.id_a, pr.i), feat(pr.id_b, pr.j));
            }
#else
            for (int64_t p = 0; p < count; ++p) {
                const PairRef& pr = pairs[p];
                dst[p] = clamped_cosine(feat(pr.id_a, pr.i), feat(pr.id_b, pr.j));
            }
#endif
        } else {
            for (int64_t p = 0; p < count; ++p) {
                const PairRef& pr = pairs[p];
                dst[p] = clamped_cosine(feat(pr.id_a, pr.i), feat(pr.id_b, pr.j));
            }
        }
    };
    score_list(genuine_pairs, out.genuine);
    score_list(impostor_pairs, out.impostor);
    return out;
}

std::vector<double> threshold_candidates(const ScoreSet& scores) {
    std::vector<double> pooled;
    pooled.reserve(scores.genuine.size() + scores.impostor.size());
    pooled.insert(pooled.end(), scores.genuine.begin(), scores.genuine.end());
    pooled.insert(pooled.end(), scores.impostor.begin(), scores.impostor.end());
    std::sort(pooled.begin(), pooled.end());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    std::vector<double> cands;
    cands.reserve(pooled.size() + 1);
    cands.push_back(-kInf);
    for (std::size_t i = 0; i + 1 < pooled.size(); ++i) {
        cands.push_back((pooled[i] + pooled[i + 1]) / 2.0);
    }
    cands.push_back(kInf);
    return cands;
}

double fmr_at(const ScoreSet& scores, double threshold) {
    const std::vector<double>& imp = scores.impostor;
    int64_t count = 0;
    for (double s : imp) {
        if (s >= threshold) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(imp.size());
}

double fnmr_at(const ScoreSet& scores, double threshold) {
    const std::vector<double>& gen = scores.genuine;
    int64_t count = 0;
    for (double s : gen) {
        if (s < threshold) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(gen.size());
}

MetricPoint eer(const ScoreSet& scores) {
    check_nonempty(scores);

    std::vector<double> gen(scores.genuine);
    std::vector<double> imp(scores.impostor);
    std::sort(gen.begin(), gen.end());
    std::sort(imp.begin(), imp.end());

    double best_gap = kInf;
    double best_fmr = 0.0, best_fnmr = 0.0, best_t = -kInf;
    for (double t : threshold_candidates(scores)) {
        auto imp_lo = std::lower_bound(imp.begin(), imp.end(), t);
        double fmr = static_cast<double>(imp.end() - imp_lo) /
                     static_cast<double>(imp.size());
        auto gen_lo = std::lower_bound(gen.begin(), gen.end(), t);
        double fnmr = static_cast<double>(gen_lo - gen.begin()) /
                      static_cast<double>(gen.size());
        double gap = std::fabs(fmr - fnmr);
        if (gap < best_gap) {
            best_gap = gap;
            best_fmr = fmr;
            best_fnmr = fnmr;
            best_t = t;
        }
    }

    MetricPoint out;
    out.threshold = best_t;
    out.value = (best_fmr + best_fnmr) / 2.0;
    // inverted score polarity would report above one half; chance is the floor
    if (out.value > 0.5) out.value = 0.5;
    return out;
}

MetricPoint fnmr_at_fmr(const ScoreSet& scores, double fmr_ceiling) {
    check_nonempty(scores);
    if (!(fmr_ceiling > 0.0) || fmr_ceiling > 1.0) {
        throw InputError("FMR ceiling must lie in (0, 1]");
    }

    std::vector<double> gen(scores.genuine);
    std::vector<double> imp(scores.impostor);
    std::sort(gen.begin(), gen.end());
    std::sort(imp.begin(), imp.end());

    // FMR falls and FNMR rises with the threshold, so the first candidate
    // under the ceiling carries the smallest reachable FNMR
    for (double t : threshold_candidates(scores)) {
        auto imp_lo = std::lower_bound(imp.begin(), imp.end(), t);
        double fmr = static_cast<double>(imp.end() - imp_lo) /
                     static_cast<double>(imp.size());
        if (fmr <= fmr_ceiling) {
            auto gen_lo = std::lower_bound(gen.begin(), gen.end(), t);
            MetricPoint out;
            out.value = static_cast<double>(gen_lo - gen.begin()) /
                        static_cast<double>(gen.size());
            out.threshold = t;
            return out;
        }
    }
    throw InputError("no threshold satisfies the FMR ceiling");  // unreachable
}

double fdr(const ScoreSet& scores) {
    check_nonempty(scores);
    double gm = mean_of(scores.genuine);
    double im = mean_of(scores.impostor);
    double gv = population_var(scores.genuine, gm);
    double iv = population_var(scores.impostor, im);
    if (gv + iv == 0.0) {
        throw InputError("score distributions are degenerate: zero combined variance");
    }
    return (gm - im) * (gm - im) / (gv + iv);
}

ScoreStats score_stats(const ScoreSet& scores) {
    check_nonempty(scores);
    ScoreStats st;
    st.genuine_mean = mean_of(scores.genuine);
    st.impostor_mean = mean_of(scores.impostor);
    st.genuine_std = std::sqrt(population_var(scores.genuine, st.genuine_mean));
    st.impostor_std = std::sqrt(population_var(scores.impostor, st.impostor_mean));
    return st;
}

Metrics compute_metrics(const ScoreSet& scores) {
    Metrics m;
    m.eer = eer(scores);
    m.fmr100 = fnmr_at_fmr(scores, 0.01);
    m.fmr1000 = fnmr_at_fmr(scores, 0.001);
    m.fdr = fdr(scores);
    m.stats = score_stats(scores);
    return m;
}

double fold_accuracy(std::span<const LabeledScore> pairs, int k) {
    const int64_t n = static_cast<int64_t>(pairs.size());
    if (k < 2 || static_cast<int64_t>(k) > n) {
        throw InputError("fold count must satisfy 2 <= k <= pair count");
    }

    double acc_sum = 0.0;
    for (int fold = 0; fold < k; ++fold) {
        const int64_t lo = fold * n / k;
        const int64_t hi = (fold + 1) * n / k;

        std::vector<double> train_gen, train_imp;
        for (int64_t i = 0; i < n; ++i) {
            if (i >= lo && i < hi) continue;
            (pairs[i].genuine ? train_gen : train_imp).push_back(pairs[i].score);
        }
        std::sort(train_gen.begin(), train_gen.end());
        std::sort(train_imp.begin(), train_imp.end());
        const int64_t train_n = static_cast<int64_t>(train_gen.size() + train_imp.size());

        std::vector<double> pooled;
        pooled.reserve(train_n);
        pooled.insert(pooled.end(), train_gen.begin(), train_gen.end());
        pooled.insert(pooled.end(), train_imp.begin(), train_imp.end());
        std::sort(pooled.begin(), pooled.end());
        pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());
        std::vector<double> cands;
        cands.push_back(-kInf);
        for (std::size_t i = 0; i + 1 < pooled.size(); ++i) {
            cands.push_back((pooled[i] + pooled[i + 1]) / 2.0);
        }
        cands.push_back(kInf);

        // decision rule: score >= threshold counts as genuine
        double best_acc = -1.0, best_t = -kInf;
        for (double t : cands) {
            int64_t correct_gen =
                train_gen.end() - std::lower_bound(train_gen.begin(), train_gen.end(), t);
            int64_t correct_imp =
                std::lower_bound(train_imp.begin(), train_imp.end(), t) -
                train_imp.begin();
            double acc = (train_n > 0)
                             ? static_cast<double>(correct_gen + correct_imp) /
                                   static_cast<double>(train_n)
                             : 0.0;
            if (acc > best_acc) {
                best_acc = acc;
                best_t = t;
            }
        }

        int64_t correct = 0;
        for (int64_t i = lo; i < hi; ++i) {
            bool predicted = pairs[i].score >= best_t;
            if (predicted == pairs[i].genuine) ++correct;
        }
        acc_sum += (hi > lo) ? static_cast<double>(correct) /
                                   static_cast<double>(hi - lo)
                             : 1.0;
    }
    return 100.0 * acc_sum / static_cast<double>(k);
}

BiasReport bias_metrics(std::span<const double> accuracies) {
    if (accuracies.size() < 2) {
        throw InputError("bias metrics need at least two group accuracies");
    }
    for (double a : accuracies) {
        if (a < 0.0 || a > 100.0) {
            throw InputError("accuracies must lie in [0, 100]");
        }
    }

    BiasReport r;
    r.accuracies.assign(accuracies.begin(), accuracies.end());
    const double n = static_cast<double>(accuracies.size());
    double sum = 0.0;
    for (double a : accuracies) sum += a;
    r.average = sum / n;

    double sq = 0.0;
    for (double a : accuracies) sq += (a - r.average) * (a - r.average);
    r.stddev = std::sqrt(sq / (n - 1.0));

    double lo = *std::min_element(accuracies.begin(), accuracies.end());
    double hi = *std::max_element(accuracies.begin(), accuracies.end());
    if (hi == 100.0) {
        throw InputError("SER is undefined when the best group accuracy is 100");
    }
    r.ser = (100.0 - lo) / (100.0 - hi);
    return r;
}

std::vector<int64_t> histogram(std::span<const double> scores, int bins, double lo,
                               double hi) {
    if (bins < 1) throw InputError("histogram needs at least one bin");
    if (!(lo < hi)) throw InputError("histogram range must satisfy lo < hi");

    std::vector<int64_t> counts(bins, 0);
    const double width = hi - lo;
    for (double s : scores) {
        if (s < lo || s > hi) continue;
        int idx = (s == hi) ? bins - 1
                            : static_cast<int>(std::floor((s - lo) / width * bins));
        if (idx >= bins) idx = bins - 1;  // guard the floating edge at hi
        counts[idx] += 1;
    }
    return counts;
}

}  // namespace nfd
