#include "nfd/contexts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nfd/errors.hpp"
#include "nfd/rng.hpp"
#include "nfd/toyworld.hpp"

namespace nfd {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::baseline: return "baseline";
        case Strategy::close_neg: return "close";
        case Strategy::rand_neg: return "rand";
        case Strategy::mid_neg: return "mid";
        case Strategy::far_neg: return "far";
        case Strategy::null_neg: return "null";
    }
    throw ConfigError("unknown strategy value");
}

Strategy parse_strategy(const std::string& name) {
    for (Strategy s : {Strategy::baseline, Strategy::close_neg, Strategy::rand_neg,
                       Strategy::mid_neg, Strategy::far_neg, Strategy::null_neg}) {
        if (name == strategy_name(s)) return s;
    }
    throw ConfigError("unknown strategy '" + name + "'");
}

std::vector<IdentityContext> draw_contexts(int n, int cond_dim, uint64_t seed,
                                           bool normalize) {
    if (n < 1) throw InputError("need at least one context");
    if (cond_dim < 1) throw InputError("context dimension must be >= 1");

    Rng rng(seed, make_stream(StreamDomain::contexts));
    std::vector<IdentityContext> out(n);
    for (int i = 0; i < n; ++i) {
        out[i].id = i;
        out[i].vec.resize(cond_dim);
        for (double& v : out[i].vec) v = rng.next_gaussian();
        if (normalize) out[i].vec = extract_feature(out[i].vec);
    }
    return out;
}

double context_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("context dimensions differ");
    std::vector<double> na = extract_feature(a);
    std::vector<double> nb = extract_feature(b);
    double acc = 0.0;
    for (std::size_t i = 0; i < na.size(); ++i) {
        double d = na[i] - nb[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

NegativeAssignment select_negatives(const std::vector<IdentityContext>& contexts,
                                    Strategy strategy, uint64_t seed,
                                    ExecPolicy policy) {
    if (strategy == Strategy::baseline) {
        throw InputError("baseline carries no negative assignment");
    }
    const int n = static_cast<int>(contexts.size());
    if (n < 1) throw InputError("need at least one context");

    NegativeAssignment out;
    out.strategy = strategy;
    out.positive_ids.resize(n);
    out.negative_ids.resize(n);
    out.negatives.resize(n);
    for (int i = 0; i < n; ++i) out.positive_ids[i] = contexts[i].id;

    if (strategy == Strategy::null_neg) {
        for (int i = 0; i < n; ++i) {
            out.negative_ids[i] = -1;
            out.negatives[i].assign(contexts[i].vec.size(), 0.0);
        }
        return out;
    }

    if (n < 2) {
        throw InputError("strategy '" + std::string(strategy_name(strategy)) +
                         "' needs at least 2 contexts");
    }

    // candidate order: ascending id, so distance ties resolve the same way
    // no matter how the caller ordered the vector
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return contexts[a].id < contexts[b].id;
    });
    for (int i = 1; i < n; ++i) {
        if (contexts[order[i]].id == contexts[order[i - 1]].id) {
            throw InputError("duplicate context ids");
        }
    }

    std::vector<std::vector<double>> normed(n);
    for (int i = 0; i < n; ++i) normed[i] = extract_feature(contexts[i].vec);

    // rand draws happen up front in id order; the per-positive loops below
    // are then pure and can run in any order
    std::vector<uint64_t> rand_pick;
    if (strategy == Strategy::rand_neg) {
        Rng rng(seed, make_stream(StreamDomain::negative_rand));
        rand_pick.resize(n);
        for (int oi = 0; oi < n; ++oi) {
            rand_pick[oi] = rng.next_below(static_cast<uint64_t>(n) - 1);
        }
    }

    auto assign_one = [&](int oi) {
        const int i = order[oi];
        std::vector<std::pair<double, int>> dist;  // (distance, candidate id)
        dist.reserve(n - 1);
        for (int oj = 0; oj < n; ++oj) {
            if (oj == oi) continue;
            const int j = order[oj];
            double acc = 0.0;
            for (std::size_t c = 0; c < normed[i].size(); ++c) {
                double d = normed[i][c] - normed[j][c];
                acc += d * d;
            }
            dist.emplace_back(std::sqrt(acc), contexts[j].id);
        }

        int chosen_id = -1;
        switch (strategy) {
            case Strategy::close_neg:
                chosen_id = std::min_element(dist.begin(), dist.end())->second;
                break;
            case Strategy::far_neg: {
                // ties go to the smaller id, so compare (distance, -id)
                auto best = dist.begin();
                for (auto it = dist.begin() + 1; it != dist.end(); ++it) {
                    if (it->first > best->first) best = it;
                }
                chosen_id = best->second;
                break;
            }
            case Strategy::mid_neg: {
                std::sort(dist.begin(), dist.end());
                chosen_id = dist[static_cast<std::size_t>(n - 2) / 2].second;
                break;
            }
            case Strategy::rand_neg: {
                // candidates in ascending id order, skipping the positive
                uint64_t pick = rand_pick[oi];
                int seen = 0;
                for (int oj = 0; oj < n; ++oj) {
                    if (oj == oi) continue;
                    if (static_cast<uint64_t>(seen) == pick) {
                        chosen_id = contexts[order[oj]].id;
                        break;
                    }
                    ++seen;
                }
                break;
            }
            default:
                break;
        }

        int chosen_index = -1;
        for (int oj = 0; oj < n; ++oj) {
            if (contexts[order[oj]].id == chosen_id) {
                chosen_index = order[oj];
                break;
            }
        }
        out.negative_ids[i] = chosen_id;
        out.negatives[i] = contexts[chosen_index].vec;
    };

    if (policy == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (int oi = 0; oi < n; ++oi) assign_one(oi);
#else
        for (int oi = 0; oi < n; ++oi) assign_one(oi);
#endif
    } else {
        for (int oi = 0; oi < n; ++oi) assign_one(oi);
    }
    return out;
}

std::string assignment_manifest(const NegativeAssignment& assignment) {
    std::string out;
    const char* name = strategy_name(assignment.strategy);
    for (std::size_t i = 0; i < assignment.negative_ids.size(); ++i) {
        char line[64];
        if (assignment.negative_ids[i] < 0) {
            std::snprintf(line, sizeof line, "%d\t%s\tNULL\n",
                          assignment.positive_ids[i], name);
        } else {
            std::snprintf(line, sizeof line, "%d\t%s\t%d\n",
                          assignment.positive_ids[i], name,
                          assignment.negative_ids[i]);
        }
        out += line;
    }
    return out;
}

}  // namespace nfd
