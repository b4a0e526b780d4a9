#include "nfd/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <utility>

#include "nfd/errors.hpp"
#include "nfd/sampler.hpp"

namespace nfd {

namespace {

// Chunk width of the fixed-order gradient reduction. Samples are summed
// serially inside each chunk and chunks are combined in index order, so the
// result does not depend on how many threads ran the chunks.
constexpr int kGradChunk = 16;

}  // namespace

TrainingSet training_set_from_toy(const ToyDataset& toy) {
    TrainingSet set;
    set.dim = toy.dim;
    set.cond_dim = toy.dim;
    set.count = static_cast<int64_t>(toy.identities) * toy.per_identity;
    set.x0 = toy.samples;
    set.cond.resize(set.x0.size());
    for (int64_t s = 0; s < set.count; ++s) {
        std::span<const double> row(set.x0.data() + s * set.dim,
                                    static_cast<std::size_t>(set.dim));
        std::vector<double> dir = extract_feature(row);
        std::copy(dir.begin(), dir.end(), set.cond.begin() + s * set.dim);
    }
    return set;
}

std::vector<uint8_t> dropout_mask(int n, Rng& rng, double p) {
    std::vector<uint8_t> drop(n);
    for (int i = 0; i < n; ++i) drop[i] = rng.next_uniform() < p ? 1 : 0;
    return drop;
}

std::vector<double> apply_condition_dropout(std::span<const double> cond, Rng& rng,
                                            double p) {
    bool whole = rng.next_uniform() < 0.5 * p;
    std::vector<uint8_t> drop = dropout_mask(static_cast<int>(cond.size()), rng, p);
    std::vector<double> out(cond.size());
    for (std::size_t i = 0; i < cond.size(); ++i) {
        out[i] = (whole || drop[i]) ? 0.0 : cond[i];
    }
    return out;
}

double train_step(Denoiser& net, const Schedule& schedule,
                  std::span<const double> x0, std::span<const double> cond,
                  int batch, double learning_rate, double dropout_prob, Rng& rng,
                  ExecPolicy policy) {
    const int d = net.config.data_dim;
    const int cd = net.config.cond_dim;
    if (batch < 1) throw InputError("batch must hold at least one sample");
    if (x0.size() != static_cast<std::size_t>(batch) * d) {
        throw ShapeError("x0 batch has wrong size");
    }
    if (cond.size() != static_cast<std::size_t>(batch) * cd) {
        throw ShapeError("condition batch has wrong size");
    }

    // per-sample randomness, drawn serially in sample order
    std::vector<int> ts(batch);
    std::vector<double> eps(static_cast<std::size_t>(batch) * d);
    std::vector<double> cond_used(static_cast<std::size_t>(batch) * cd);
    for (int s = 0; s < batch; ++s) {
        ts[s] = 1 + static_cast<int>(rng.next_below(schedule.T));
        for (int c = 0; c < d; ++c) {
            eps[static_cast<std::size_t>(s) * d + c] = rng.next_gaussian();
        }
        std::span<const double> crow(cond.data() + static_cast<std::size_t>(s) * cd,
                                     static_cast<std::size_t>(cd));
        std::vector<double> used = apply_condition_dropout(crow, rng, dropout_prob);
        std::copy(used.begin(), used.end(),
                  cond_used.begin() + static_cast<std::size_t>(s) * cd);
    }

    const int chunks = (batch + kGradChunk - 1) / kGradChunk;
    std::vector<Gradients> partial;
    partial.reserve(chunks);
    for (int c = 0; c < chunks; ++c) partial.push_back(Gradients::zeros_like(net));
    std::vector<double> partial_loss(chunks, 0.0);

    auto run_chunk = [&](int c) {
        ForwardCache cache;
        std::vector<double> out_grad(d);
        const int begin = c * kGradChunk;
        const int end = std::min(batch, begin + kGradChunk);
        for (int s = begin; s < end; ++s) {
            std::span<const double> x0_row(
                x0.data() + static_cast<std::size_t>(s) * d,
                static_cast<std::size_t>(d));
            std::span<const double> eps_row(
                eps.data() + static_cast<std::size_t>(s) * d,
                static_cast<std::size_t>(d));
            std::span<const double> cond_row(
                cond_used.data() + static_cast<std::size_t>(s) * cd,
                static_cast<std::size_t>(cd));
            std::vector<double> x_t = forward_diffuse(x0_row, ts[s], eps_row, schedule);
            std::vector<double> pred = forward_cached(net, x_t, ts[s], cond_row, cache);
            double sample_loss = 0.0;
            for (int i = 0; i < d; ++i) {
                double r = pred[i] - eps_row[i];
                sample_loss += r * r;
                out_grad[i] = 2.0 * r / batch;
            }
            partial_loss[c] += sample_loss;
            accumulate_backward(net, cache, out_grad, partial[c]);
        }
    };

    if (policy == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (int c = 0; c < chunks; ++c) run_chunk(c);
#else
        for (int c = 0; c < chunks; ++c) run_chunk(c);
#endif
    } else {
        for (int c = 0; c < chunks; ++c) run_chunk(c);
    }

    Gradients total = std::move(partial[0]);
    double loss = partial_loss[0];
    for (int c = 1; c < chunks; ++c) {
        total.add(partial[c]);
        loss += partial_loss[c];
    }
    loss /= batch;
    if (!std::isfinite(loss)) {
        throw TrainingDivergenceError("training loss is not finite");
    }

    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        Dense& layer = net.layers[li];
        const Dense& g = total.layers[li];
        for (std::size_t i = 0; i < layer.w.size(); ++i) {
            layer.w[i] -= learning_rate * g.w[i];
        }
        for (std::size_t i = 0; i < layer.b.size(); ++i) {
            layer.b[i] -= learning_rate * g.b[i];
        }
    }
    return loss;
}

TrainResult train(const TrainingSet& data, const DenoiserConfig& net_config,
                  const TrainConfig& train_config, const Schedule& schedule,
                  ExecPolicy policy) {
    if (data.count < 1) throw InputError("training set is empty");
    if (data.dim != net_config.data_dim || data.cond_dim != net_config.cond_dim) {
        throw ShapeError("training set does not match the network dimensions");
    }
    if (train_config.epochs < 0) throw ConfigError("epochs must be >= 0");
    if (train_config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (train_config.dropout_prob < 0.0 || train_config.dropout_prob > 1.0) {
        throw ConfigError("dropout_prob must lie in [0, 1]");
    }

    auto t0 = std::chrono::steady_clock::now();
    TrainResult result;
    result.net = Denoiser::init(net_config, train_config.seed);
    result.report.config = train_config;

    Rng rng(train_config.seed, make_stream(StreamDomain::training));
    const int64_t n = data.count;
    const int d = data.dim;
    const int cd = data.cond_dim;
    std::vector<int64_t> order(n);
    std::vector<double> batch_x0;
    std::vector<double> batch_cond;

    for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
        for (int64_t i = 0; i < n; ++i) order[i] = i;
        for (int64_t i = n - 1; i >= 1; --i) {
            int64_t j = static_cast<int64_t>(rng.next_below(i + 1));
            std::swap(order[i], order[j]);
        }

        double epoch_loss = 0.0;
        for (int64_t start = 0; start < n; start += train_config.batch_size) {
            const int b = static_cast<int>(
                std::min<int64_t>(train_config.batch_size, n - start));
            batch_x0.resize(static_cast<std::size_t>(b) * d);
            batch_cond.resize(static_cast<std::size_t>(b) * cd);
            for (int s = 0; s < b; ++s) {
                int64_t src = order[start + s];
                std::copy_n(data.x0.data() + src * d, d,
                            batch_x0.data() + static_cast<std::size_t>(s) * d);
                std::copy_n(data.cond.data() + src * cd, cd,
                            batch_cond.data() + static_cast<std::size_t>(s) * cd);
            }
            double loss = train_step(result.net, schedule, batch_x0, batch_cond, b,
                                     train_config.learning_rate,
                                     train_config.dropout_prob, rng, policy);
            epoch_loss += loss * b;
        }
        result.report.epoch_mean_loss.push_back(epoch_loss / static_cast<double>(n));
    }

    if (!result.report.epoch_mean_loss.empty()) {
        result.report.final_epoch_loss = result.report.epoch_mean_loss.back();
    }
    auto t1 = std::chrono::steady_clock::now();
    result.report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    return result;
}

}  // namespace nfd
