#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nfd/denoiser.hpp"
#include "nfd/parallel.hpp"
#include "nfd/rng.hpp"
#include "nfd/schedule.hpp"
#include "nfd/toyworld.hpp"

namespace nfd {

struct TrainConfig {
    int epochs = 50;
    int batch_size = 128;
    double learning_rate = 1e-3;
    double dropout_prob = 0.25;
    uint64_t seed = 0;
};

struct TrainReport {
    std::vector<double> epoch_mean_loss;
    double final_epoch_loss = 0.0;
    double wall_seconds = 0.0;
    TrainConfig config;
};

// Flat training pairs: row s of x0 is the clean vector, row s of cond its
// identity condition.
struct TrainingSet {
    int dim = 0;
    int cond_dim = 0;
    int64_t count = 0;
    std::vector<double> x0;
    std::vector<double> cond;
};

struct TrainResult {
    Denoiser net;
    TrainReport report;
};

// cond rows are the extracted directions of the clean samples.
TrainingSet training_set_from_toy(const ToyDataset& toy);

// Element-wise keep/drop decisions, one uniform per entry; the expected
// dropped fraction equals p.
std::vector<uint8_t> dropout_mask(int n, Rng& rng, double p);

// Training-time condition corruption: with probability p/2 the whole context
// is zeroed, and element-wise zeroing at rate p applies on top. No rescaling
// of the surviving entries. Always consumes 1 + cond.size() uniforms.
std::vector<double> apply_condition_dropout(std::span<const double> cond, Rng& rng,
                                            double p);

// One SGD update on an explicit batch. Per-sample randomness (step, noise,
// dropout) is drawn serially from rng up front; gradients are then summed in
// fixed chunk order, so the update is bit-identical across exec policies and
// thread counts. Returns the batch mean of the squared-error loss.
double train_step(Denoiser& net, const Schedule& schedule,
                  std::span<const double> x0, std::span<const double> cond,
                  int batch, double learning_rate, double dropout_prob, Rng& rng,
                  ExecPolicy policy = ExecPolicy::serial);

// Full loop: fresh init from the seed, per-epoch reshuffle, plain SGD.
// (seed, configs, dataset) fully determine the resulting parameters.
TrainResult train(const TrainingSet& data, const DenoiserConfig& net_config,
                  const TrainConfig& train_config, const Schedule& schedule,
                  ExecPolicy policy = ExecPolicy::serial);

}  // namespace nfd
