#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "nfd/errors.hpp"
#include "nfd/rng.hpp"
#include "nfd/schedule.hpp"
#include "nfd/toyworld.hpp"
#include "nfd/trainer.hpp"

using namespace nfd;

namespace {

bool same_params(const Denoiser& a, const Denoiser& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        if (a.layers[i].w != b.layers[i].w) return false;
        if (a.layers[i].b != b.layers[i].b) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("element-wise dropout hits its rate") {
    Rng rng(9, make_stream(StreamDomain::training));
    const int n = 100000;
    std::vector<uint8_t> mask = dropout_mask(n, rng, 0.25);
    int64_t dropped = 0;
    for (uint8_t d : mask) dropped += d;
    double frac = static_cast<double>(dropped) / n;
    CHECK(frac == doctest::Approx(0.25).epsilon(0.04));
    CHECK(std::abs(frac - 0.25) < 0.01);
}

TEST_CASE("condition dropout at p = 0 is the identity") {
    Rng rng(1, make_stream(StreamDomain::training));
    std::vector<double> cond = {0.1, -0.2, 0.3, -0.4};
    std::vector<double> out = apply_condition_dropout(cond, rng, 0.0);
    CHECK(out == cond);
}

TEST_CASE("condition dropout at p = 1 zeroes everything") {
    Rng rng(1, make_stream(StreamDomain::training));
    std::vector<double> cond = {0.1, -0.2, 0.3};
    std::vector<double> out = apply_condition_dropout(cond, rng, 1.0);
    for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("surviving entries are not rescaled") {
    // several seeds, since any single draw may hit the whole-context drop
    bool any_kept = false, any_dropped = false;
    for (uint64_t seed = 1; seed <= 8; ++seed) {
        Rng rng(seed, make_stream(StreamDomain::training));
        std::vector<double> cond(64);
        for (int i = 0; i < 64; ++i) cond[i] = 0.01 * (i + 1);
        std::vector<double> out = apply_condition_dropout(cond, rng, 0.25);
        for (int i = 0; i < 64; ++i) {
            if (out[i] == 0.0) {
                any_dropped = true;
            } else {
                CHECK(out[i] == cond[i]);
                any_kept = true;
            }
        }
    }
    CHECK(any_kept);
    CHECK(any_dropped);
}

TEST_CASE("condition dropout consumes a fixed number of draws") {
    // 1 whole-context draw + one per entry, regardless of outcomes
    const uint64_t stream = make_stream(StreamDomain::training, 3);
    std::vector<double> cond(8, 0.5);
    for (double p : {0.0, 0.25, 1.0}) {
        Rng used(77, stream);
        apply_condition_dropout(cond, used, p);
        Rng ref(77, stream);
        for (int i = 0; i < 9; ++i) ref.next_uniform();
        CHECK(used.next_u64() == ref.next_u64());
    }
}

TEST_CASE("whole-context drop fires at half the rate") {
    const double p = 0.5;
    Rng rng(13, make_stream(StreamDomain::training));
    std::vector<double> cond(16, 1.0);
    int whole = 0;
    const int trials = 40000;
    for (int i = 0; i < trials; ++i) {
        std::vector<double> out = apply_condition_dropout(cond, rng, p);
        bool all_zero = true;
        for (double v : out) all_zero &= (v == 0.0);
        if (all_zero) whole += 1;
    }
    // all-zero outcomes are dominated by the whole-context branch; the
    // element-wise path contributes 0.5^16 which is negligible
    double frac = static_cast<double>(whole) / trials;
    CHECK(frac == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("zero learning rate leaves parameters untouched") {
    ToyDataset toy = make_dataset(8, 8, 16, 0.05, 2);
    TrainingSet set = training_set_from_toy(toy);
    Schedule schedule = build_schedule(100, 1e-4, 0.02);
    DenoiserConfig cfg;
    cfg.hidden_dims = {32};
    Denoiser net = Denoiser::init(cfg, 6);
    Denoiser before = net;
    Rng rng(6, make_stream(StreamDomain::training));
    std::span<const double> x0(set.x0.data(), 32u * 16);
    std::span<const double> cond(set.cond.data(), 32u * 16);
    double loss = train_step(net, schedule, x0, cond, 32, 0.0, 0.25, rng);
    CHECK(std::isfinite(loss));
    CHECK(same_params(net, before));
}

TEST_CASE("nonzero learning rate moves parameters") {
    ToyDataset toy = make_dataset(8, 8, 16, 0.05, 2);
    TrainingSet set = training_set_from_toy(toy);
    Schedule schedule = build_schedule(100, 1e-4, 0.02);
    DenoiserConfig cfg;
    cfg.hidden_dims = {32};
    Denoiser net = Denoiser::init(cfg, 6);
    Denoiser before = net;
    Rng rng(6, make_stream(StreamDomain::training));
    std::span<const double> x0(set.x0.data(), 32u * 16);
    std::span<const double> cond(set.cond.data(), 32u * 16);
    train_step(net, schedule, x0, cond, 32, 1e-3, 0.25, rng);
    CHECK(!same_params(net, before));
}

TEST_CASE("loss against a zero predictor equals the noise energy") {
    // with the output layer zeroed the prediction is 0, so the expected
    // per-sample loss is E|eps|^2 = data_dim = 16
    ToyDataset toy = make_dataset(16, 8, 16, 0.05, 3);
    TrainingSet set = training_set_from_toy(toy);
    Schedule schedule = build_schedule(1000, 1e-4, 0.02);
    DenoiserConfig cfg;
    Denoiser net = Denoiser::init(cfg, 1);
    std::fill(net.layers.back().w.begin(), net.layers.back().w.end(), 0.0);
    Rng rng(1, make_stream(StreamDomain::training));
    const int batch = 128;
    std::span<const double> x0(set.x0.data(), static_cast<std::size_t>(batch) * 16);
    std::span<const double> cond(set.cond.data(),
                                 static_cast<std::size_t>(batch) * 16);
    double loss = train_step(net, schedule, x0, cond, batch, 0.0, 0.25, rng);
    CHECK(loss > 12.0);
    CHECK(loss < 20.0);
}

TEST_CASE("divergent parameters raise a training error") {
    ToyDataset toy = make_dataset(4, 4, 16, 0.05, 2);
    TrainingSet set = training_set_from_toy(toy);
    Schedule schedule = build_schedule(100, 1e-4, 0.02);
    DenoiserConfig cfg;
    cfg.hidden_dims = {8};
    Denoiser net = Denoiser::init(cfg, 6);
    net.layers[0].w[0] = std::nan("");
    Rng rng(6, make_stream(StreamDomain::training));
    std::span<const double> x0(set.x0.data(), 8u * 16);
    std::span<const double> cond(set.cond.data(), 8u * 16);
    CHECK_THROWS_AS(train_step(net, schedule, x0, cond, 8, 1e-3, 0.0, rng),
                    TrainingDivergenceError);
}

TEST_CASE("zero epochs returns the freshly initialized network") {
    ToyDataset toy = make_dataset(6, 4, 16, 0.05, 4);
    TrainingSet set = training_set_from_toy(toy);
    Schedule schedule = build_schedule(50, 1e-4, 0.02);
    DenoiserConfig cfg;
    cfg.hidden_dims = {16};
    TrainConfig tc;
    tc.epochs = 0;
    tc.seed = 31;
    TrainResult result = train(set, cfg, tc, schedule);
    CHECK(same_params(result.net, Denoiser::init(cfg, 31)));
    CHECK(result.report.epoch_mean_loss.empty());
}

TEST_CASE("training is reproducible and policy independent") {
    ToyDataset toy = make_dataset(12, 6, 16, 0.05, 5);
    TrainingSet set = training_set_from_toy(toy);
    Schedule schedule = build_schedule(200, 1e-4, 0.02);
    DenoiserConfig cfg;
    cfg.hidden_dims = {32};
    TrainConfig tc;
    tc.epochs = 3;
    tc.batch_size = 16;
    tc.seed = 8;

    TrainResult serial_a = train(set, cfg, tc, schedule, ExecPolicy::serial);
    TrainResult serial_b = train(set, cfg, tc, schedule, ExecPolicy::serial);
    TrainResult parallel = train(set, cfg, tc, schedule, ExecPolicy::parallel);
    CHECK(same_params(serial_a.net, serial_b.net));
    CHECK(same_params(serial_a.net, parallel.net));
    CHECK(serial_a.report.epoch_mean_loss == parallel.report.epoch_mean_loss);

    TrainConfig other = tc;
    other.seed = 9;
    TrainResult different = train(set, cfg, other, schedule, ExecPolicy::serial);
    CHECK(!same_params(serial_a.net, different.net));
}

TEST_CASE("a short run reduces the loss") {
    ToyDataset toy = make_dataset(32, 16, 16, 0.05, 7);
    TrainingSet set = training_set_from_toy(toy);
    Schedule schedule = build_schedule(1000, 1e-4, 0.02);
    DenoiserConfig cfg;
    cfg.hidden_dims = {64};
    TrainConfig tc;
    tc.epochs = 12;
    tc.batch_size = 16;
    tc.learning_rate = 3e-3;
    tc.seed = 7;
    TrainResult result = train(set, cfg, tc, schedule);
    REQUIRE(result.report.epoch_mean_loss.size() == 12);
    CHECK(result.report.final_epoch_loss <
          0.6 * result.report.epoch_mean_loss.front());
    CHECK(result.report.wall_seconds > 0.0);
}

TEST_CASE("train validates its configuration") {
    ToyDataset toy = make_dataset(4, 4, 16, 0.05, 2);
    TrainingSet set = training_set_from_toy(toy);
    Schedule schedule = build_schedule(50, 1e-4, 0.02);
    DenoiserConfig cfg;
    cfg.hidden_dims = {8};
    TrainConfig tc;

    TrainConfig bad_epochs = tc;
    bad_epochs.epochs = -1;
    CHECK_THROWS_AS(train(set, cfg, bad_epochs, schedule), ConfigError);

    TrainConfig bad_batch = tc;
    bad_batch.batch_size = 0;
    CHECK_THROWS_AS(train(set, cfg, bad_batch, schedule), ConfigError);

    TrainConfig bad_drop = tc;
    bad_drop.dropout_prob = 1.5;
    CHECK_THROWS_AS(train(set, cfg, bad_drop, schedule), ConfigError);

    DenoiserConfig wrong;
    wrong.data_dim = 8;
    TrainConfig one = tc;
    one.epochs = 1;
    CHECK_THROWS_AS(train(set, wrong, one, schedule), ShapeError);
}
