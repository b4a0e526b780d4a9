// Times the serial reference kernels against their OpenMP counterparts and
// checks that both produce bit-identical results.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <span>
#include <vector>

#include "nfd/rng.hpp"

#include "nfd/biometrics.hpp"
#include "nfd/contexts.hpp"
#include "nfd/parallel.hpp"
#include "nfd/sampler.hpp"
#include "nfd/schedule.hpp"
#include "nfd/toyworld.hpp"
#include "nfd/trainer.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

template <typename Fn>
double timed(Fn&& fn) {
    auto start = std::chrono::steady_clock::now();
    fn();
    return seconds_since(start);
}

void print_row(const char* name, double serial_s, double parallel_s, bool equal) {
    std::printf("%-14s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n", name,
                serial_s, parallel_s, parallel_s > 0 ? serial_s / parallel_s : 0.0,
                equal ? "bit-equal" : "MISMATCH");
}

}  // namespace

int main() {
    using namespace nfd;
    std::printf("threads available: %d\n", hardware_threads());

    const Schedule schedule = build_schedule(kDefaultTimesteps, kDefaultBetaStart,
                                             kDefaultBetaEnd);
    DenoiserConfig cfg;
    Denoiser net = Denoiser::init(cfg, 7);

    // Generation: a modest grid so a serial pass stays under a minute.
    const int ids = 24;
    const int per_id = 4;
    std::vector<IdentityContext> contexts = draw_contexts(ids, cfg.cond_dim, 7, true);
    std::vector<std::vector<double>> positives(contexts.size());
    for (size_t i = 0; i < contexts.size(); ++i) positives[i] = contexts[i].vec;
    NegativeAssignment far = select_negatives(contexts, Strategy::far_neg, 7,
                                              ExecPolicy::serial);
    SamplerOptions opts;
    opts.seed = 7;
    std::vector<double> gen_serial, gen_parallel;
    double t_gen_s = timed([&] {
        gen_serial = generate_matrix(net, schedule, positives, &far.negatives, opts,
                                     per_id, ExecPolicy::serial);
    });
    double t_gen_p = timed([&] {
        gen_parallel = generate_matrix(net, schedule, positives, &far.negatives, opts,
                                       per_id, ExecPolicy::parallel);
    });
    print_row("generate", t_gen_s, t_gen_p,
              gen_serial.size() == gen_parallel.size() &&
                  std::memcmp(gen_serial.data(), gen_parallel.data(),
                              gen_serial.size() * sizeof(double)) == 0);

    // Training: identical nets stepped over the same batches under each policy.
    ToyDataset toy = make_dataset(64, 16, cfg.data_dim, 0.05, 7);
    TrainingSet ts = training_set_from_toy(toy);
    const int steps = 40;
    const int batch = 128;
    const int64_t slots = ts.count - batch;

    auto run_steps = [&](Denoiser& net, ExecPolicy policy) {
        Rng rng(7, make_stream(StreamDomain::training));
        for (int s = 0; s < steps; ++s) {
            const int64_t start = (static_cast<int64_t>(s) * batch) % slots;
            std::span<const double> x0(ts.x0.data() + start * ts.dim,
                                       static_cast<size_t>(batch) * ts.dim);
            std::span<const double> cond(ts.cond.data() + start * ts.cond_dim,
                                         static_cast<size_t>(batch) * ts.cond_dim);
            train_step(net, schedule, x0, cond, batch, 1e-3, 0.25, rng, policy);
        }
    };
    Denoiser net_s = Denoiser::init(cfg, 7);
    Denoiser net_p = Denoiser::init(cfg, 7);
    double t_train_s = timed([&] { run_steps(net_s, ExecPolicy::serial); });
    double t_train_p = timed([&] { run_steps(net_p, ExecPolicy::parallel); });
    bool train_equal = true;
    for (size_t l = 0; l < net_s.layers.size() && train_equal; ++l) {
        train_equal = std::memcmp(net_s.layers[l].w.data(), net_p.layers[l].w.data(),
                                  net_s.layers[l].w.size() * sizeof(double)) == 0 &&
                      std::memcmp(net_s.layers[l].b.data(), net_p.layers[l].b.data(),
                                  net_s.layers[l].b.size() * sizeof(double)) == 0;
    }
    print_row("train-step", t_train_s, t_train_p, train_equal);

    // Pair scoring over a synthetic payload large enough to feel the loop.
    const int score_ids = 120;
    const int score_per = 12;
    ToyDataset pool = make_dataset(score_ids, score_per, cfg.data_dim, 0.05, 7);
    std::vector<float> payload(static_cast<size_t>(score_ids) * score_per * cfg.data_dim);
    for (size_t i = 0; i < payload.size(); ++i)
        payload[i] = static_cast<float>(pool.samples[i]);
    PairingSpec pairing;
    ScoreSet scores_s, scores_p;
    double t_score_s = timed([&] {
        scores_s = score_pairs(score_ids, score_per, cfg.data_dim, payload,
                               extract_feature, pairing, ExecPolicy::serial);
    });
    double t_score_p = timed([&] {
        scores_p = score_pairs(score_ids, score_per, cfg.data_dim, payload,
                               extract_feature, pairing, ExecPolicy::parallel);
    });
    bool score_equal =
        scores_s.genuine == scores_p.genuine && scores_s.impostor == scores_p.impostor;
    print_row("score-pairs", t_score_s, t_score_p, score_equal);

    return (gen_serial == gen_parallel && train_equal && score_equal) ? 0 : 1;
}
