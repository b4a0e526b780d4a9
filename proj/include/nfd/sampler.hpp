#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nfd/denoiser.hpp"
#include "nfd/errors.hpp"
#include "nfd/parallel.hpp"
#include "nfd/schedule.hpp"

namespace nfd {

enum class SamplerMode : uint32_t {
    none = 0,  // file label for raw (non-sampled) data
    ddpm = 1,
    ddim = 2,
};

const char* sampler_mode_name(SamplerMode m);
SamplerMode parse_sampler_mode(const std::string& name);

struct SamplerOptions {
    SamplerMode mode = SamplerMode::ddim;
    int steps = 200;
    double guidance_w = 0.5;
    uint64_t seed = 0;
};

struct ChainState {
    std::vector<double> x;
    int t = 0;
};

// sqrt(abar_t) * x0 + sqrt(1 - abar_t) * eps
std::vector<double> forward_diffuse(std::span<const double> x0, int t,
                                    std::span<const double> eps,
                                    const Schedule& schedule);

// Guided prediction (1 + w) * eps(p_pos) - w * eps(p_neg); always exactly two
// predictor evaluations. At w = 0 the arithmetic reduces to the positive
// prediction bit-for-bit.
template <typename EpsFn>
std::vector<double> guided_eps(EpsFn&& predict, std::span<const double> x_t, int t,
                               std::span<const double> p_pos,
                               std::span<const double> p_neg, double w) {
    std::vector<double> pos = predict(x_t, t, p_pos);
    std::vector<double> neg = predict(x_t, t, p_neg);
    if (pos.size() != neg.size()) {
        throw ShapeError("guided predictions disagree on width");
    }
    std::vector<double> out(pos.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (1.0 + w) * pos[i] - w * neg[i];
    }
    return out;
}

// One ancestral step t -> t-1. zeta must be present exactly when t > 1; the
// final step omits the noise term.
ChainState ddpm_step(const ChainState& state, std::span<const double> eps_hat,
                     const Schedule& schedule, const std::vector<double>* zeta);

// One deterministic step t -> t_prev via the x0 prediction; t_prev = 0 returns
// the x0 estimate itself. Requires 0 <= t_prev < t.
ChainState ddim_step(const ChainState& state, std::span<const double> eps_hat,
                     const Schedule& schedule, int t_prev);

// Ascending ladder tau_i = ceil(i*T/S), i = 1..S. Requires 1 <= S <= T.
std::vector<int> ddim_timesteps(int sample_steps, int T);

// One full reverse chain. All noise comes from the stream keyed by
// (options.seed, identity_id, sample_index), so chains are reproducible and
// order-independent; runs with and without p_neg share the identical stream.
std::vector<double> run_chain(const Denoiser& net, const Schedule& schedule,
                              std::span<const double> p_pos,
                              const std::vector<double>* p_neg,
                              const SamplerOptions& options, uint32_t identity_id,
                              uint32_t sample_index);

// count chains for one identity; rows ordered by sample index.
std::vector<std::vector<double>> sample_identity(
    const Denoiser& net, const Schedule& schedule, std::span<const double> p_pos,
    const std::vector<double>* p_neg, const SamplerOptions& options,
    uint32_t identity_id, int count, ExecPolicy policy = ExecPolicy::serial);

// Chains for every (identity, sample) cell, flattened row-major by
// (identity index, sample index); identity i uses positives[i] and, when
// given, assignment negatives[i]. This is the hot kernel the benchmark times.
std::vector<double> generate_matrix(const Denoiser& net, const Schedule& schedule,
                                    const std::vector<std::vector<double>>& positives,
                                    const std::vector<std::vector<double>>* negatives,
                                    const SamplerOptions& options, int per_identity,
                                    ExecPolicy policy);

}  // namespace nfd
