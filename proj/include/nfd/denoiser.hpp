#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nfd {

// Raw sinusoidal features for a (possibly fractional) step value: pairs
// (sin(t*w_k), cos(t*w_k)) with w_k geometrically spaced from 1 down toward
// 1/10^4. No range check; time_embedding below is the checked entry point.
std::vector<double> sinusoid_features(double t, int time_dim);

// Embedding for an integer step t in [1, T]. time_dim must be even and >= 2.
std::vector<double> time_embedding(int t, int time_dim, int T);

struct DenoiserConfig {
    int data_dim = 16;
    int cond_dim = 16;
    int time_dim = 32;
    std::vector<int> hidden_dims{128, 128};

    int input_dim() const { return data_dim + time_dim + cond_dim; }
    bool operator==(const DenoiserConfig&) const = default;
};

// Fully-connected layer; w is row-major out x in.
struct Dense {
    int in = 0;
    int out = 0;
    std::vector<double> w;
    std::vector<double> b;
};

// Noise-prediction MLP. Input is the concatenation [x_t, time_embedding, p];
// hidden layers use SiLU, the output layer is linear with data_dim units.
struct Denoiser {
    DenoiserConfig config;
    std::vector<Dense> layers;

    // Gaussian weights with std 1/sqrt(fan_in), zero biases, reproducible
    // from the seed alone.
    static Denoiser init(const DenoiserConfig& config, uint64_t seed);

    // eps prediction for one input; pure, no internal state.
    std::vector<double> predict_eps(std::span<const double> x_t, int t,
                                    std::span<const double> p) const;

    std::size_t parameter_count() const;
    bool all_finite() const;
};

// Parameter-shaped gradient accumulator.
struct Gradients {
    std::vector<Dense> layers;

    static Gradients zeros_like(const Denoiser& net);
    void add(const Gradients& other);
};

// Forward pass that keeps pre-activations and activations for backprop.
struct ForwardCache {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;  // one per layer
    std::vector<std::vector<double>> act;  // post-nonlinearity, one per layer
};

std::vector<double> forward_cached(const Denoiser& net, std::span<const double> x_t,
                                   int t, std::span<const double> p,
                                   ForwardCache& cache);

// Exact reverse-mode gradients given d(loss)/d(output); adds into grads.
// A zero output gradient therefore contributes nothing.
void accumulate_backward(const Denoiser& net, const ForwardCache& cache,
                         std::span<const double> out_grad, Gradients& grads);

}  // namespace nfd
