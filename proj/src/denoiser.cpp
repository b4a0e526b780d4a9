#include "nfd/denoiser.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "nfd/errors.hpp"
#include "nfd/rng.hpp"

namespace nfd {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double silu(double x) { return x * sigmoid(x); }

inline double silu_grad(double x) {
    double s = sigmoid(x);
    return s * (1.0 + x * (1.0 - s));
}

void check_time_dim(int time_dim) {
    if (time_dim < 2 || time_dim % 2 != 0) {
        throw ConfigError("time_dim must be even and >= 2, got " +
                          std::to_string(time_dim));
    }
}

}  // namespace

std::vector<double> sinusoid_features(double t, int time_dim) {
    check_time_dim(time_dim);
    int half = time_dim / 2;
    std::vector<double> emb(time_dim);
    for (int k = 0; k < half; ++k) {
        double omega = std::pow(10000.0, -static_cast<double>(k) / half);
        emb[2 * k] = std::sin(t * omega);
        emb[2 * k + 1] = std::cos(t * omega);
    }
    return emb;
}

std::vector<double> time_embedding(int t, int time_dim, int T) {
    if (t < 1 || t > T) {
        throw StepRangeError("embedding step " + std::to_string(t) +
                             " outside [1, " + std::to_string(T) + "]");
    }
    return sinusoid_features(static_cast<double>(t), time_dim);
}

Denoiser Denoiser::init(const DenoiserConfig& config, uint64_t seed) {
    if (config.data_dim < 1 || config.cond_dim < 1) {
        throw ConfigError("denoiser needs data_dim >= 1 and cond_dim >= 1");
    }
    check_time_dim(config.time_dim);
    for (int h : config.hidden_dims) {
        if (h < 1) throw ConfigError("hidden layer width must be >= 1");
    }

    Denoiser net;
    net.config = config;
    Rng rng(seed, make_stream(StreamDomain::net_init));

    int in = config.input_dim();
    std::vector<int> outs(config.hidden_dims);
    outs.push_back(config.data_dim);
    for (int out : outs) {
        Dense layer;
        layer.in = in;
        layer.out = out;
        layer.w.resize(static_cast<std::size_t>(in) * out);
        layer.b.assign(out, 0.0);
        double std_dev = 1.0 / std::sqrt(static_cast<double>(in));
        for (double& w : layer.w) w = std_dev * rng.next_gaussian();
        net.layers.push_back(std::move(layer));
        in = out;
    }
    return net;
}

std::size_t Denoiser::parameter_count() const {
    std::size_t n = 0;
    for (const Dense& l : layers) n += l.w.size() + l.b.size();
    return n;
}

bool Denoiser::all_finite() const {
    for (const Dense& l : layers) {
        for (double w : l.w) {
            if (!std::isfinite(w)) return false;
        }
        for (double b : l.b) {
            if (!std::isfinite(b)) return false;
        }
    }
    return true;
}

std::vector<double> forward_cached(const Denoiser& net, std::span<const double> x_t,
                                   int t, std::span<const double> p,
                                   ForwardCache& cache) {
    const DenoiserConfig& cfg = net.config;
    if (static_cast<int>(x_t.size()) != cfg.data_dim) {
        throw ShapeError("denoiser input has " + std::to_string(x_t.size()) +
                         " entries, expected " + std::to_string(cfg.data_dim));
    }
    if (static_cast<int>(p.size()) != cfg.cond_dim) {
        throw ShapeError("condition has " + std::to_string(p.size()) +
                         " entries, expected " + std::to_string(cfg.cond_dim));
    }
    if (t < 1) throw StepRangeError("denoiser step must be >= 1");

    cache.input.resize(cfg.input_dim());
    double* dst = cache.input.data();
    for (double v : x_t) *dst++ = v;
    std::vector<double> emb = sinusoid_features(static_cast<double>(t), cfg.time_dim);
    for (double v : emb) *dst++ = v;
    for (double v : p) *dst++ = v;

    std::size_t n_layers = net.layers.size();
    cache.pre.resize(n_layers);
    cache.act.resize(n_layers);

    const std::vector<double>* src = &cache.input;
    for (std::size_t li = 0; li < n_layers; ++li) {
        const Dense& layer = net.layers[li];
        std::vector<double>& pre = cache.pre[li];
        pre.resize(layer.out);
        for (int o = 0; o < layer.out; ++o) {
            const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            double acc = layer.b[o];
            for (int i = 0; i < layer.in; ++i) acc += row[i] * (*src)[i];
            pre[o] = acc;
        }
        std::vector<double>& act = cache.act[li];
        act.resize(layer.out);
        if (li + 1 < n_layers) {
            for (int o = 0; o < layer.out; ++o) act[o] = silu(pre[o]);
        } else {
            act = pre;  // linear output layer
        }
        src = &act;
    }
    return cache.act.back();
}

std::vector<double> Denoiser::predict_eps(std::span<const double> x_t, int t,
                                          std::span<const double> p) const {
    ForwardCache cache;
    return forward_cached(*this, x_t, t, p, cache);
}

Gradients Gradients::zeros_like(const Denoiser& net) {
    Gradients g;
    g.layers.reserve(net.layers.size());
    for (const Dense& l : net.layers) {
        Dense zl;
        zl.in = l.in;
        zl.out = l.out;
        zl.w.assign(l.w.size(), 0.0);
        zl.b.assign(l.b.size(), 0.0);
        g.layers.push_back(std::move(zl));
    }
    return g;
}

void Gradients::add(const Gradients& other) {
    if (layers.size() != other.layers.size()) {
        throw ShapeError("gradient shape mismatch in add");
    }
    for (std::size_t li = 0; li < layers.size(); ++li) {
        Dense& a = layers[li];
        const Dense& b = other.layers[li];
        for (std::size_t i = 0; i < a.w.size(); ++i) a.w[i] += b.w[i];
        for (std::size_t i = 0; i < a.b.size(); ++i) a.b[i] += b.b[i];
    }
}

void accumulate_backward(const Denoiser& net, const ForwardCache& cache,
                         std::span<const double> out_grad, Gradients& grads) {
    std::size_t n_layers = net.layers.size();
    if (grads.layers.size() != n_layers) {
        throw ShapeError("gradient accumulator does not match network");
    }
    if (out_grad.size() != net.layers.back().b.size()) {
        throw ShapeError("output gradient has wrong width");
    }

    std::vector<double> delta(out_grad.begin(), out_grad.end());
    for (std::size_t li = n_layers; li-- > 0;) {
        const Dense& layer = net.layers[li];
        Dense& g = grads.layers[li];
        const std::vector<double>& below =
            (li == 0) ? cache.input : cache.act[li - 1];

        for (int o = 0; o < layer.out; ++o) {
            double d = delta[o];
            g.b[o] += d;
            double* grow = g.w.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) grow[i] += d * below[i];
        }
        if (li == 0) break;

        std::vector<double> prev(layer.in, 0.0);
        for (int o = 0; o < layer.out; ++o) {
            double d = delta[o];
            const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) prev[i] += d * row[i];
        }
        const std::vector<double>& pre = cache.pre[li - 1];
        for (int i = 0; i < layer.in; ++i) prev[i] *= silu_grad(pre[i]);
        delta = std::move(prev);
    }
}

}  // namespace nfd
