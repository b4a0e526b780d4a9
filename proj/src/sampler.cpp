#include "nfd/sampler.hpp"

#include <cmath>
#include <string>

#include "nfd/rng.hpp"

namespace nfd {

const char* sampler_mode_name(SamplerMode m) {
    switch (m) {
        case SamplerMode::none: return "none";
        case SamplerMode::ddpm: return "ddpm";
        case SamplerMode::ddim: return "ddim";
    }
    throw ConfigError("unknown sampler mode value");
}

SamplerMode parse_sampler_mode(const std::string& name) {
    for (SamplerMode m : {SamplerMode::none, SamplerMode::ddpm, SamplerMode::ddim}) {
        if (name == sampler_mode_name(m)) return m;
    }
    throw ConfigError("unknown sampler mode '" + name + "'");
}

std::vector<double> forward_diffuse(std::span<const double> x0, int t,
                                    std::span<const double> eps,
                                    const Schedule& schedule) {
    if (x0.size() != eps.size()) throw ShapeError("x0 and eps sizes differ");
    double abar = schedule.alpha_bar(t);
    double a = std::sqrt(abar);
    double b = std::sqrt(1.0 - abar);
    std::vector<double> out(x0.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x0[i] + b * eps[i];
    return out;
}

ChainState ddpm_step(const ChainState& state, std::span<const double> eps_hat,
                     const Schedule& schedule, const std::vector<double>* zeta) {
    const int t = state.t;
    if (state.x.size() != eps_hat.size()) {
        throw ShapeError("state and eps_hat sizes differ");
    }
    if (t > 1 && zeta == nullptr) {
        throw NoiseStreamError("ancestral step at t=" + std::to_string(t) +
                               " needs a noise draw");
    }
    if (t == 1 && zeta != nullptr) {
        throw NoiseStreamError("the final ancestral step takes no noise");
    }
    if (zeta != nullptr && zeta->size() != state.x.size()) {
        throw ShapeError("noise draw has wrong width");
    }

    double alpha = schedule.alpha(t);
    double abar = schedule.alpha_bar(t);
    double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
    double coef = (1.0 - alpha) / std::sqrt(1.0 - abar);
    double sigma = schedule.sigma(t);

    ChainState next;
    next.t = t - 1;
    next.x.resize(state.x.size());
    for (std::size_t i = 0; i < next.x.size(); ++i) {
        double mean = inv_sqrt_alpha * (state.x[i] - coef * eps_hat[i]);
        next.x[i] = (zeta != nullptr) ? mean + sigma * (*zeta)[i] : mean;
    }
    return next;
}

ChainState ddim_step(const ChainState& state, std::span<const double> eps_hat,
                     const Schedule& schedule, int t_prev) {
    const int t = state.t;
    if (state.x.size() != eps_hat.size()) {
        throw ShapeError("state and eps_hat sizes differ");
    }
    if (t_prev < 0 || t_prev >= t) {
        throw StepRangeError("ddim step needs 0 <= t_prev < t, got t_prev=" +
                             std::to_string(t_prev) + " t=" + std::to_string(t));
    }

    double abar = schedule.alpha_bar(t);
    double abar_prev = schedule.alpha_bar_ext(t_prev);
    double sqrt_abar = std::sqrt(abar);
    double sqrt_one_minus = std::sqrt(1.0 - abar);
    double a = std::sqrt(abar_prev);
    double b = std::sqrt(1.0 - abar_prev);

    ChainState next;
    next.t = t_prev;
    next.x.resize(state.x.size());
    for (std::size_t i = 0; i < next.x.size(); ++i) {
        double x0_hat = (state.x[i] - sqrt_one_minus * eps_hat[i]) / sqrt_abar;
        next.x[i] = a * x0_hat + b * eps_hat[i];
    }
    return next;
}

std::vector<int> ddim_timesteps(int sample_steps, int T) {
    if (sample_steps < 1 || sample_steps > T) {
        throw ConfigError("ddim needs 1 <= steps <= T, got " +
                          std::to_string(sample_steps));
    }
    std::vector<int> taus(sample_steps);
    for (int i = 1; i <= sample_steps; ++i) {
        int64_t num = static_cast<int64_t>(i) * T + sample_steps - 1;
        taus[i - 1] = static_cast<int>(num / sample_steps);
    }
    return taus;
}

std::vector<double> run_chain(const Denoiser& net, const Schedule& schedule,
                              std::span<const double> p_pos,
                              const std::vector<double>* p_neg,
                              const SamplerOptions& options, uint32_t identity_id,
                              uint32_t sample_index) {
    if (!net.all_finite()) {
        throw CheckpointError("model parameters are not finite");
    }
    const int d = net.config.data_dim;
    auto predict = [&](std::span<const double> x, int t, std::span<const double> p) {
        return net.predict_eps(x, t, p);
    };
    auto eps_at = [&](const ChainState& state) {
        if (p_neg != nullptr) {
            return guided_eps(predict, state.x, state.t, p_pos,
                              std::span<const double>(*p_neg), options.guidance_w);
        }
        return net.predict_eps(state.x, state.t, p_pos);
    };

    Rng noise(options.seed,
              make_stream(StreamDomain::chain, identity_id, sample_index));
    ChainState state;
    state.x.resize(d);
    for (double& v : state.x) v = noise.next_gaussian();

    if (options.mode == SamplerMode::ddpm) {
        if (options.steps != schedule.T) {
            throw ConfigError("ancestral sampling runs the full schedule; set steps to T");
        }
        state.t = schedule.T;
        for (int t = schedule.T; t >= 1; --t) {
            std::vector<double> eps = eps_at(state);
            if (t > 1) {
                std::vector<double> zeta(d);
                for (double& v : zeta) v = noise.next_gaussian();
                state = ddpm_step(state, eps, schedule, &zeta);
            } else {
                state = ddpm_step(state, eps, schedule, nullptr);
            }
        }
    } else if (options.mode == SamplerMode::ddim) {
        std::vector<int> taus = ddim_timesteps(options.steps, schedule.T);
        state.t = taus.back();
        for (int i = static_cast<int>(taus.size()); i >= 1; --i) {
            int t_prev = (i >= 2) ? taus[i - 2] : 0;
            std::vector<double> eps = eps_at(state);
            state = ddim_step(state, eps, schedule, t_prev);
        }
    } else {
        throw ConfigError("sampler mode must be ddpm or ddim");
    }
    return state.x;
}

std::vector<std::vector<double>> sample_identity(
    const Denoiser& net, const Schedule& schedule, std::span<const double> p_pos,
    const std::vector<double>* p_neg, const SamplerOptions& options,
    uint32_t identity_id, int count, ExecPolicy policy) {
    if (count < 0) throw InputError("sample count must be >= 0");
    std::vector<std::vector<double>> out(count);
    auto run = [&](int k) {
        out[k] = run_chain(net, schedule, p_pos, p_neg, options, identity_id,
                           static_cast<uint32_t>(k));
    };
    if (policy == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < count; ++k) run(k);
#else
        for (int k = 0; k < count; ++k) run(k);
#endif
    } else {
        for (int k = 0; k < count; ++k) run(k);
    }
    return out;
}

std::vector<double> generate_matrix(const Denoiser& net, const Schedule& schedule,
                                    const std::vector<std::vector<double>>& positives,
                                    const std::vector<std::vector<double>>* negatives,
                                    const SamplerOptions& options, int per_identity,
                                    ExecPolicy policy) {
    const int n = static_cast<int>(positives.size());
    if (n < 1) throw InputError("need at least one identity to sample");
    if (per_identity < 1) throw InputError("per_identity must be >= 1");
    if (per_identity >= (1 << 24)) throw InputError("per_identity exceeds stream space");
    if (negatives != nullptr && negatives->size() != positives.size()) {
        throw ShapeError("negatives do not align with positives");
    }

    const int d = net.config.data_dim;
    const int64_t cells = static_cast<int64_t>(n) * per_identity;
    std::vector<double> out(static_cast<std::size_t>(cells) * d);

    auto run = [&](int64_t cell) {
        int id = static_cast<int>(cell / per_identity);
        int k = static_cast<int>(cell % per_identity);
        const std::vector<double>* p_neg =
            (negatives != nullptr) ? &(*negatives)[id] : nullptr;
        std::vector<double> x =
            run_chain(net, schedule, positives[id], p_neg, options,
                      static_cast<uint32_t>(id), static_cast<uint32_t>(k));
        double* dst = out.data() + static_cast<std::size_t>(cell) * d;
        for (int c = 0; c < d; ++c) dst[c] = x[c];
    };

    if (policy == ExecPolicy::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (int64_t cell = 0; cell < cells; ++cell) run(cell);
#else
        for (int64_t cell = 0; cell < cells; ++cell) run(cell);
#endif
    } else {
        for (int64_t cell = 0; cell < cells; ++cell) run(cell);
    }
    return out;
}

}  // namespace nfd
