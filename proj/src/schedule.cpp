#include "nfd/schedule.hpp"

#include <cmath>
#include <string>

#include "nfd/errors.hpp"

namespace nfd {

namespace {

void check_range(int t, int T) {
    if (t < 1 || t > T) {
        throw StepRangeError("timestep " + std::to_string(t) + " outside [1, " +
                             std::to_string(T) + "]");
    }
}

}  // namespace

double Schedule::beta(int t) const {
    check_range(t, T);
    return betas[t - 1];
}

double Schedule::alpha(int t) const {
    check_range(t, T);
    return alphas[t - 1];
}

double Schedule::alpha_bar(int t) const {
    check_range(t, T);
    return alpha_bars[t - 1];
}

double Schedule::sigma(int t) const {
    check_range(t, T);
    return sigmas[t - 1];
}

double Schedule::alpha_bar_ext(int t) const {
    if (t == 0) return 1.0;
    return alpha_bar(t);
}

Schedule build_schedule(int T, double beta_start, double beta_end) {
    if (T < 2) throw ConfigError("schedule needs T >= 2, got " + std::to_string(T));
    if (!(beta_start > 0.0) || !(beta_end < 1.0) || !(beta_start < beta_end)) {
        throw ConfigError("schedule needs 0 < beta_start < beta_end < 1");
    }

    Schedule s;
    s.T = T;
    s.beta_start = beta_start;
    s.beta_end = beta_end;
    s.betas.resize(T);
    s.alphas.resize(T);
    s.alpha_bars.resize(T);
    s.sigmas.resize(T);

    double running = 1.0;
    for (int t = 1; t <= T; ++t) {
        double frac = static_cast<double>(t - 1) / static_cast<double>(T - 1);
        double beta = beta_start + (beta_end - beta_start) * frac;
        s.betas[t - 1] = beta;
        s.alphas[t - 1] = 1.0 - beta;
        running *= s.alphas[t - 1];
        s.alpha_bars[t - 1] = running;
        s.sigmas[t - 1] = std::sqrt(beta);
    }
    return s;
}

}  // namespace nfd
