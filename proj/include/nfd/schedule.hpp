#pragma once

#include <vector>

namespace nfd {

// Fixed linear variance schedule with its derived per-step quantities.
// Steps are 1-based: arrays hold values for t = 1..T and accessors take t in
// that range. alpha_bar is the running product of alphas; sigma_t = sqrt(beta_t).
struct Schedule {
    int T = 0;
    double beta_start = 0.0;
    double beta_end = 0.0;
    std::vector<double> betas;
    std::vector<double> alphas;
    std::vector<double> alpha_bars;
    std::vector<double> sigmas;

    double beta(int t) const;
    double alpha(int t) const;
    double alpha_bar(int t) const;
    double sigma(int t) const;

    // alpha_bar extended with alpha_bar(0) = 1, the value the final reverse
    // transition to step 0 uses
    double alpha_bar_ext(int t) const;
};

inline constexpr int kDefaultTimesteps = 1000;
inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 0.02;

// beta_t linearly interpolated from beta_start at t=1 to beta_end at t=T.
// Requires T >= 2 and 0 < beta_start < beta_end < 1.
Schedule build_schedule(int T, double beta_start, double beta_end);

}  // namespace nfd
