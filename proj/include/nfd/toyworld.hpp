#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nfd {

// Synthetic identity world: one unit-norm prototype per identity, samples are
// the prototype plus isotropic Gaussian jitter. Samples are stored grouped by
// identity, sample index varying fastest.
struct ToyDataset {
    int dim = 0;
    int identities = 0;
    int per_identity = 0;
    double noise_scale = 0.0;
    uint64_t seed = 0;
    std::vector<double> prototypes;  // identities x dim
    std::vector<double> samples;     // identities x per_identity x dim

    std::span<const double> prototype(int id) const;
    std::span<const double> sample(int id, int k) const;
};

inline constexpr double kDefaultNoiseScale = 0.05;

// Prototypes are drawn uniformly on the unit sphere (normalized Gaussians).
// Each identity uses its own derived noise stream, so generation order does
// not affect the result. Requires identities >= 2, per_identity >= 1, dim >= 2.
ToyDataset make_dataset(int identities, int per_identity, int dim,
                        double noise_scale, uint64_t seed);

// Oracle feature extractor: direction of x. Throws on zero vectors.
std::vector<double> extract_feature(std::span<const double> x);

}  // namespace nfd
