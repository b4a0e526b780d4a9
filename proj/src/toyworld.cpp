#include "nfd/toyworld.hpp"

#include <cmath>
#include <string>

#include "nfd/errors.hpp"
#include "nfd/rng.hpp"

namespace nfd {

std::span<const double> ToyDataset::prototype(int id) const {
    return {prototypes.data() + static_cast<std::size_t>(id) * dim,
            static_cast<std::size_t>(dim)};
}

std::span<const double> ToyDataset::sample(int id, int k) const {
    std::size_t row = static_cast<std::size_t>(id) * per_identity + k;
    return {samples.data() + row * dim, static_cast<std::size_t>(dim)};
}

ToyDataset make_dataset(int identities, int per_identity, int dim,
                        double noise_scale, uint64_t seed) {
    if (identities < 2) throw InputError("toy dataset needs at least 2 identities");
    if (per_identity < 1) throw InputError("toy dataset needs per_identity >= 1");
    if (dim < 2) throw InputError("toy dataset needs dim >= 2");
    if (noise_scale < 0.0) throw InputError("noise_scale must be >= 0");

    ToyDataset ds;
    ds.dim = dim;
    ds.identities = identities;
    ds.per_identity = per_identity;
    ds.noise_scale = noise_scale;
    ds.seed = seed;
    ds.prototypes.resize(static_cast<std::size_t>(identities) * dim);
    ds.samples.resize(static_cast<std::size_t>(identities) * per_identity * dim);

    for (int id = 0; id < identities; ++id) {
        Rng proto_rng(seed, make_stream(StreamDomain::toy_prototypes,
                                        static_cast<uint32_t>(id)));
        double* proto = ds.prototypes.data() + static_cast<std::size_t>(id) * dim;
        double norm_sq = 0.0;
        for (int c = 0; c < dim; ++c) {
            proto[c] = proto_rng.next_gaussian();
            norm_sq += proto[c] * proto[c];
        }
        double inv_norm = 1.0 / std::sqrt(norm_sq);
        for (int c = 0; c < dim; ++c) proto[c] *= inv_norm;

        Rng sample_rng(seed, make_stream(StreamDomain::toy_samples,
                                         static_cast<uint32_t>(id)));
        for (int k = 0; k < per_identity; ++k) {
            std::size_t row = static_cast<std::size_t>(id) * per_identity + k;
            double* out = ds.samples.data() + row * dim;
            for (int c = 0; c < dim; ++c) {
                out[c] = proto[c] + noise_scale * sample_rng.next_gaussian();
            }
        }
    }
    return ds;
}

std::vector<double> extract_feature(std::span<const double> x) {
    double norm_sq = 0.0;
    for (double v : x) norm_sq += v * v;
    if (norm_sq == 0.0) throw NormalizationError("cannot extract a direction from the zero vector");
    double inv_norm = 1.0 / std::sqrt(norm_sq);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * inv_norm;
    return out;
}

}  // namespace nfd
