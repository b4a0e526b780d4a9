#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nfd {

// Flat key=value run configuration. Section prefixes are part of the key
// ("sampler.steps = 200"); unknown keys are rejected so typos cannot pass
// silently. parse_config(serialize_config(c)) reproduces c exactly.
struct RunConfig {
    uint64_t seed = 1;

    struct ScheduleSection {
        int steps = 1000;
        double beta_start = 1e-4;
        double beta_end = 0.02;
        bool operator==(const ScheduleSection&) const = default;
    } schedule;

    struct NetSection {
        int data_dim = 16;
        int cond_dim = 16;
        int time_dim = 32;
        std::vector<int> hidden{128, 128};
        bool operator==(const NetSection&) const = default;
    } net;

    struct DataSection {
        int identities = 200;
        int samples_per_id = 32;
        double noise_scale = 0.05;
        bool operator==(const DataSection&) const = default;
    } data;

    struct TrainSection {
        int epochs = 50;
        int batch_size = 128;
        double learning_rate = 1e-3;
        double dropout = 0.25;
        bool operator==(const TrainSection&) const = default;
    } train;

    struct ContextSection {
        bool normalize = true;
        bool operator==(const ContextSection&) const = default;
    } contexts;

    struct SamplerSection {
        std::string mode = "ddim";
        int steps = 200;
        double guidance = 0.5;
        bool operator==(const SamplerSection&) const = default;
    } sampler;

    struct SampleSection {
        int identities = 100;
        int samples_per_id = 10;
        bool operator==(const SampleSection&) const = default;
    } sample;

    struct EvalSection {
        std::string pairing = "exhaustive";
        int64_t impostor_pairs = 10000;
        int hist_bins = 50;
        int folds = 10;
        bool operator==(const EvalSection&) const = default;
    } eval;

    struct RunSection {
        bool parallel = true;
        bool operator==(const RunSection&) const = default;
    } run;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& config);

// Applies one "key=value" override in place; unknown keys throw.
void apply_override(RunConfig& config, const std::string& assignment);

RunConfig load_config_file(const std::string& path);

}  // namespace nfd
