#include "nfd/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <utility>

#include "nfd/biometrics.hpp"
#include "nfd/errors.hpp"
#include "nfd/sampler.hpp"
#include "nfd/toyworld.hpp"

namespace nfd {

namespace {

ExecPolicy policy_of(const RunConfig& config) {
    return config.run.parallel ? ExecPolicy::parallel : ExecPolicy::serial;
}

SamplerOptions sampler_options(const RunConfig& config) {
    SamplerOptions opts;
    opts.mode = parse_sampler_mode(config.sampler.mode);
    if (opts.mode == SamplerMode::none) {
        throw ConfigError("sampler.mode must be ddpm or ddim");
    }
    opts.steps = config.sampler.steps;
    opts.guidance_w = config.sampler.guidance;
    opts.seed = config.seed;
    return opts;
}

}  // namespace

TrainingSet training_set_from_generated(const GeneratedDataset& ds) {
    TrainingSet set;
    set.dim = static_cast<int>(ds.header.dim);
    set.cond_dim = set.dim;
    set.count = static_cast<int64_t>(ds.rows());
    set.x0.resize(ds.payload.size());
    for (std::size_t i = 0; i < ds.payload.size(); ++i) {
        set.x0[i] = static_cast<double>(ds.payload[i]);
    }
    set.cond.resize(set.x0.size());
    for (int64_t s = 0; s < set.count; ++s) {
        std::span<const double> row(set.x0.data() + s * set.dim,
                                    static_cast<std::size_t>(set.dim));
        std::vector<double> dir = extract_feature(row);
        std::copy(dir.begin(), dir.end(), set.cond.begin() + s * set.dim);
    }
    return set;
}

ScoreSet score_dataset(const RunConfig& config, const GeneratedDataset& ds) {
    PairingSpec pairing;
    if (config.eval.pairing == "exhaustive") {
        pairing.mode = PairingSpec::Mode::exhaustive;
    } else if (config.eval.pairing == "sampled") {
        pairing.mode = PairingSpec::Mode::sampled;
        pairing.budget = config.eval.impostor_pairs;
        pairing.seed = ds.header.seed;
    } else {
        throw ConfigError("eval.pairing must be exhaustive or sampled");
    }
    return score_pairs(static_cast<int>(ds.header.identities),
                       static_cast<int>(ds.header.per_identity),
                       static_cast<int>(ds.header.dim), ds.payload,
                       [](std::span<const double> x) { return extract_feature(x); },
                       pairing, policy_of(config));
}

void cmd_gen_data(const RunConfig& config, const std::string& out_path) {
    ToyDataset toy =
        make_dataset(config.data.identities, config.data.samples_per_id,
                     config.net.data_dim, config.data.noise_scale, config.seed);

    GeneratedDataset ds;
    ds.header.identities = static_cast<uint32_t>(toy.identities);
    ds.header.per_identity = static_cast<uint32_t>(toy.per_identity);
    ds.header.dim = static_cast<uint32_t>(toy.dim);
    ds.header.strategy = Strategy::baseline;
    ds.header.mode = SamplerMode::none;
    ds.header.steps = 0;
    ds.header.guidance_w = 0.0f;
    ds.header.seed = config.seed;
    ds.payload.resize(toy.samples.size());
    for (std::size_t i = 0; i < toy.samples.size(); ++i) {
        ds.payload[i] = static_cast<float>(toy.samples[i]);
    }
    write_dataset(out_path, ds);
    std::printf("wrote %d identities x %d samples (dim %d) to %s\n", toy.identities,
                toy.per_identity, toy.dim, out_path.c_str());
}

void cmd_train(const RunConfig& config, const std::string& data_path,
               const std::string& out_path) {
    GeneratedDataset ds = read_dataset(data_path);
    TrainingSet set = training_set_from_generated(ds);

    DenoiserConfig net_config;
    net_config.data_dim = config.net.data_dim;
    net_config.cond_dim = config.net.cond_dim;
    net_config.time_dim = config.net.time_dim;
    net_config.hidden_dims = config.net.hidden;

    TrainConfig train_config;
    train_config.epochs = config.train.epochs;
    train_config.batch_size = config.train.batch_size;
    train_config.learning_rate = config.train.learning_rate;
    train_config.dropout_prob = config.train.dropout;
    train_config.seed = config.seed;

    Schedule schedule = build_schedule(config.schedule.steps,
                                       config.schedule.beta_start,
                                       config.schedule.beta_end);
    TrainResult result =
        train(set, net_config, train_config, schedule, policy_of(config));

    Checkpoint ck;
    ck.T = schedule.T;
    ck.beta_start = schedule.beta_start;
    ck.beta_end = schedule.beta_end;
    ck.net = std::move(result.net);
    write_checkpoint(out_path, ck);

    for (std::size_t e = 0; e < result.report.epoch_mean_loss.size(); ++e) {
        std::printf("epoch %zu loss %.6f\n", e + 1,
                    result.report.epoch_mean_loss[e]);
    }
    std::printf("trained %d epochs in %.1fs, wrote %s\n", train_config.epochs,
                result.report.wall_seconds, out_path.c_str());
}

void cmd_sample(const RunConfig& config, const std::string& checkpoint_path,
                Strategy strategy, const std::string& out_path) {
    Checkpoint ck = read_checkpoint(checkpoint_path);
    Schedule schedule = build_schedule(ck.T, ck.beta_start, ck.beta_end);
    SamplerOptions opts = sampler_options(config);
    ExecPolicy policy = policy_of(config);

    std::vector<IdentityContext> contexts =
        draw_contexts(config.sample.identities, ck.net.config.cond_dim, config.seed,
                      config.contexts.normalize);
    std::vector<std::vector<double>> positives(contexts.size());
    for (std::size_t i = 0; i < contexts.size(); ++i) positives[i] = contexts[i].vec;

    std::string manifest;
    const std::vector<std::vector<double>>* negatives = nullptr;
    NegativeAssignment assignment;
    if (strategy == Strategy::baseline) {
        for (const IdentityContext& c : contexts) {
            manifest += std::to_string(c.id) + "\tbaseline\tNULL\n";
        }
    } else {
        assignment = select_negatives(contexts, strategy, config.seed, policy);
        negatives = &assignment.negatives;
        manifest = assignment_manifest(assignment);
    }

    std::vector<double> matrix =
        generate_matrix(ck.net, schedule, positives, negatives, opts,
                        config.sample.samples_per_id, policy);

    GeneratedDataset ds;
    ds.header.identities = static_cast<uint32_t>(contexts.size());
    ds.header.per_identity = static_cast<uint32_t>(config.sample.samples_per_id);
    ds.header.dim = static_cast<uint32_t>(ck.net.config.data_dim);
    ds.header.strategy = strategy;
    ds.header.mode = opts.mode;
    ds.header.steps = static_cast<uint32_t>(opts.steps);
    ds.header.guidance_w = static_cast<float>(opts.guidance_w);
    ds.header.seed = config.seed;
    ds.payload.resize(matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        ds.payload[i] = static_cast<float>(matrix[i]);
    }
    write_dataset(out_path, ds);
    write_text_file(out_path + ".manifest.tsv", manifest);
    std::printf("sampled %u identities x %u samples (%s, %s-%u, w=%.3f) to %s\n",
                ds.header.identities, ds.header.per_identity,
                strategy_name(strategy), sampler_mode_name(opts.mode),
                ds.header.steps, opts.guidance_w, out_path.c_str());
}

void cmd_eval(const RunConfig& config, const std::string& dataset_path,
              const std::string& out_prefix) {
    GeneratedDataset ds = read_dataset(dataset_path);
    ScoreSet scores = score_dataset(config, ds);
    Metrics metrics = compute_metrics(scores);

    std::optional<double> fold_acc;
    if (config.eval.folds >= 2) {
        // deterministic interleave of the two classes keyed by the dataset
        std::vector<LabeledScore> labeled;
        labeled.reserve(scores.genuine.size() + scores.impostor.size());
        for (double s : scores.genuine) labeled.push_back({s, true});
        for (double s : scores.impostor) labeled.push_back({s, false});
        Rng rng(ds.header.seed, make_stream(StreamDomain::eval_pairs, 2));
        for (std::size_t i = labeled.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng.next_below(i));
            std::swap(labeled[i - 1], labeled[j]);
        }
        fold_acc = fold_accuracy(labeled, config.eval.folds);
    }

    write_text_file(out_prefix + "metrics.csv", metrics_csv(metrics, fold_acc));
    std::vector<int64_t> gen_hist =
        histogram(scores.genuine, config.eval.hist_bins, -1.0, 1.0);
    std::vector<int64_t> imp_hist =
        histogram(scores.impostor, config.eval.hist_bins, -1.0, 1.0);
    write_text_file(out_prefix + "hist_genuine.csv",
                    histogram_csv(gen_hist, -1.0, 1.0));
    write_text_file(out_prefix + "hist_impostor.csv",
                    histogram_csv(imp_hist, -1.0, 1.0));
    std::printf("eer %.6f fmr100 %.6f fmr1000 %.6f fdr %.6f -> %smetrics.csv\n",
                metrics.eer.value, metrics.fmr100.value, metrics.fmr1000.value,
                metrics.fdr, out_prefix.c_str());
}

void cmd_bias(const std::vector<double>& accuracies, const std::string& out_path) {
    BiasReport report = bias_metrics(accuracies);
    std::string csv = bias_csv(report);
    if (out_path.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        write_text_file(out_path, csv);
        std::printf("std %.6f ser %.6f -> %s\n", report.stddev, report.ser,
                    out_path.c_str());
    }
}

void cmd_report(const RunConfig& config, const std::vector<std::string>& dataset_paths,
                const std::string& out_path) {
    if (dataset_paths.empty()) throw InputError("report needs at least one dataset");
    std::vector<ReportRow> rows;
    rows.reserve(dataset_paths.size());
    for (const std::string& path : dataset_paths) {
        GeneratedDataset ds = read_dataset(path);
        ReportRow row;
        row.name = path;
        row.strategy = ds.header.strategy;
        row.guidance_w = static_cast<double>(ds.header.guidance_w);
        row.metrics = compute_metrics(score_dataset(config, ds));
        rows.push_back(std::move(row));
    }
    write_text_file(out_path, report_tsv(rows));
    std::printf("compared %zu datasets -> %s\n", rows.size(), out_path.c_str());
}

}  // namespace nfd
