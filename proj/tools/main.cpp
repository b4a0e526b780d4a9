#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nfd/commands.hpp"
#include "nfd/errors.hpp"

namespace {

struct GlobalArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    int64_t seed = -1;
    bool seed_given = false;
};

nfd::RunConfig resolve_config(const GlobalArgs& args) {
    nfd::RunConfig config;
    if (!args.config_path.empty()) {
        config = nfd::load_config_file(args.config_path);
    }
    for (const std::string& assignment : args.overrides) {
        nfd::apply_override(config, assignment);
    }
    if (args.seed_given) {
        config.seed = static_cast<uint64_t>(args.seed);
    }
    return config;
}

void add_global_options(CLI::App* cmd, GlobalArgs& args) {
    cmd->add_option("--config", args.config_path, "config file (key = value lines)");
    cmd->add_option("--set", args.overrides, "override a config key, key=value")
        ->take_all();
    cmd->add_option("--seed", args.seed, "override the global seed")
        ->each([&args](const std::string&) { args.seed_given = true; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"identity-conditioned diffusion sandbox with negative guidance"};
    app.require_subcommand(1);
    GlobalArgs args;

    auto* gen = app.add_subcommand("gen-data", "synthesize the labeled toy world");
    std::string gen_out = "toy.nfd";
    add_global_options(gen, args);
    gen->add_option("--out", gen_out, "output dataset path");

    auto* train = app.add_subcommand("train", "train the noise predictor");
    std::string train_data, train_out = "model.nfdc";
    add_global_options(train, args);
    train->add_option("data", train_data, "training dataset path")->required();
    train->add_option("--out", train_out, "output checkpoint path");

    auto* sample = app.add_subcommand("sample", "generate an identity dataset");
    std::string sample_ck, sample_out = "samples.nfd", sample_strategy = "far";
    add_global_options(sample, args);
    sample->add_option("checkpoint", sample_ck, "model checkpoint path")->required();
    sample->add_option("--strategy", sample_strategy,
                       "baseline|close|rand|mid|far|null");
    sample->add_option("--out", sample_out, "output dataset path");

    auto* eval = app.add_subcommand("eval", "score a dataset and write metrics");
    std::string eval_data, eval_out = "eval_";
    add_global_options(eval, args);
    eval->add_option("dataset", eval_data, "dataset path")->required();
    eval->add_option("--out", eval_out, "output file prefix");

    auto* bias = app.add_subcommand("bias", "spread metrics over group accuracies");
    std::vector<double> bias_accs;
    std::string bias_out;
    bias->add_option("accuracies", bias_accs, "per-group accuracies in percent")
        ->required()
        ->expected(-2);
    bias->add_option("--out", bias_out, "output csv path (default stdout)");

    auto* report = app.add_subcommand("report", "compare several datasets");
    std::vector<std::string> report_data;
    std::string report_out = "report.tsv";
    add_global_options(report, args);
    report->add_option("datasets", report_data, "dataset paths")
        ->required()
        ->expected(-1);
    report->add_option("--out", report_out, "output tsv path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            nfd::cmd_gen_data(resolve_config(args), gen_out);
        } else if (train->parsed()) {
            nfd::cmd_train(resolve_config(args), train_data, train_out);
        } else if (sample->parsed()) {
            nfd::cmd_sample(resolve_config(args), sample_ck,
                            nfd::parse_strategy(sample_strategy), sample_out);
        } else if (eval->parsed()) {
            nfd::cmd_eval(resolve_config(args), eval_data, eval_out);
        } else if (bias->parsed()) {
            nfd::cmd_bias(bias_accs, bias_out);
        } else if (report->parsed()) {
            nfd::cmd_report(resolve_config(args), report_data, report_out);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
