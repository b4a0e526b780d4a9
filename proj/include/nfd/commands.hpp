#pragma once

#include <string>
#include <vector>

#include "nfd/config.hpp"
#include "nfd/contexts.hpp"
#include "nfd/io.hpp"
#include "nfd/trainer.hpp"

namespace nfd {

// Subcommand bodies, CLI-independent so tests can drive them directly.
// All of them are deterministic functions of (config, input files): rerunning
// one with identical inputs rewrites byte-identical outputs.

// Synthesizes the labeled training world and writes it as a dataset file.
void cmd_gen_data(const RunConfig& config, const std::string& out_path);

// Trains the noise predictor on a dataset file; writes a checkpoint.
void cmd_train(const RunConfig& config, const std::string& data_path,
               const std::string& out_path);

// Draws identity contexts, assigns negatives per the strategy, runs the
// reverse chains, and writes the dataset plus its assignment manifest
// (out_path + ".manifest.tsv").
void cmd_sample(const RunConfig& config, const std::string& checkpoint_path,
                Strategy strategy, const std::string& out_path);

// Scores a generated dataset and writes <prefix>metrics.csv plus the two
// score histograms <prefix>hist_genuine.csv / <prefix>hist_impostor.csv.
void cmd_eval(const RunConfig& config, const std::string& dataset_path,
              const std::string& out_prefix);

// Spread metrics over per-group accuracies; empty out_path prints to stdout.
void cmd_bias(const std::vector<double>& accuracies, const std::string& out_path);

// Evaluates several datasets into one tab-separated comparison table.
void cmd_report(const RunConfig& config, const std::vector<std::string>& dataset_paths,
                const std::string& out_path);

// Helpers shared with the tests.
TrainingSet training_set_from_generated(const GeneratedDataset& ds);
ScoreSet score_dataset(const RunConfig& config, const GeneratedDataset& ds);

}  // namespace nfd
