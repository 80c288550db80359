#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "arpsentinel/drift.hpp"
#include "arpsentinel/ensemble.hpp"
#include "arpsentinel/featurize.hpp"
#include "arpsentinel/sim.hpp"
#include "arpsentinel/smote.hpp"

namespace arpsentinel {

// One experiment, end to end. Parsed from a flat [section] key = value
// file; every seed below is derived from master_seed (sub-seed i is the
// (i+1)-th splitmix64 output): 0 simulator, 1 train/test split,
// 2 ensemble, 3 monitor retraining.
struct ExperimentConfig {
    std::string label = "default";
    std::uint64_t master_seed = 42;
    double train_fraction = 0.8;
    std::filesystem::path out_dir = "runs/default";

    SimConfig sim;
    WindowSpec window;
    EnsembleConfig ensemble;  // carries smote/tree/forest/mlp params

    MonitorPolicy drift;
    std::int64_t stream_window_ticks = 1000;
    std::filesystem::path monitor_model;  // empty: <out>/model.txt
    std::filesystem::path monitor_trace;  // empty: <out>/trace.tsv

    std::string config_hash;  // FNV-1a of the config file bytes, as hex
};

// Applies the documented master-seed derivation to all sub-configs.
void derive_experiment_seeds(ExperimentConfig& cfg);

ExperimentConfig parse_experiment_config(const std::filesystem::path& path);

// `config=<hex>` token carried in artifact headers.
std::string config_hash_token(const ExperimentConfig& cfg);

}  // namespace arpsentinel
