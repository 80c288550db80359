#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "arpsentinel/config.hpp"
#include "arpsentinel/errors.hpp"
#include "arpsentinel/rng.hpp"

using namespace arpsentinel;
namespace fs = std::filesystem;

namespace {

fs::path write_config(const char* name, const std::string& body) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("a full config parses into every section") {
    const fs::path path = write_config("arpsentinel_full.cfg", R"(# experiment
[experiment]
label = demo
master_seed = 99
train_fraction = 0.75
out_dir = runs/demo

[sim]
node_count = 12
attacker_ids = 3,7
duration_ticks = 5000
benign_request_rate = 40
attack_rate = 80
attack_start_tick = 1000
attack_stop_tick = 4000
topology = 0-1,1-2,2-3,3-4,4-5,5-6,6-7,7-8,8-9,9-10,10-11

[window]
window_ticks = 200
stride_ticks = 100

[smote]
enabled = false
k_neighbors = 3
target_ratio = 0.9

[tree]
max_depth = 6
min_leaf = 4

[forest]
trees = 11
features_per_split = 2

[mlp]
hidden = 8
learning_rate = 0.1
epochs = 50
batch_size = 16

[ensemble]
layers = tree,mlp
validation_fraction = 0.25

[drift]
threshold = 0.3
bins = 10
retrain_windows = 4
stream_window_ticks = 500

[monitor]
model = runs/demo/model.txt
trace = runs/demo/trace.tsv
)");

    const ExperimentConfig cfg = parse_experiment_config(path);
    CHECK(cfg.label == "demo");
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.train_fraction == 0.75);
    CHECK(cfg.sim.node_count == 12);
    CHECK(cfg.sim.attacker_ids == std::vector<std::uint32_t>{3, 7});
    CHECK(cfg.sim.topology.size() == 11);
    CHECK(cfg.window.window_ticks == 200);
    CHECK_FALSE(cfg.ensemble.smote_enabled);
    CHECK(cfg.ensemble.smote.k_neighbors == 3);
    CHECK(cfg.ensemble.tree.max_depth == 6);
    CHECK(cfg.ensemble.forest.trees == 11);
    CHECK(cfg.ensemble.mlp.hidden == 8);
    CHECK(cfg.ensemble.layers == std::vector<LayerKind>{LayerKind::tree, LayerKind::mlp});
    CHECK(cfg.ensemble.validation_fraction == 0.25);
    CHECK(cfg.drift.threshold == 0.3);
    CHECK(cfg.drift.bins == 10);
    CHECK(cfg.stream_window_ticks == 500);
    CHECK(cfg.monitor_model == fs::path("runs/demo/model.txt"));
    CHECK_FALSE(cfg.config_hash.empty());

    // Seeds follow the documented splitmix derivation from the master seed.
    CHECK(cfg.sim.rng_seed == derive_seed(99, 0));
    CHECK(cfg.ensemble.seed == derive_seed(99, 2));
    CHECK(cfg.drift.retrain_config.seed == derive_seed(99, 3));
    // The retrain config inherits the ensemble section.
    CHECK(cfg.drift.retrain_config.layers == cfg.ensemble.layers);
    fs::remove(path);
}

TEST_CASE("defaults survive an almost-empty config") {
    const fs::path path = write_config("arpsentinel_min.cfg", "[experiment]\nmaster_seed = 1\n");
    const ExperimentConfig cfg = parse_experiment_config(path);
    CHECK(cfg.sim.node_count == 20);
    CHECK(cfg.window.window_ticks == 100);
    CHECK(cfg.ensemble.smote_enabled);
    CHECK(cfg.ensemble.layers.size() == 3);
    CHECK(cfg.drift.threshold == 0.25);
    fs::remove(path);
}

TEST_CASE("unknown keys are config errors naming the key") {
    const fs::path path =
        write_config("arpsentinel_bad_key.cfg", "[sim]\nnode_cout = 5\n");
    try {
        parse_experiment_config(path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("sim.node_cout") != std::string::npos);
    }
    fs::remove(path);
}

TEST_CASE("bad values are config errors naming file and line") {
    const fs::path path =
        write_config("arpsentinel_bad_value.cfg", "[sim]\nnode_count = many\n");
    try {
        parse_experiment_config(path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
        CHECK(std::string(e.what()).find("node_count") != std::string::npos);
    }
    fs::remove(path);
}

TEST_CASE("config hash changes with content") {
    const fs::path a = write_config("arpsentinel_hash_a.cfg", "[experiment]\nmaster_seed = 1\n");
    const fs::path b = write_config("arpsentinel_hash_b.cfg", "[experiment]\nmaster_seed = 2\n");
    CHECK(parse_experiment_config(a).config_hash != parse_experiment_config(b).config_hash);
    CHECK(parse_experiment_config(a).config_hash == parse_experiment_config(a).config_hash);
    fs::remove(a);
    fs::remove(b);
}

TEST_CASE("missing config file is a config error") {
    CHECK_THROWS_AS(parse_experiment_config(fs::temp_directory_path() / "nope.cfg"),
                    ConfigError);
}
