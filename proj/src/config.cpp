#include "arpsentinel/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/rng.hpp"
#include "arpsentinel/textio.hpp"

namespace arpsentinel {

void derive_experiment_seeds(ExperimentConfig& cfg) {
    cfg.sim.rng_seed = derive_seed(cfg.master_seed, 0);
    cfg.ensemble.seed = derive_seed(cfg.master_seed, 2);
    cfg.drift.retrain_config = cfg.ensemble;
    cfg.drift.retrain_config.seed = derive_seed(cfg.master_seed, 3);
}

namespace {

std::vector<std::uint32_t> parse_id_list(std::string_view value) {
    std::vector<std::uint32_t> ids;
    if (trim(value).empty()) return ids;
    for (auto part : split(value, ',')) {
        ids.push_back(parse_int<std::uint32_t>(trim(part), "node id"));
    }
    return ids;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> parse_edge_list(std::string_view value) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    if (trim(value).empty()) return edges;
    for (auto part : split(value, ',')) {
        auto ends = split(trim(part), '-');
        if (ends.size() != 2) {
            throw DataError("edge '" + std::string(part) + "' is not of the form a-b");
        }
        edges.emplace_back(parse_int<std::uint32_t>(trim(ends[0]), "edge endpoint"),
                           parse_int<std::uint32_t>(trim(ends[1]), "edge endpoint"));
    }
    return edges;
}

std::vector<LayerKind> parse_layer_list(std::string_view value) {
    std::vector<LayerKind> layers;
    for (auto part : split(value, ',')) {
        layers.push_back(parse_layer_kind(trim(part)));
    }
    return layers;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();

    ExperimentConfig cfg;
    {
        std::ostringstream hex;
        hex << std::hex << fnv1a64(bytes);
        cfg.config_hash = hex.str();
    }

    // One setter per known section.key; anything else is a config error.
    using Setter = std::function<void(std::string_view)>;
    const std::map<std::string, Setter, std::less<>> setters = {
        {"experiment.label", [&](std::string_view v) { cfg.label = std::string(v); }},
        {"experiment.master_seed",
         [&](std::string_view v) { cfg.master_seed = parse_int<std::uint64_t>(v, "master_seed"); }},
        {"experiment.train_fraction",
         [&](std::string_view v) { cfg.train_fraction = parse_double(v, "train_fraction"); }},
        {"experiment.out_dir", [&](std::string_view v) { cfg.out_dir = std::string(v); }},
        {"sim.node_count",
         [&](std::string_view v) { cfg.sim.node_count = parse_int<std::uint32_t>(v, "node_count"); }},
        {"sim.attacker_ids", [&](std::string_view v) { cfg.sim.attacker_ids = parse_id_list(v); }},
        {"sim.duration_ticks",
         [&](std::string_view v) {
             cfg.sim.duration_ticks = parse_int<std::int64_t>(v, "duration_ticks");
         }},
        {"sim.benign_request_rate",
         [&](std::string_view v) {
             cfg.sim.benign_request_rate = parse_double(v, "benign_request_rate");
         }},
        {"sim.attack_rate",
         [&](std::string_view v) { cfg.sim.attack_rate = parse_double(v, "attack_rate"); }},
        {"sim.attack_start_tick",
         [&](std::string_view v) {
             cfg.sim.attack_start_tick = parse_int<std::int64_t>(v, "attack_start_tick");
         }},
        {"sim.attack_stop_tick",
         [&](std::string_view v) {
             cfg.sim.attack_stop_tick = parse_int<std::int64_t>(v, "attack_stop_tick");
         }},
        {"sim.topology", [&](std::string_view v) { cfg.sim.topology = parse_edge_list(v); }},
        {"window.window_ticks",
         [&](std::string_view v) {
             cfg.window.window_ticks = parse_int<std::int64_t>(v, "window_ticks");
         }},
        {"window.stride_ticks",
         [&](std::string_view v) {
             cfg.window.stride_ticks = parse_int<std::int64_t>(v, "stride_ticks");
         }},
        {"smote.enabled",
         [&](std::string_view v) {
             if (v == "true") cfg.ensemble.smote_enabled = true;
             else if (v == "false") cfg.ensemble.smote_enabled = false;
             else throw DataError("smote.enabled must be true or false");
         }},
        {"smote.k_neighbors",
         [&](std::string_view v) {
             cfg.ensemble.smote.k_neighbors = parse_int<std::uint32_t>(v, "k_neighbors");
         }},
        {"smote.target_ratio",
         [&](std::string_view v) {
             cfg.ensemble.smote.target_ratio = parse_double(v, "target_ratio");
         }},
        {"tree.max_depth",
         [&](std::string_view v) {
             cfg.ensemble.tree.max_depth = parse_int<std::uint32_t>(v, "max_depth");
         }},
        {"tree.min_leaf",
         [&](std::string_view v) {
             cfg.ensemble.tree.min_leaf = parse_int<std::uint32_t>(v, "min_leaf");
         }},
        {"forest.trees",
         [&](std::string_view v) {
             cfg.ensemble.forest.trees = parse_int<std::uint32_t>(v, "trees");
         }},
        {"forest.features_per_split",
         [&](std::string_view v) {
             cfg.ensemble.forest.features_per_split =
                 parse_int<std::uint32_t>(v, "features_per_split");
         }},
        {"mlp.hidden",
         [&](std::string_view v) { cfg.ensemble.mlp.hidden = parse_int<std::uint32_t>(v, "hidden"); }},
        {"mlp.learning_rate",
         [&](std::string_view v) { cfg.ensemble.mlp.learning_rate = parse_double(v, "learning_rate"); }},
        {"mlp.epochs",
         [&](std::string_view v) { cfg.ensemble.mlp.epochs = parse_int<std::uint32_t>(v, "epochs"); }},
        {"mlp.batch_size",
         [&](std::string_view v) {
             cfg.ensemble.mlp.batch_size = parse_int<std::uint32_t>(v, "batch_size");
         }},
        {"ensemble.layers", [&](std::string_view v) { cfg.ensemble.layers = parse_layer_list(v); }},
        {"ensemble.validation_fraction",
         [&](std::string_view v) {
             cfg.ensemble.validation_fraction = parse_double(v, "validation_fraction");
         }},
        {"drift.threshold",
         [&](std::string_view v) { cfg.drift.threshold = parse_double(v, "threshold"); }},
        {"drift.bins",
         [&](std::string_view v) { cfg.drift.bins = parse_int<std::size_t>(v, "bins"); }},
        {"drift.retrain_windows",
         [&](std::string_view v) {
             cfg.drift.retrain_windows = parse_int<std::size_t>(v, "retrain_windows");
         }},
        {"drift.stream_window_ticks",
         [&](std::string_view v) {
             cfg.stream_window_ticks = parse_int<std::int64_t>(v, "stream_window_ticks");
         }},
        {"monitor.model", [&](std::string_view v) { cfg.monitor_model = std::string(v); }},
        {"monitor.trace", [&](std::string_view v) { cfg.monitor_trace = std::string(v); }},
    };

    std::istringstream stream(bytes);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty() || text.front() == '#' || text.front() == ';') continue;
        const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";

        if (text.front() == '[') {
            if (text.back() != ']' || text.size() < 3) {
                throw ConfigError(where + "malformed section header '" + std::string(text) + "'");
            }
            section = std::string(trim(text.substr(1, text.size() - 2)));
            continue;
        }

        const std::size_t eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(where + "expected key = value, got '" + std::string(text) + "'");
        }
        const std::string key =
            (section.empty() ? "" : section + ".") + std::string(trim(text.substr(0, eq)));
        const std::string_view value = trim(text.substr(eq + 1));

        const auto setter = setters.find(key);
        if (setter == setters.end()) {
            throw ConfigError(where + "unknown config key '" + key + "'");
        }
        try {
            setter->second(value);
        } catch (const DataError& e) {
            throw ConfigError(where + "bad value for '" + key + "': " + e.what());
        }
    }

    derive_experiment_seeds(cfg);
    return cfg;
}

std::string config_hash_token(const ExperimentConfig& cfg) {
    return "config=" + cfg.config_hash;
}

}  // namespace arpsentinel
