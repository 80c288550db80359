#include "arpsentinel/drift.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/rng.hpp"

namespace arpsentinel {

FeatureHistogram build_histogram(const std::vector<FeatureVector>& vectors, std::size_t bins) {
    if (bins == 0) throw ConfigError("drift.bins must be >= 1");

    FeatureHistogram h;
    h.bins = bins;
    if (vectors.empty()) return h;

    const std::size_t d = vectors.front().size();
    h.mass.assign(d, std::vector<double>(bins, 0.0));
    for (const FeatureVector& v : vectors) {
        if (v.size() != d) throw DataError("inhomogeneous feature dimensions in histogram input");
        for (std::size_t j = 0; j < d; ++j) {
            const auto raw = static_cast<std::int64_t>(
                std::floor(v[j] * static_cast<double>(bins)));
            const std::size_t bin = static_cast<std::size_t>(
                std::clamp<std::int64_t>(raw, 0, static_cast<std::int64_t>(bins) - 1));
            h.mass[j][bin] += 1.0;
        }
    }
    h.sample_count = vectors.size();
    const double norm = 1.0 / static_cast<double>(h.sample_count);
    for (auto& feature : h.mass) {
        for (double& m : feature) m *= norm;
    }
    return h;
}

DriftReport drift_delta(const FeatureHistogram& prev, const FeatureHistogram& curr,
                        double threshold, std::int64_t window_id) {
    if (prev.empty() || curr.empty()) {
        throw DataError("drift_delta needs two non-empty histograms");
    }
    if (prev.dim() != curr.dim() || prev.bins != curr.bins) {
        throw DataError("histogram shapes differ: " + std::to_string(prev.dim()) + "x" +
                        std::to_string(prev.bins) + " vs " + std::to_string(curr.dim()) + "x" +
                        std::to_string(curr.bins));
    }

    DriftReport report;
    report.threshold = threshold;
    report.window_id = window_id;
    report.per_feature_delta.resize(prev.dim());
    double sum = 0.0;
    for (std::size_t j = 0; j < prev.dim(); ++j) {
        double l1 = 0.0;
        for (std::size_t b = 0; b < prev.bins; ++b) {
            l1 += std::abs(prev.mass[j][b] - curr.mass[j][b]);
        }
        report.per_feature_delta[j] = 0.5 * l1;
        sum += report.per_feature_delta[j];
    }
    report.delta = sum / static_cast<double>(prev.dim());
    report.triggered = report.delta > threshold;
    return report;
}

namespace {

LabeledDataset concat_windows(const std::vector<const LabeledDataset*>& windows) {
    LabeledDataset out;
    for (const LabeledDataset* w : windows) {
        if (out.feature_names.empty()) out.feature_names = w->feature_names;
        for (std::size_t i = 0; i < w->size(); ++i) {
            out.push_back(w->features[i], w->labels[i]);
        }
    }
    return out;
}

}  // namespace

MonitorResult monitor_stream(const EnsembleModel& model, const FeatureHistogram& reference,
                             const std::vector<LabeledDataset>& windows,
                             const MonitorPolicy& policy) {
    if (reference.empty()) {
        throw DataError("monitor_stream needs a non-empty reference histogram");
    }
    if (policy.retrain_windows < 1) throw ConfigError("drift.retrain_windows must be >= 1");

    MonitorResult result;
    result.final_model = model;
    FeatureHistogram current_reference = reference;
    std::uint32_t version = 0;

    for (std::size_t t = 0; t < windows.size(); ++t) {
        const LabeledDataset& window = windows[t];
        MonitorRecord record;
        record.model_version = version;
        record.drift.window_id = static_cast<std::int64_t>(t);
        record.drift.threshold = policy.threshold;

        if (window.size() > 0) {
            const LabeledDataset scaled = normalize_apply(result.final_model.scaler, window);
            std::vector<Label> predicted;
            predicted.reserve(scaled.size());
            for (const FeatureVector& x : scaled.features) {
                std::vector<Label> votes;
                votes.reserve(result.final_model.layer_count());
                for (const LayerModel& layer : result.final_model.layers) {
                    votes.push_back(predict_layer(layer, x));
                }
                predicted.push_back(weighted_vote(result.final_model.weights, votes));
            }
            record.metrics = derive(confusion(predicted, window.labels), "ensemble");

            const FeatureHistogram window_hist = build_histogram(scaled.features, policy.bins);
            record.drift = drift_delta(current_reference, window_hist, policy.threshold,
                                       static_cast<std::int64_t>(t));
        }

        if (record.drift.triggered) {
            std::vector<const LabeledDataset*> recent;
            const std::size_t first = t + 1 >= policy.retrain_windows
                                          ? t + 1 - policy.retrain_windows
                                          : 0;
            for (std::size_t w = first; w <= t; ++w) recent.push_back(&windows[w]);
            const LabeledDataset retrain_data = concat_windows(recent);

            if (retrain_data.count(Label::attack) == 0 || retrain_data.count(Label::benign) == 0) {
                record.retrain_skipped = true;
            } else {
                EnsembleConfig cfg = policy.retrain_config;
                cfg.seed = derive_seed(policy.retrain_config.seed, version);
                EnsembleModel retrained = train_ensemble(retrain_data, cfg);
                current_reference = build_histogram(
                    normalize_apply(retrained.scaler, retrain_data).features, policy.bins);
                result.final_model = std::move(retrained);
                ++version;
                record.retrained = true;
            }
        }

        result.records.push_back(std::move(record));
    }
    result.model_versions = version + 1;
    return result;
}

std::string monitor_record_to_json(const MonitorRecord& record) {
    nlohmann::json j;
    j["window_id"] = record.drift.window_id;
    j["delta"] = record.drift.delta;
    j["per_feature_delta"] = record.drift.per_feature_delta;
    j["threshold"] = record.drift.threshold;
    j["triggered"] = record.drift.triggered;
    j["model_version"] = record.model_version;
    j["retrained"] = record.retrained;
    j["retrain_skipped"] = record.retrain_skipped;
    if (record.metrics) {
        j["metrics"] = nlohmann::json::parse(metrics_to_json(*record.metrics));
    } else {
        j["metrics"] = nullptr;
    }
    return j.dump();
}

void write_audit_jsonl(const std::vector<MonitorRecord>& records,
                       const std::filesystem::path& path, std::string_view config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    if (!config_hash.empty()) {
        nlohmann::json header;
        header["format"] = "arp-audit";
        header["version"] = 1;
        header["config"] = config_hash;
        out << header.dump() << '\n';
    }
    for (const MonitorRecord& record : records) {
        out << monitor_record_to_json(record) << '\n';
    }
    if (!out.flush()) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace arpsentinel
