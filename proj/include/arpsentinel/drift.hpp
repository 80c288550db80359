#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arpsentinel/dataset.hpp"
#include "arpsentinel/ensemble.hpp"
#include "arpsentinel/metrics.hpp"

namespace arpsentinel {

// Per-feature fixed-bin histograms over [0,1], each normalized to a
// probability vector. A sample_count of 0 marks "no reference yet".
struct FeatureHistogram {
    std::size_t bins = 20;
    std::vector<std::vector<double>> mass;  // [feature][bin], sums to 1
    std::uint64_t sample_count = 0;

    bool empty() const { return sample_count == 0; }
    std::size_t dim() const { return mass.size(); }
};

// Values outside [0,1] clamp into the edge bins.
FeatureHistogram build_histogram(const std::vector<FeatureVector>& vectors,
                                 std::size_t bins = 20);

struct DriftReport {
    double delta = 0.0;                    // mean per-feature distance, in [0,1]
    std::vector<double> per_feature_delta;
    double threshold = 0.0;
    bool triggered = false;
    std::int64_t window_id = 0;
};

// Distribution distance between two histograms: per feature, half the L1
// distance between the bin mass vectors (total variation, in [0,1]);
// overall delta is the mean across features. Triggers when delta exceeds
// the threshold.
DriftReport drift_delta(const FeatureHistogram& prev, const FeatureHistogram& curr,
                        double threshold = 0.25, std::int64_t window_id = 0);

struct MonitorPolicy {
    double threshold = 0.25;
    std::size_t bins = 20;
    std::size_t retrain_windows = 5;  // labeled windows fed to a retrain
    EnsembleConfig retrain_config;    // seed is re-derived per retrain
};

// One audit entry per incoming window.
struct MonitorRecord {
    DriftReport drift;
    std::optional<MetricsReport> metrics;  // absent for an empty window
    std::uint32_t model_version = 0;       // version that scored this window
    bool retrained = false;
    bool retrain_skipped = false;  // drift fired but the fold lacked a class
};

struct MonitorResult {
    std::vector<MonitorRecord> records;
    EnsembleModel final_model;
    std::uint32_t model_versions = 1;  // 1 + executed retrains
};

// The feedback loop: scores each window with the current model, measures
// drift of the window's (scaled) feature distribution against the
// reference, and on a trigger retrains on the most recent
// `retrain_windows` labeled windows, swapping in the new model and
// resetting the reference to the retraining data's histogram.
MonitorResult monitor_stream(const EnsembleModel& model, const FeatureHistogram& reference,
                             const std::vector<LabeledDataset>& windows,
                             const MonitorPolicy& policy);

std::string monitor_record_to_json(const MonitorRecord& record);

// One JSON object per window. A non-empty config hash prepends a
// `{"format":"arp-audit","version":1,"config":...}` header object.
void write_audit_jsonl(const std::vector<MonitorRecord>& records,
                       const std::filesystem::path& path, std::string_view config_hash = {});

}  // namespace arpsentinel
