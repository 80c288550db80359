#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "arpsentinel/dataset.hpp"
#include "arpsentinel/sim.hpp"

namespace arpsentinel {

struct WindowSpec {
    std::int64_t window_ticks = 100;
    std::int64_t stride_ticks = 50;
};

void validate_window_spec(const WindowSpec& spec);

inline constexpr std::size_t kFeatureCount = 8;
const std::array<const char*, kFeatureCount>& default_feature_names();

// Slides windows of `spec.window_ticks` ticks (step `stride_ticks`) over the
// frame stream and emits one example per (source node, window) that saw at
// least one frame from that source. Frames must be time-ordered; stored
// labels are revalidated against `truth`. A window is attack-labeled when
// any of its source's frames is.
//
// Features per example: reply count, request count, replies without a
// matching in-window request, gratuitous reply count, distinct sender ips,
// sender-ip/mac bindings that contradict the previous window's network-wide
// bindings, mean inter-arrival ticks, frames per tick.
LabeledDataset extract_features(const std::vector<ArpFrame>& frames, const WindowSpec& spec,
                                const GroundTruthTable& truth);

// Stratified, seeded train/test split. Keeps original example order inside
// each part. Per-class train counts are rounded, then clamped so both parts
// keep at least one example of each class.
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& dataset,
                                                        double train_fraction, std::uint64_t seed);

// Per-feature min-max statistics fitted on training data only.
struct Scaler {
    std::vector<double> min;
    std::vector<double> max;

    std::size_t dim() const { return min.size(); }
};

Scaler normalize_fit(const LabeledDataset& train);

// Maps each value to (v - min) / (max - min); a constant training feature
// maps to 0. Values outside the training range are not clipped.
FeatureVector normalize_apply(const Scaler& scaler, const FeatureVector& v);
LabeledDataset normalize_apply(const Scaler& scaler, const LabeledDataset& dataset);

}  // namespace arpsentinel
