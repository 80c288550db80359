#include "arpsentinel/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/rng.hpp"

namespace arpsentinel {

void validate_window_spec(const WindowSpec& spec) {
    if (spec.window_ticks <= 0) throw ConfigError("window.window_ticks must be > 0");
    if (spec.stride_ticks <= 0) throw ConfigError("window.stride_ticks must be > 0");
    if (spec.stride_ticks > spec.window_ticks) {
        throw ConfigError("window.stride_ticks must be <= window_ticks");
    }
}

const std::array<const char*, kFeatureCount>& default_feature_names() {
    static const std::array<const char*, kFeatureCount> names = {
        "reply_count",          "request_count",   "unmatched_reply_count",
        "gratuitous_reply_count", "distinct_sender_ips", "binding_changes",
        "mean_interarrival_ticks", "frames_per_tick",
    };
    return names;
}

namespace {

// ip -> macs announced for it, observed across all sources in one window.
using BindingView = std::map<std::uint32_t, std::set<std::uint64_t>>;

}  // namespace

LabeledDataset extract_features(const std::vector<ArpFrame>& frames, const WindowSpec& spec,
                                const GroundTruthTable& truth) {
    validate_window_spec(spec);

    LabeledDataset dataset;
    dataset.feature_names.assign(default_feature_names().begin(), default_feature_names().end());
    if (frames.empty()) return dataset;

    if (frames.front().tick < 0) throw DataError("frame ticks must be non-negative");
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (i > 0 && frames[i].tick < frames[i - 1].tick) {
            throw DataError("frames are not time-ordered at index " + std::to_string(i));
        }
        if (truth.label_of(frames[i].sender_ip, frames[i].sender_mac) != frames[i].label) {
            throw DataError("frame " + std::to_string(i) +
                            " label disagrees with the ground-truth address table");
        }
    }

    const std::int64_t first_start =
        (frames.front().tick / spec.stride_ticks) * spec.stride_ticks;
    const std::int64_t last_tick = frames.back().tick;
    const double window_ticks = static_cast<double>(spec.window_ticks);

    BindingView prev_bindings;
    std::size_t window_begin = 0;  // frame index, advanced per stride

    for (std::int64_t start = first_start; start <= last_tick; start += spec.stride_ticks) {
        const std::int64_t stop = start + spec.window_ticks;
        while (window_begin < frames.size() && frames[window_begin].tick < start) {
            ++window_begin;
        }
        std::size_t window_end = window_begin;
        while (window_end < frames.size() && frames[window_end].tick < stop) {
            ++window_end;
        }

        // Requests seen in this window: target ip -> ticks asked.
        std::map<std::uint32_t, std::vector<std::int64_t>> request_ticks;
        BindingView bindings;
        std::map<std::uint32_t, std::vector<std::size_t>> by_source;
        for (std::size_t i = window_begin; i < window_end; ++i) {
            const ArpFrame& f = frames[i];
            by_source[f.src_node].push_back(i);
            bindings[f.sender_ip].insert(f.sender_mac);
            if (f.op == ArpOp::request) request_ticks[f.target_ip].push_back(f.tick);
        }

        for (const auto& [source, indices] : by_source) {
            double replies = 0, requests = 0, unmatched = 0, gratuitous = 0;
            std::set<std::uint32_t> sender_ips;
            std::map<std::uint32_t, std::set<std::uint64_t>> announced;
            bool any_attack = false;

            for (std::size_t idx : indices) {
                const ArpFrame& f = frames[idx];
                any_attack = any_attack || f.label == Label::attack;
                sender_ips.insert(f.sender_ip);
                announced[f.sender_ip].insert(f.sender_mac);
                if (f.op == ArpOp::request) {
                    requests += 1;
                } else {
                    replies += 1;
                    if (f.op == ArpOp::gratuitous_reply) gratuitous += 1;
                    auto asked = request_ticks.find(f.sender_ip);
                    const bool matched =
                        asked != request_ticks.end() && asked->second.front() < f.tick;
                    if (!matched) unmatched += 1;
                }
            }

            double binding_changes = 0;
            for (const auto& [ip, macs] : announced) {
                auto prev = prev_bindings.find(ip);
                if (prev == prev_bindings.end()) continue;
                const bool conflicts = std::any_of(
                    macs.begin(), macs.end(), [&](std::uint64_t mac) {
                        return std::any_of(prev->second.begin(), prev->second.end(),
                                           [&](std::uint64_t old) { return old != mac; });
                    });
                if (conflicts) binding_changes += 1;
            }

            double mean_interarrival = 0;
            if (indices.size() > 1) {
                const double span = static_cast<double>(frames[indices.back()].tick -
                                                        frames[indices.front()].tick);
                mean_interarrival = span / static_cast<double>(indices.size() - 1);
            }

            dataset.push_back({replies, requests, unmatched, gratuitous,
                               static_cast<double>(sender_ips.size()), binding_changes,
                               mean_interarrival,
                               static_cast<double>(indices.size()) / window_ticks},
                              any_attack ? Label::attack : Label::benign);
        }

        prev_bindings = std::move(bindings);
    }
    return dataset;
}

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& dataset,
                                                        double train_fraction,
                                                        std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie strictly between 0 and 1");
    }

    std::vector<std::size_t> benign_idx, attack_idx;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        (dataset.labels[i] == Label::benign ? benign_idx : attack_idx).push_back(i);
    }
    if (benign_idx.size() < 2 || attack_idx.size() < 2) {
        throw DataError("stratified split needs at least 2 examples per class, got " +
                        std::to_string(benign_idx.size()) + " benign / " +
                        std::to_string(attack_idx.size()) + " attack");
    }

    Rng rng(seed);
    std::vector<bool> in_train(dataset.size(), false);
    for (auto* indices : {&benign_idx, &attack_idx}) {
        for (std::size_t i = indices->size() - 1; i > 0; --i) {
            std::swap((*indices)[i], (*indices)[rng.next_below(i + 1)]);
        }
        const auto n = indices->size();
        auto take = static_cast<std::size_t>(
            std::llround(train_fraction * static_cast<double>(n)));
        take = std::clamp<std::size_t>(take, 1, n - 1);
        for (std::size_t i = 0; i < take; ++i) in_train[(*indices)[i]] = true;
    }

    LabeledDataset train, test;
    train.feature_names = test.feature_names = dataset.feature_names;
    train.provenance = test.provenance = dataset.provenance;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        (in_train[i] ? train : test).push_back(dataset.features[i], dataset.labels[i]);
    }
    return {std::move(train), std::move(test)};
}

Scaler normalize_fit(const LabeledDataset& train) {
    if (train.size() == 0) throw DataError("cannot fit a scaler on an empty dataset");
    const std::size_t d = train.dim();
    Scaler scaler;
    scaler.min.assign(d, std::numeric_limits<double>::infinity());
    scaler.max.assign(d, -std::numeric_limits<double>::infinity());
    for (const FeatureVector& v : train.features) {
        if (v.size() != d) throw DataError("inhomogeneous feature dimensions in dataset");
        for (std::size_t j = 0; j < d; ++j) {
            scaler.min[j] = std::min(scaler.min[j], v[j]);
            scaler.max[j] = std::max(scaler.max[j], v[j]);
        }
    }
    return scaler;
}

FeatureVector normalize_apply(const Scaler& scaler, const FeatureVector& v) {
    if (v.size() != scaler.dim()) {
        throw DataError("feature dimension " + std::to_string(v.size()) +
                        " does not match scaler dimension " + std::to_string(scaler.dim()));
    }
    FeatureVector out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double range = scaler.max[j] - scaler.min[j];
        out[j] = range > 0.0 ? (v[j] - scaler.min[j]) / range : 0.0;
    }
    return out;
}

LabeledDataset normalize_apply(const Scaler& scaler, const LabeledDataset& dataset) {
    LabeledDataset out;
    out.feature_names = dataset.feature_names;
    out.provenance = dataset.provenance;
    out.labels = dataset.labels;
    out.features.reserve(dataset.size());
    for (const FeatureVector& v : dataset.features) {
        out.features.push_back(normalize_apply(scaler, v));
    }
    return out;
}

}  // namespace arpsentinel
