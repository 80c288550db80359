#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "arpsentinel/sim.hpp"

namespace arpsentinel {

using FeatureVector = std::vector<double>;

// Windowed per-source feature vectors with their labels. `features` and
// `labels` run in parallel; every vector has the same dimension.
struct LabeledDataset {
    std::vector<FeatureVector> features;
    std::vector<Label> labels;
    std::vector<std::string> feature_names;
    std::string provenance;  // source trace id + window params, in-memory only

    std::size_t size() const { return features.size(); }
    std::size_t dim() const { return features.empty() ? feature_names.size() : features.front().size(); }
    std::size_t count(Label l) const;
    void push_back(FeatureVector v, Label l);
};

// Dataset file: `#arp-dataset v1 d=<d> features=<names>` header, then one
// `label<TAB>v1,...,vd` record per example.
void write_dataset(const LabeledDataset& dataset, const std::filesystem::path& path,
                   std::string_view header_extra = {});
LabeledDataset read_dataset(const std::filesystem::path& path);

}  // namespace arpsentinel
