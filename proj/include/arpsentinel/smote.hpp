#pragma once

#include <cstdint>
#include <vector>

#include "arpsentinel/dataset.hpp"

namespace arpsentinel {

struct SmoteConfig {
    std::uint32_t k_neighbors = 5;
    double target_ratio = 1.0;  // minority/majority after resampling, in (0,1]
    std::uint64_t seed = 0;
};

// The class with fewer examples; ties resolve to attack (nothing needs
// resampling then anyway).
Label minority_label(const LabeledDataset& dataset);

// Indices (into `dataset`) of the k minority examples closest to minority
// example `i` by Euclidean distance, excluding i itself. Ties break toward
// the lower index.
std::vector<std::size_t> nearest_minority_neighbors(const LabeledDataset& dataset, std::size_t i,
                                                    std::uint32_t k);

// Classic SMOTE: appends synthetic minority examples x_i + u * (x_nn - x_i)
// with u ~ Uniform[0,1) and x_nn one of the k nearest minority neighbors,
// until minority/majority reaches target_ratio. Originals are preserved
// verbatim and come first; source points are cycled round-robin.
LabeledDataset smote_resample(const LabeledDataset& dataset, const SmoteConfig& cfg);

}  // namespace arpsentinel
