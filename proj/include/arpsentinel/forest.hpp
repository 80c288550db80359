#pragma once

#include <cstdint>
#include <vector>

#include "arpsentinel/tree.hpp"

namespace arpsentinel {

struct ForestParams {
    std::uint32_t trees = 25;
    std::uint32_t features_per_split = 0;  // 0 means ceil(sqrt(d))
    bool bootstrap = true;  // off: every tree sees the full sample (tests)
    TreeParams tree;
    std::uint64_t seed = 0;
};

struct RandomForestModel {
    std::vector<DecisionTreeModel> trees;
    std::size_t dim = 0;
};

// Bagged CART trees: each tree trains on a bootstrap sample of size m with
// `features_per_split` random candidate features per split. Tree t draws
// all of its randomness from sub-seed t of `seed`, so training is
// deterministic and trees are independent (and trained in parallel when
// ARP_SENTINEL_THREADS allows).
RandomForestModel train_forest(const LabeledDataset& train, const ForestParams& params);

// Unweighted majority vote over trees; ties go to benign.
Label predict_forest(const RandomForestModel& model, const FeatureVector& x);

}  // namespace arpsentinel
