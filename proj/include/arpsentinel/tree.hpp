#pragma once

#include <cstdint>
#include <vector>

#include "arpsentinel/dataset.hpp"

namespace arpsentinel {

class Rng;

struct TreeParams {
    std::uint32_t max_depth = 8;
    std::uint32_t min_leaf = 5;
};

// Flat node store; node 0 is the root. Split nodes carry feature/threshold
// and child indices; leaves carry the majority label and class counts.
struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    Label leaf_label = Label::benign;
    std::uint64_t count_benign = 0;
    std::uint64_t count_attack = 0;

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTreeModel {
    std::vector<TreeNode> nodes;
    std::uint32_t max_depth = 8;
    std::uint32_t min_leaf = 5;
    std::size_t dim = 0;
};

// Greedy CART growth minimizing weighted Gini impurity. Splits send
// values <= threshold left, keep min_leaf examples on both sides, and stop
// at max_depth, pure nodes, or when no split reduces impurity. Leaf ties go
// to benign. Deterministic.
DecisionTreeModel train_tree(const LabeledDataset& train, const TreeParams& params);

// Forest variant: `feature_rng` draws `features_per_split` candidate
// features at each split (all features when it equals the dimension).
DecisionTreeModel train_tree_on_indices(const LabeledDataset& train,
                                        const std::vector<std::size_t>& indices,
                                        const TreeParams& params,
                                        std::uint32_t features_per_split, Rng* feature_rng);

Label predict_tree(const DecisionTreeModel& model, const FeatureVector& x);

}  // namespace arpsentinel
