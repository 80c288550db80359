#include "arpsentinel/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/rng.hpp"

namespace arpsentinel {

namespace {

double gini(std::uint64_t benign, std::uint64_t attack) {
    const double total = static_cast<double>(benign + attack);
    if (total == 0) return 0.0;
    const double pb = static_cast<double>(benign) / total;
    const double pa = static_cast<double>(attack) / total;
    return 1.0 - pb * pb - pa * pa;
}

struct BestSplit {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double weighted_gini = 0.0;
};

struct Grower {
    const LabeledDataset& data;
    const TreeParams& params;
    std::uint32_t features_per_split;
    Rng* feature_rng;
    std::vector<TreeNode> nodes;
    std::vector<std::size_t> feature_order;
    std::vector<std::pair<double, Label>> scratch;

    // Candidate features for one split: all of them in natural order, or a
    // seeded sample without replacement.
    std::span<const std::size_t> candidate_features() {
        const std::size_t d = data.dim();
        if (feature_order.size() != d) {
            feature_order.resize(d);
            std::iota(feature_order.begin(), feature_order.end(), 0);
        }
        if (features_per_split >= d || feature_rng == nullptr) {
            return {feature_order.data(), d};
        }
        for (std::size_t i = 0; i < features_per_split; ++i) {
            const std::size_t j = i + feature_rng->next_below(d - i);
            std::swap(feature_order[i], feature_order[j]);
        }
        return {feature_order.data(), features_per_split};
    }

    BestSplit find_split(const std::vector<std::size_t>& indices, double parent_gini) {
        BestSplit best;
        std::uint64_t total_benign = 0, total_attack = 0;
        for (std::size_t i : indices) {
            (data.labels[i] == Label::benign ? total_benign : total_attack)++;
        }
        const double total = static_cast<double>(indices.size());

        for (std::size_t f : candidate_features()) {
            scratch.clear();
            for (std::size_t i : indices) {
                scratch.emplace_back(data.features[i][f], data.labels[i]);
            }
            std::sort(scratch.begin(), scratch.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::uint64_t left_benign = 0, left_attack = 0;
            for (std::size_t pos = 0; pos + 1 < scratch.size(); ++pos) {
                (scratch[pos].second == Label::benign ? left_benign : left_attack)++;
                if (scratch[pos].first == scratch[pos + 1].first) continue;

                const std::uint64_t left_n = left_benign + left_attack;
                const std::uint64_t right_n = indices.size() - left_n;
                if (left_n < params.min_leaf || right_n < params.min_leaf) continue;

                const double weighted =
                    (static_cast<double>(left_n) * gini(left_benign, left_attack) +
                     static_cast<double>(right_n) *
                         gini(total_benign - left_benign, total_attack - left_attack)) /
                    total;
                if (weighted + 1e-12 >= parent_gini) continue;
                if (!best.found || weighted < best.weighted_gini) {
                    double threshold =
                        scratch[pos].first + (scratch[pos + 1].first - scratch[pos].first) / 2.0;
                    // Midpoint can collapse onto the upper value for adjacent
                    // doubles; fall back to the left value so `<=` still
                    // separates the two groups.
                    if (!(threshold < scratch[pos + 1].first)) threshold = scratch[pos].first;
                    best = {true, f, threshold, weighted};
                }
            }
        }
        return best;
    }

    std::int32_t grow(std::vector<std::size_t>&& indices, std::uint32_t depth) {
        std::uint64_t benign = 0, attack = 0;
        for (std::size_t i : indices) {
            (data.labels[i] == Label::benign ? benign : attack)++;
        }

        const std::int32_t id = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();
        nodes[id].count_benign = benign;
        nodes[id].count_attack = attack;
        nodes[id].leaf_label = attack > benign ? Label::attack : Label::benign;

        const bool pure = benign == 0 || attack == 0;
        if (pure || depth >= params.max_depth || indices.size() < 2 * params.min_leaf) {
            return id;
        }
        const BestSplit best = find_split(indices, gini(benign, attack));
        if (!best.found) return id;

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : indices) {
            (data.features[i][best.feature] <= best.threshold ? left_idx : right_idx).push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();

        nodes[id].feature = static_cast<std::int32_t>(best.feature);
        nodes[id].threshold = best.threshold;
        const std::int32_t left = grow(std::move(left_idx), depth + 1);
        const std::int32_t right = grow(std::move(right_idx), depth + 1);
        nodes[id].left = left;
        nodes[id].right = right;
        return id;
    }
};

}  // namespace

DecisionTreeModel train_tree_on_indices(const LabeledDataset& train,
                                        const std::vector<std::size_t>& indices,
                                        const TreeParams& params,
                                        std::uint32_t features_per_split, Rng* feature_rng) {
    if (train.size() == 0 || indices.empty()) {
        throw DataError("cannot train a decision tree on an empty dataset");
    }
    if (params.min_leaf < 1) throw ConfigError("tree.min_leaf must be >= 1");

    Grower grower{train, params, features_per_split, feature_rng, {}, {}, {}};
    std::vector<std::size_t> root(indices);
    grower.grow(std::move(root), 0);

    DecisionTreeModel model;
    model.nodes = std::move(grower.nodes);
    model.max_depth = params.max_depth;
    model.min_leaf = params.min_leaf;
    model.dim = train.dim();
    return model;
}

DecisionTreeModel train_tree(const LabeledDataset& train, const TreeParams& params) {
    std::vector<std::size_t> all(train.size());
    std::iota(all.begin(), all.end(), 0);
    return train_tree_on_indices(train, all, params,
                                 static_cast<std::uint32_t>(train.dim()), nullptr);
}

Label predict_tree(const DecisionTreeModel& model, const FeatureVector& x) {
    if (x.size() != model.dim) {
        throw DataError("feature dimension " + std::to_string(x.size()) +
                        " does not match tree dimension " + std::to_string(model.dim));
    }
    if (model.nodes.empty()) throw DataError("decision tree has no nodes");

    const TreeNode* node = &model.nodes[0];
    while (!node->is_leaf()) {
        const std::int32_t next =
            x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                          : node->right;
        node = &model.nodes[static_cast<std::size_t>(next)];
    }
    return node->leaf_label;
}

}  // namespace arpsentinel
