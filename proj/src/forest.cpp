#include "arpsentinel/forest.hpp"

#include <cmath>
#include <mutex>
#include <numeric>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/parallel.hpp"
#include "arpsentinel/rng.hpp"

namespace arpsentinel {

RandomForestModel train_forest(const LabeledDataset& train, const ForestParams& params) {
    if (train.size() == 0) throw DataError("cannot train a forest on an empty dataset");
    if (params.trees < 1) throw ConfigError("forest.trees must be >= 1");

    const std::size_t d = train.dim();
    const std::uint32_t features_per_split =
        params.features_per_split > 0
            ? params.features_per_split
            : static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    if (features_per_split > d) {
        throw ConfigError("forest.features_per_split exceeds feature dimension");
    }

    RandomForestModel model;
    model.dim = d;
    model.trees.resize(params.trees);

    parallel_for(params.trees, [&](std::size_t t) {
        Rng rng(derive_seed(params.seed, t));
        std::vector<std::size_t> sample(train.size());
        if (params.bootstrap) {
            for (auto& idx : sample) idx = rng.next_below(train.size());
        } else {
            std::iota(sample.begin(), sample.end(), 0);
        }
        model.trees[t] = train_tree_on_indices(train, sample, params.tree, features_per_split,
                                               features_per_split < d ? &rng : nullptr);
    });
    return model;
}

Label predict_forest(const RandomForestModel& model, const FeatureVector& x) {
    if (model.trees.empty()) throw DataError("random forest has no trees");
    std::size_t attack_votes = 0;
    for (const DecisionTreeModel& tree : model.trees) {
        if (predict_tree(tree, x) == Label::attack) ++attack_votes;
    }
    return 2 * attack_votes > model.trees.size() ? Label::attack : Label::benign;
}

}  // namespace arpsentinel
