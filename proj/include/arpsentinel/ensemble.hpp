#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "arpsentinel/dataset.hpp"
#include "arpsentinel/featurize.hpp"
#include "arpsentinel/forest.hpp"
#include "arpsentinel/metrics.hpp"
#include "arpsentinel/mlp.hpp"
#include "arpsentinel/smote.hpp"
#include "arpsentinel/tree.hpp"

namespace arpsentinel {

enum class LayerKind : std::uint8_t { tree, forest, mlp };

const char* layer_kind_name(LayerKind kind);
LayerKind parse_layer_kind(std::string_view s);

using LayerModel = std::variant<DecisionTreeModel, RandomForestModel, MlpModel>;

LayerKind layer_kind(const LayerModel& layer);
Label predict_layer(const LayerModel& layer, const FeatureVector& x);

struct EnsembleConfig {
    std::vector<LayerKind> layers = {LayerKind::tree, LayerKind::forest, LayerKind::mlp};
    double validation_fraction = 0.2;  // held out for the accuracy weights
    bool smote_enabled = true;
    SmoteConfig smote;
    TreeParams tree;
    ForestParams forest;
    MlpParams mlp;
    std::uint64_t seed = 0;
};

// Trained layers plus their accuracy-derived voting weights and the feature
// scaler everything is evaluated through.
struct EnsembleModel {
    std::vector<LayerModel> layers;
    std::vector<double> weights;                 // sum to 1, each >= 0
    std::vector<double> validation_accuracies;   // one per layer
    Scaler scaler;
    std::size_t dim = 0;

    std::size_t layer_count() const { return layers.size(); }
    std::string layer_name(std::size_t l) const;
};

// w_l = Acc_l / sum_k Acc_k. All-zero accuracies fall back to uniform
// weights so the result still sums to 1.
std::vector<double> accuracy_weights(std::span<const double> accuracies);

// Weighted majority vote: each class scores the summed weights of the
// layers voting for it; the higher score wins and exact ties (difference
// within 1e-12) resolve to benign.
Label weighted_vote(std::span<const double> weights, std::span<const Label> votes);

// Splits `train` into stratified fit/validation folds, min-max scales on
// the fit fold, balances the fit fold with SMOTE (k shrinks to the largest
// feasible value on tiny folds, and the step is skipped when no neighbor
// exists), trains every configured layer on it, then weights layers by
// their validation-fold accuracy.
EnsembleModel train_ensemble(const LabeledDataset& train, const EnsembleConfig& cfg);

Label predict(const EnsembleModel& model, const FeatureVector& x);

struct EvaluationReport {
    std::vector<MetricsReport> layers;
    MetricsReport ensemble;

    std::vector<MetricsReport> all() const;
};

EvaluationReport evaluate(const EnsembleModel& model, const LabeledDataset& test);

}  // namespace arpsentinel
