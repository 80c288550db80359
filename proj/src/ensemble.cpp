#include "arpsentinel/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/rng.hpp"

namespace arpsentinel {

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::tree: return "tree";
        case LayerKind::forest: return "forest";
        case LayerKind::mlp: return "mlp";
    }
    throw InternalError("unhandled LayerKind");
}

LayerKind parse_layer_kind(std::string_view s) {
    if (s == "tree") return LayerKind::tree;
    if (s == "forest") return LayerKind::forest;
    if (s == "mlp") return LayerKind::mlp;
    throw DataError("unknown layer kind '" + std::string(s) + "'");
}

LayerKind layer_kind(const LayerModel& layer) {
    if (std::holds_alternative<DecisionTreeModel>(layer)) return LayerKind::tree;
    if (std::holds_alternative<RandomForestModel>(layer)) return LayerKind::forest;
    return LayerKind::mlp;
}

Label predict_layer(const LayerModel& layer, const FeatureVector& x) {
    return std::visit(
        [&x](const auto& model) -> Label {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, DecisionTreeModel>) return predict_tree(model, x);
            else if constexpr (std::is_same_v<T, RandomForestModel>) return predict_forest(model, x);
            else return predict_mlp(model, x);
        },
        layer);
}

std::string EnsembleModel::layer_name(std::size_t l) const {
    return "layer" + std::to_string(l) + "_" + layer_kind_name(layer_kind(layers[l]));
}

std::vector<double> accuracy_weights(std::span<const double> accuracies) {
    if (accuracies.empty()) throw DataError("cannot weight an ensemble with no layers");
    double sum = 0.0;
    for (double acc : accuracies) {
        if (!(acc >= 0.0)) throw DataError("layer accuracy must be a non-negative number");
        sum += acc;
    }
    std::vector<double> weights(accuracies.size());
    if (sum <= 0.0) {
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(weights.size()));
        return weights;
    }
    for (std::size_t l = 0; l < weights.size(); ++l) weights[l] = accuracies[l] / sum;
    return weights;
}

Label weighted_vote(std::span<const double> weights, std::span<const Label> votes) {
    if (weights.size() != votes.size() || weights.empty()) {
        throw DataError("weighted vote needs one weight per layer vote");
    }
    double attack_score = 0.0, benign_score = 0.0;
    for (std::size_t l = 0; l < votes.size(); ++l) {
        (votes[l] == Label::attack ? attack_score : benign_score) += weights[l];
    }
    if (std::abs(attack_score - benign_score) <= 1e-12) return Label::benign;
    return attack_score > benign_score ? Label::attack : Label::benign;
}

namespace {

LayerModel train_layer(LayerKind kind, const LabeledDataset& fit, const EnsembleConfig& cfg,
                       std::uint64_t seed) {
    switch (kind) {
        case LayerKind::tree:
            return train_tree(fit, cfg.tree);
        case LayerKind::forest: {
            ForestParams params = cfg.forest;
            params.tree = cfg.tree;
            params.seed = seed;
            return train_forest(fit, params);
        }
        case LayerKind::mlp: {
            MlpParams params = cfg.mlp;
            params.seed = seed;
            return train_mlp(fit, params);
        }
    }
    throw InternalError("unhandled LayerKind");
}

}  // namespace

EnsembleModel train_ensemble(const LabeledDataset& train, const EnsembleConfig& cfg) {
    if (cfg.layers.empty()) throw ConfigError("ensemble.layers must name at least one layer");
    if (!(cfg.validation_fraction > 0.0 && cfg.validation_fraction < 1.0)) {
        throw ConfigError("ensemble.validation_fraction must lie strictly between 0 and 1");
    }
    if (train.count(Label::attack) == 0 || train.count(Label::benign) == 0) {
        throw DataError("ensemble training needs both classes present");
    }

    const std::uint64_t split_seed = derive_seed(cfg.seed, 0);
    const std::uint64_t smote_seed = derive_seed(cfg.seed, 1);

    auto [fit, validation] = split_dataset(train, 1.0 - cfg.validation_fraction, split_seed);

    const Scaler scaler = normalize_fit(fit);
    LabeledDataset fit_scaled = normalize_apply(scaler, fit);
    const LabeledDataset val_scaled = normalize_apply(scaler, validation);

    if (cfg.smote_enabled) {
        const std::size_t minority =
            std::min(fit_scaled.count(Label::attack), fit_scaled.count(Label::benign));
        SmoteConfig smote = cfg.smote;
        smote.seed = smote_seed;
        // A retraining fold can be tiny; shrink k instead of refusing, and
        // skip entirely when there is no neighbor to interpolate toward.
        smote.k_neighbors = static_cast<std::uint32_t>(
            std::min<std::size_t>(smote.k_neighbors, minority > 1 ? minority - 1 : 0));
        if (smote.k_neighbors >= 1) {
            fit_scaled = smote_resample(fit_scaled, smote);
        }
    }

    EnsembleModel model;
    model.dim = train.dim();
    model.scaler = scaler;
    model.layers.resize(cfg.layers.size());
    for (std::size_t l = 0; l < cfg.layers.size(); ++l) {
        model.layers[l] = train_layer(cfg.layers[l], fit_scaled, cfg, derive_seed(cfg.seed, 2 + l));
    }

    if (val_scaled.size() == 0) throw DataError("validation fold is empty");
    for (const LayerModel& layer : model.layers) {
        std::vector<Label> predicted;
        predicted.reserve(val_scaled.size());
        for (const FeatureVector& x : val_scaled.features) {
            predicted.push_back(predict_layer(layer, x));
        }
        const MetricsReport report = derive(confusion(predicted, val_scaled.labels));
        model.validation_accuracies.push_back(report.accuracy.value());
    }
    model.weights = accuracy_weights(model.validation_accuracies);
    return model;
}

Label predict(const EnsembleModel& model, const FeatureVector& x) {
    if (x.size() != model.dim) {
        throw DataError("feature dimension " + std::to_string(x.size()) +
                        " does not match model dimension " + std::to_string(model.dim));
    }
    const FeatureVector scaled = normalize_apply(model.scaler, x);
    std::vector<Label> votes;
    votes.reserve(model.layers.size());
    for (const LayerModel& layer : model.layers) {
        votes.push_back(predict_layer(layer, scaled));
    }
    return weighted_vote(model.weights, votes);
}

std::vector<MetricsReport> EvaluationReport::all() const {
    std::vector<MetricsReport> reports = layers;
    reports.push_back(ensemble);
    return reports;
}

EvaluationReport evaluate(const EnsembleModel& model, const LabeledDataset& test) {
    if (test.size() == 0) throw DataError("cannot evaluate on an empty dataset");

    const LabeledDataset scaled = normalize_apply(model.scaler, test);
    std::vector<std::vector<Label>> layer_votes(model.layer_count());
    std::vector<Label> ensemble_votes;
    ensemble_votes.reserve(test.size());

    std::vector<Label> votes(model.layer_count());
    for (const FeatureVector& x : scaled.features) {
        for (std::size_t l = 0; l < model.layer_count(); ++l) {
            votes[l] = predict_layer(model.layers[l], x);
            layer_votes[l].push_back(votes[l]);
        }
        ensemble_votes.push_back(weighted_vote(model.weights, votes));
    }

    EvaluationReport report;
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        report.layers.push_back(derive(confusion(layer_votes[l], test.labels), model.layer_name(l)));
    }
    report.ensemble = derive(confusion(ensemble_votes, test.labels), "ensemble");
    return report;
}

}  // namespace arpsentinel
