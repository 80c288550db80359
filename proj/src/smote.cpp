#include "arpsentinel/smote.hpp"

#include <algorithm>
#include <cmath>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/rng.hpp"

namespace arpsentinel {

namespace {

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
    double sum = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        sum += diff * diff;
    }
    return sum;
}

std::vector<std::size_t> minority_indices(const LabeledDataset& dataset, Label minority) {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset.labels[i] == minority) indices.push_back(i);
    }
    return indices;
}

}  // namespace

Label minority_label(const LabeledDataset& dataset) {
    const std::size_t attack = dataset.count(Label::attack);
    const std::size_t benign = dataset.size() - attack;
    return benign < attack ? Label::benign : Label::attack;
}

std::vector<std::size_t> nearest_minority_neighbors(const LabeledDataset& dataset, std::size_t i,
                                                    std::uint32_t k) {
    if (i >= dataset.size()) throw DataError("example index out of range");
    const Label minority = minority_label(dataset);
    if (dataset.labels[i] != minority) {
        throw DataError("example " + std::to_string(i) + " is not a minority example");
    }
    const auto candidates = minority_indices(dataset, minority);
    if (k + 1 > candidates.size()) {
        throw DataError("k_neighbors=" + std::to_string(k) + " requires more than " +
                        std::to_string(candidates.size()) + " minority examples");
    }

    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(candidates.size() - 1);
    for (std::size_t c : candidates) {
        if (c == i) continue;
        ranked.emplace_back(squared_distance(dataset.features[i], dataset.features[c]), c);
    }
    std::sort(ranked.begin(), ranked.end());  // pair ordering = distance, then lower index

    std::vector<std::size_t> neighbors(k);
    for (std::uint32_t n = 0; n < k; ++n) neighbors[n] = ranked[n].second;
    return neighbors;
}

LabeledDataset smote_resample(const LabeledDataset& dataset, const SmoteConfig& cfg) {
    if (cfg.k_neighbors < 1) throw ConfigError("smote.k_neighbors must be >= 1");
    if (!(cfg.target_ratio > 0.0 && cfg.target_ratio <= 1.0)) {
        throw ConfigError("smote.target_ratio must lie in (0, 1]");
    }

    const std::size_t attack = dataset.count(Label::attack);
    const std::size_t benign = dataset.size() - attack;
    if (attack == 0 || benign == 0) {
        throw DataError("SMOTE needs both classes present, got " + std::to_string(benign) +
                        " benign / " + std::to_string(attack) + " attack");
    }

    const Label minority = minority_label(dataset);
    const std::size_t minority_count = std::min(attack, benign);
    const std::size_t majority_count = std::max(attack, benign);
    if (minority_count <= cfg.k_neighbors) {
        throw DataError("minority class has " + std::to_string(minority_count) +
                        " examples, not more than k_neighbors=" + std::to_string(cfg.k_neighbors) +
                        "; use a smaller k_neighbors");
    }

    const auto target = static_cast<std::size_t>(
        std::ceil(cfg.target_ratio * static_cast<double>(majority_count) - 1e-9));
    LabeledDataset out = dataset;
    if (target <= minority_count) return out;
    const std::size_t needed = target - minority_count;

    const auto sources = minority_indices(dataset, minority);
    std::vector<std::vector<std::size_t>> neighbors(sources.size());
    for (std::size_t s = 0; s < sources.size(); ++s) {
        neighbors[s] = nearest_minority_neighbors(dataset, sources[s], cfg.k_neighbors);
    }

    Rng rng(cfg.seed);
    for (std::size_t n = 0; n < needed; ++n) {
        const std::size_t s = n % sources.size();
        const FeatureVector& base = dataset.features[sources[s]];
        const FeatureVector& peer =
            dataset.features[neighbors[s][rng.next_below(cfg.k_neighbors)]];
        const double u = rng.next_double();
        FeatureVector synthetic(base.size());
        for (std::size_t j = 0; j < base.size(); ++j) {
            synthetic[j] = base[j] + u * (peer[j] - base[j]);
        }
        out.push_back(std::move(synthetic), minority);
    }
    return out;
}

}  // namespace arpsentinel
