#include "doctest.h"

#include <cmath>
#include <vector>

#include "arpsentinel/ensemble.hpp"
#include "arpsentinel/errors.hpp"
#include "arpsentinel/rng.hpp"

using namespace arpsentinel;

namespace {

// A single-leaf tree that always votes `label`; handy for forcing vote
// patterns through the real predict path.
LayerModel constant_layer(Label label, std::size_t dim) {
    DecisionTreeModel tree;
    tree.dim = dim;
    TreeNode leaf;
    leaf.leaf_label = label;
    leaf.count_benign = label == Label::benign ? 1 : 0;
    leaf.count_attack = label == Label::attack ? 1 : 0;
    tree.nodes.push_back(leaf);
    return tree;
}

EnsembleModel rigged_ensemble(const std::vector<double>& weights,
                              const std::vector<Label>& votes) {
    EnsembleModel model;
    model.dim = 2;
    model.scaler.min = {0.0, 0.0};
    model.scaler.max = {1.0, 1.0};
    model.weights = weights;
    model.validation_accuracies = weights;
    for (Label vote : votes) model.layers.push_back(constant_layer(vote, 2));
    return model;
}

LabeledDataset separable(std::size_t n, std::uint64_t seed) {
    LabeledDataset d;
    d.feature_names = {"x", "y"};
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.next_double();
        const double y = rng.next_double();
        d.push_back({x, y}, x + 0.2 * y > 0.55 ? Label::attack : Label::benign);
    }
    return d;
}

}  // namespace

TEST_CASE("accuracy weights follow the normalization law") {
    const std::vector<double> accs = {0.9, 0.6, 0.3};
    const std::vector<double> w = accuracy_weights(accs);
    CHECK(std::abs(w[0] - 0.5) <= 1e-12);
    CHECK(std::abs(w[1] - 1.0 / 3.0) <= 1e-12);
    CHECK(std::abs(w[2] - 1.0 / 6.0) <= 1e-12);

    const std::vector<double> equal = {0.8, 0.8, 0.8, 0.8};
    for (double wl : accuracy_weights(equal)) CHECK(std::abs(wl - 0.25) <= 1e-12);

    // A zero-accuracy layer keeps its slot but loses its voice.
    const std::vector<double> with_zero = {0.5, 0.0, 0.5};
    const std::vector<double> wz = accuracy_weights(with_zero);
    CHECK(wz[1] == 0.0);
    CHECK(std::abs(wz[0] - 0.5) <= 1e-12);
    CHECK(wz.size() == 3);
}

TEST_CASE("weights always sum to one") {
    Rng rng(64);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> accs;
        const std::size_t n = 1 + rng.next_below(6);
        for (std::size_t i = 0; i < n; ++i) accs.push_back(rng.next_double());
        double sum = 0;
        for (double w : accuracy_weights(accs)) {
            CHECK(w >= 0.0);
            sum += w;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("exact vote ties resolve to benign") {
    const std::vector<double> weights = {0.5, 0.3, 0.2};
    const std::vector<Label> votes = {Label::attack, Label::benign, Label::benign};
    CHECK(weighted_vote(weights, votes) == Label::benign);
}

TEST_CASE("a 0.6 weight outvotes the 0.4 remainder") {
    const std::vector<double> weights = {0.6, 0.2, 0.2};
    const std::vector<Label> votes = {Label::attack, Label::benign, Label::benign};
    CHECK(weighted_vote(weights, votes) == Label::attack);
}

TEST_CASE("weighted vote matches brute-force scoring over all patterns") {
    Rng rng(2025);
    for (std::size_t layers = 1; layers <= 5; ++layers) {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> accs(layers);
            for (auto& a : accs) a = rng.next_double();
            const std::vector<double> weights = accuracy_weights(accs);

            for (std::uint32_t pattern = 0; pattern < (1u << layers); ++pattern) {
                std::vector<Label> votes(layers);
                for (std::size_t l = 0; l < layers; ++l) {
                    votes[l] = (pattern >> l) & 1 ? Label::attack : Label::benign;
                }
                double attack = 0, benign = 0;
                for (std::size_t l = 0; l < layers; ++l) {
                    if (votes[l] == Label::attack) attack += weights[l];
                    else benign += weights[l];
                }
                const Label expected = std::abs(attack - benign) <= 1e-12
                                           ? Label::benign
                                           : (attack > benign ? Label::attack : Label::benign);
                CHECK(weighted_vote(weights, votes) == expected);
            }
        }
    }
}

TEST_CASE("a layer holding a majority weight dictates every prediction") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> weights = {0.501 + 0.4 * rng.next_double(), 0, 0};
        const double rest = 1.0 - weights[0];
        const double split = rng.next_double();
        weights[1] = rest * split;
        weights[2] = rest - weights[1];
        for (std::uint32_t pattern = 0; pattern < 8; ++pattern) {
            std::vector<Label> votes(3);
            for (std::size_t l = 0; l < 3; ++l) {
                votes[l] = (pattern >> l) & 1 ? Label::attack : Label::benign;
            }
            CHECK(weighted_vote(weights, votes) == votes[0]);
        }
    }
}

TEST_CASE("scaling all accuracies leaves predictions unchanged") {
    Rng rng(90);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> accs = {rng.next_double(), rng.next_double(), rng.next_double()};
        std::vector<double> scaled = accs;
        const double factor = 0.1 + 10.0 * rng.next_double();
        for (double& a : scaled) a *= factor;

        for (std::uint32_t pattern = 0; pattern < 8; ++pattern) {
            std::vector<Label> votes(3);
            for (std::size_t l = 0; l < 3; ++l) {
                votes[l] = (pattern >> l) & 1 ? Label::attack : Label::benign;
            }
            CHECK(weighted_vote(accuracy_weights(accs), votes) ==
                  weighted_vote(accuracy_weights(scaled), votes));
        }
    }
}

TEST_CASE("ensemble predict runs votes through real layers") {
    const EnsembleModel model =
        rigged_ensemble({0.6, 0.2, 0.2}, {Label::attack, Label::benign, Label::benign});
    CHECK(predict(model, {0.3, 0.3}) == Label::attack);

    const EnsembleModel tied =
        rigged_ensemble({0.5, 0.3, 0.2}, {Label::attack, Label::benign, Label::benign});
    CHECK(predict(tied, {0.3, 0.3}) == Label::benign);

    CHECK_THROWS_AS(predict(model, {0.1}), DataError);
}

TEST_CASE("train_ensemble produces normalized weights and competent layers") {
    const LabeledDataset train = separable(600, 12);
    EnsembleConfig cfg;
    cfg.seed = 3;
    const EnsembleModel model = train_ensemble(train, cfg);

    REQUIRE(model.layer_count() == 3);
    double sum = 0;
    for (double w : model.weights) {
        CHECK(w >= 0.0);
        sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    CHECK(model.validation_accuracies.size() == 3);

    const LabeledDataset test = separable(200, 13);
    const EvaluationReport report = evaluate(model, test);
    CHECK(report.layers.size() == 3);
    CHECK(*report.ensemble.accuracy > 0.9);
    CHECK(report.ensemble.subject == "ensemble");
    CHECK(report.layers[0].subject == "layer0_tree");
}

TEST_CASE("training is deterministic in the seed") {
    const LabeledDataset train = separable(300, 21);
    EnsembleConfig cfg;
    cfg.seed = 8;
    cfg.mlp.epochs = 20;
    const EnsembleModel a = train_ensemble(train, cfg);
    const EnsembleModel b = train_ensemble(train, cfg);
    CHECK(a.weights == b.weights);
    CHECK(a.validation_accuracies == b.validation_accuracies);

    const LabeledDataset probe = separable(100, 22);
    for (std::size_t i = 0; i < probe.size(); ++i) {
        CHECK(predict(a, probe.features[i]) == predict(b, probe.features[i]));
    }
}

TEST_CASE("single-class training data is rejected") {
    LabeledDataset d;
    d.feature_names = {"x"};
    for (int i = 0; i < 50; ++i) d.push_back({1.0 * i}, Label::benign);
    CHECK_THROWS_AS(train_ensemble(d, EnsembleConfig{}), DataError);
}

TEST_CASE("evaluate cross-checks against the metrics counting oracle") {
    const LabeledDataset train = separable(400, 30);
    EnsembleConfig cfg;
    cfg.seed = 5;
    cfg.mlp.epochs = 30;
    const EnsembleModel model = train_ensemble(train, cfg);
    const LabeledDataset test = separable(300, 31);
    const EvaluationReport report = evaluate(model, test);

    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const Label predicted = predict(model, test.features[i]);
        const bool attack = test.labels[i] == Label::attack;
        if (predicted == Label::attack && attack) ++tp;
        else if (predicted == Label::attack) ++fp;
        else if (attack) ++fn;
        else ++tn;
    }
    CHECK(report.ensemble.matrix == ConfusionMatrix{tp, fp, fn, tn});
}

TEST_CASE("degenerate predictors score as expected through evaluate") {
    LabeledDataset test;
    test.feature_names = {"x", "y"};
    for (int i = 0; i < 10; ++i) {
        test.push_back({0.1 * i, 0.5}, i < 5 ? Label::attack : Label::benign);
    }

    EnsembleModel constant_benign = rigged_ensemble({1.0}, {Label::benign});
    const EvaluationReport r = evaluate(constant_benign, test);
    CHECK(*r.ensemble.accuracy == doctest::Approx(0.5));
    CHECK(*r.ensemble.recall == doctest::Approx(0.0));
    CHECK(*r.ensemble.fpr == doctest::Approx(0.0));
}
