#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "arpsentinel/dataset.hpp"

namespace arpsentinel {

struct MlpParams {
    std::uint32_t hidden = 16;
    double learning_rate = 0.05;
    std::uint32_t epochs = 200;
    std::uint32_t batch_size = 32;
    std::uint64_t seed = 0;
};

// d -> hidden -> 1 feed-forward network, logistic activations throughout.
// Parameter order (also the gradient layout): w1 row-major by hidden unit,
// b1, w2, b2.
struct MlpModel {
    std::size_t dim = 0;
    std::uint32_t hidden = 0;
    std::vector<double> w1;  // hidden x dim
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden
    double b2 = 0.0;

    std::size_t parameter_count() const { return hidden * dim + hidden + hidden + 1; }
};

// All parameters drawn Uniform[-0.5, 0.5) from the seed, in parameter order.
MlpModel init_mlp(std::size_t dim, const MlpParams& params);

// Attack probability in (0,1).
double mlp_forward(const MlpModel& model, const FeatureVector& x);

// Mean binary cross-entropy over the batch; when `gradient` is non-null it
// receives d(loss)/d(parameter) in parameter order.
double mlp_loss(const MlpModel& model, std::span<const FeatureVector> xs,
                std::span<const Label> ys, std::vector<double>* gradient);

// Mini-batch gradient descent on binary cross-entropy for a fixed number of
// epochs (example order reshuffled per epoch from the seed). Expects
// features scaled to [0,1]. Throws DataError naming the epoch if the loss
// stops being finite.
MlpModel train_mlp(const LabeledDataset& train, const MlpParams& params);

// Attack iff the network output is >= 0.5.
Label predict_mlp(const MlpModel& model, const FeatureVector& x);

}  // namespace arpsentinel
