#include "arpsentinel/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/rng.hpp"

namespace arpsentinel {

namespace {

double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

struct Forward {
    std::vector<double> hidden_out;
    double z2 = 0.0;
    double output = 0.0;
};

void forward_pass(const MlpModel& m, const FeatureVector& x, Forward& f) {
    f.hidden_out.resize(m.hidden);
    for (std::uint32_t i = 0; i < m.hidden; ++i) {
        double z = m.b1[i];
        const double* row = &m.w1[static_cast<std::size_t>(i) * m.dim];
        for (std::size_t j = 0; j < m.dim; ++j) z += row[j] * x[j];
        f.hidden_out[i] = logistic(z);
    }
    f.z2 = m.b2;
    for (std::uint32_t i = 0; i < m.hidden; ++i) f.z2 += m.w2[i] * f.hidden_out[i];
    f.output = logistic(f.z2);
}

}  // namespace

MlpModel init_mlp(std::size_t dim, const MlpParams& params) {
    if (dim == 0) throw DataError("MLP needs at least one input feature");
    if (params.hidden < 1) throw ConfigError("mlp.hidden must be >= 1");

    MlpModel m;
    m.dim = dim;
    m.hidden = params.hidden;
    Rng rng(params.seed);
    auto draw = [&rng] { return rng.next_double() - 0.5; };
    m.w1.resize(static_cast<std::size_t>(params.hidden) * dim);
    for (auto& w : m.w1) w = draw();
    m.b1.resize(params.hidden);
    for (auto& b : m.b1) b = draw();
    m.w2.resize(params.hidden);
    for (auto& w : m.w2) w = draw();
    m.b2 = draw();
    return m;
}

double mlp_forward(const MlpModel& model, const FeatureVector& x) {
    if (x.size() != model.dim) {
        throw DataError("feature dimension " + std::to_string(x.size()) +
                        " does not match MLP input dimension " + std::to_string(model.dim));
    }
    Forward f;
    forward_pass(model, x, f);
    return f.output;
}

double mlp_loss(const MlpModel& model, std::span<const FeatureVector> xs,
                std::span<const Label> ys, std::vector<double>* gradient) {
    if (xs.empty() || xs.size() != ys.size()) {
        throw DataError("MLP loss needs equally many feature vectors and labels");
    }
    if (gradient) gradient->assign(model.parameter_count(), 0.0);

    const double scale = 1.0 / static_cast<double>(xs.size());
    const std::size_t w1_size = static_cast<std::size_t>(model.hidden) * model.dim;
    double loss = 0.0;
    Forward f;

    for (std::size_t n = 0; n < xs.size(); ++n) {
        const FeatureVector& x = xs[n];
        if (x.size() != model.dim) {
            throw DataError("feature dimension mismatch inside MLP batch");
        }
        forward_pass(model, x, f);
        const double y = ys[n] == Label::attack ? 1.0 : 0.0;
        // Binary cross-entropy via the logit keeps this finite for any z2.
        loss += softplus(f.z2) - y * f.z2;

        if (!gradient) continue;
        std::vector<double>& g = *gradient;
        const double dz2 = (f.output - y) * scale;
        for (std::uint32_t i = 0; i < model.hidden; ++i) {
            const double a = f.hidden_out[i];
            g[w1_size + model.hidden + i] += dz2 * a;  // w2
            const double dz1 = dz2 * model.w2[i] * a * (1.0 - a);
            const double* row = x.data();
            double* grow = &g[static_cast<std::size_t>(i) * model.dim];
            for (std::size_t j = 0; j < model.dim; ++j) grow[j] += dz1 * row[j];
            g[w1_size + i] += dz1;  // b1
        }
        g[g.size() - 1] += dz2;  // b2
    }
    return loss * scale;
}

MlpModel train_mlp(const LabeledDataset& train, const MlpParams& params) {
    if (train.size() == 0) throw DataError("cannot train an MLP on an empty dataset");

    MlpModel model = init_mlp(train.dim(), params);
    if (params.epochs == 0) return model;

    Rng rng(derive_seed(params.seed, 1));  // init consumed the raw seed
    const std::size_t n = train.size();
    const std::size_t batch = std::max<std::size_t>(1, params.batch_size);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> gradient;
    std::vector<FeatureVector> batch_x;
    std::vector<Label> batch_y;

    auto apply = [&](double lr) {
        const std::size_t w1_size = model.w1.size();
        for (std::size_t p = 0; p < w1_size; ++p) model.w1[p] -= lr * gradient[p];
        for (std::uint32_t i = 0; i < model.hidden; ++i) {
            model.b1[i] -= lr * gradient[w1_size + i];
            model.w2[i] -= lr * gradient[w1_size + model.hidden + i];
        }
        model.b2 -= lr * gradient.back();
    };

    for (std::uint32_t epoch = 0; epoch < params.epochs; ++epoch) {
        for (std::size_t i = n - 1; i > 0; --i) {
            std::swap(order[i], order[rng.next_below(i + 1)]);
        }
        for (std::size_t begin = 0; begin < n; begin += batch) {
            const std::size_t end = std::min(n, begin + batch);
            batch_x.clear();
            batch_y.clear();
            for (std::size_t i = begin; i < end; ++i) {
                batch_x.push_back(train.features[order[i]]);
                batch_y.push_back(train.labels[order[i]]);
            }
            const double loss = mlp_loss(model, batch_x, batch_y, &gradient);
            if (!std::isfinite(loss)) {
                throw DataError("MLP training diverged at epoch " + std::to_string(epoch) +
                                ": loss is not finite");
            }
            apply(params.learning_rate);
        }
    }
    return model;
}

Label predict_mlp(const MlpModel& model, const FeatureVector& x) {
    return mlp_forward(model, x) >= 0.5 ? Label::attack : Label::benign;
}

}  // namespace arpsentinel
