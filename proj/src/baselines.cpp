#include "esn/baselines.hpp"

#include "esn/readout.hpp"
#include "esn/rng.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace esn {

double LinearModel::predict(const Vector& x) const
{
    require(x.size() == weights.size(), "LinearModel::predict: dimension mismatch");
    return weights.dot(x) + bias;
}

LinearModel fit_linreg(const Matrix& vectors, const Vector& targets, double ridge)
{
    const ReadoutSolution sol = fit_readout(vectors, targets, ridge);
    LinearModel model;
    model.weights = sol.w_out.row(0).transpose();
    model.bias = sol.b_out(0);
    model.train_mse = sol.train_mse;
    return model;
}

Eigen::Index MlpModel::param_count() const
{
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        n += weights[l].size() + biases[l].size();
    }
    return n;
}

std::vector<int> reference_mlp_dims(int inputs)
{
    return {inputs, 8, 8, 1};
}

MlpModel init_mlp(std::vector<int> layer_dims, std::uint64_t seed, double init_range)
{
    require(layer_dims.size() >= 2, "init_mlp: need at least input and output layer");
    for (int d : layer_dims) {
        require(d > 0, "init_mlp: layer sizes must be positive");
    }
    MlpModel model;
    model.layer_dims = std::move(layer_dims);
    Rng rng(seed, Stream::MlpInit);
    for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
        const int in = model.layer_dims[l];
        const int out = model.layer_dims[l + 1];
        Matrix w(out, in);
        for (int i = 0; i < out; ++i) {
            for (int j = 0; j < in; ++j) {
                w(i, j) = rng.uniform(-init_range, init_range);
            }
        }
        Vector b(out);
        for (int i = 0; i < out; ++i) {
            b(i) = rng.uniform(-init_range, init_range);
        }
        model.weights.push_back(std::move(w));
        model.biases.push_back(std::move(b));
    }
    return model;
}

Matrix mlp_forward(const MlpModel& model, const Matrix& batch)
{
    require(!model.weights.empty(), "mlp_forward: empty model");
    require(batch.cols() == model.layer_dims.front(), "mlp_forward: input dimension mismatch");
    Matrix a = batch.transpose();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        a = (model.weights[l] * a).colwise() + model.biases[l];
    }
    return a.transpose();
}

double mlp_predict(const MlpModel& model, const Vector& x)
{
    require(model.layer_dims.back() == 1, "mlp_predict: model must have a single output");
    require(x.size() == model.layer_dims.front(), "mlp_predict: input dimension mismatch");
    Vector a = x;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        a = model.weights[l] * a + model.biases[l];
    }
    return a(0);
}

MlpGradients mlp_loss_and_gradients(const MlpModel& model, const Matrix& batch, const Vector& targets)
{
    require(model.layer_dims.back() == 1, "mlp gradients: model must have a single output");
    require(batch.rows() == targets.size() && batch.rows() > 0, "mlp gradients: batch/target size mismatch");
    require(batch.cols() == model.layer_dims.front(), "mlp gradients: input dimension mismatch");

    const auto layers = model.weights.size();
    const double count = static_cast<double>(batch.rows());

    // activations[l] is dims[l] x B
    std::vector<Matrix> activations;
    activations.reserve(layers + 1);
    activations.push_back(batch.transpose());
    for (std::size_t l = 0; l < layers; ++l) {
        activations.push_back((model.weights[l] * activations.back()).colwise() + model.biases[l]);
    }

    const Eigen::RowVectorXd residual = activations.back().row(0) - targets.transpose();
    MlpGradients grads;
    grads.loss = residual.squaredNorm() / count;
    grads.weights.resize(layers);
    grads.biases.resize(layers);

    Matrix delta = (2.0 / count) * residual;  // 1 x B
    for (std::size_t l = layers; l-- > 0;) {
        grads.weights[l] = delta * activations[l].transpose();
        grads.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            delta = model.weights[l].transpose() * delta;  // identity activation: no derivative factor
        }
    }
    return grads;
}

AdamState::AdamState(const MlpModel& model)
{
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        m_weights.push_back(Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
        v_weights.push_back(Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
        m_biases.push_back(Vector::Zero(model.biases[l].size()));
        v_biases.push_back(Vector::Zero(model.biases[l].size()));
    }
}

namespace {

template <typename Param>
void adam_update(Param& theta, Param& m, Param& v, const Param& g, const AdamOptions& o, double c1, double c2)
{
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g.cwiseProduct(g);
    theta.array() -= o.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + o.eps);
}

}  // namespace

void adam_step(MlpModel& model, AdamState& state, const MlpGradients& grads, const AdamOptions& options)
{
    require(grads.weights.size() == model.weights.size(), "adam_step: gradient layout mismatch");
    ++state.step;
    const double c1 = 1.0 - std::pow(options.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(options.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        adam_update(model.weights[l], state.m_weights[l], state.v_weights[l], grads.weights[l], options, c1, c2);
        adam_update(model.biases[l], state.m_biases[l], state.v_biases[l], grads.biases[l], options, c1, c2);
    }
}

MlpTrainResult train_mlp(const Matrix& vectors, const Vector& targets, const MlpTrainOptions& options,
                         std::vector<int> layer_dims)
{
    require(vectors.rows() == targets.size() && vectors.rows() > 0, "train_mlp: vectors/targets size mismatch");
    require(options.epochs > 0 && options.batch_size > 0, "train_mlp: epochs and batch size must be positive");
    require(vectors.allFinite() && targets.allFinite(), "train_mlp: non-finite training data");
    if (layer_dims.empty()) {
        layer_dims = reference_mlp_dims(static_cast<int>(vectors.cols()));
    }
    require(layer_dims.front() == vectors.cols(), "train_mlp: first layer must match input dimension");

    MlpTrainResult result{init_mlp(std::move(layer_dims), options.seed), {}};
    AdamState adam(result.model);
    Rng shuffle(options.seed, Stream::MlpShuffle);

    const Eigen::Index samples = vectors.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(samples));
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            std::swap(order[i], order[shuffle.below(i + 1)]);
        }
        double loss_sum = 0.0;
        int batches = 0;
        for (Eigen::Index start = 0; start < samples; start += options.batch_size) {
            const Eigen::Index size = std::min<Eigen::Index>(options.batch_size, samples - start);
            Matrix batch(size, vectors.cols());
            Vector y(size);
            for (Eigen::Index k = 0; k < size; ++k) {
                batch.row(k) = vectors.row(order[start + k]);
                y(k) = targets(order[start + k]);
            }
            const MlpGradients grads = mlp_loss_and_gradients(result.model, batch, y);
            if (!std::isfinite(grads.loss)) {
                std::ostringstream msg;
                msg << "train_mlp: non-finite loss at epoch " << epoch << ", batch starting at " << start;
                throw NumericError(msg.str());
            }
            adam_step(result.model, adam, grads, options.adam);
            loss_sum += grads.loss;
            ++batches;
        }
        result.loss_history.push_back(loss_sum / batches);
    }
    return result;
}

}  // namespace esn
