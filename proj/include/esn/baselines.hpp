#pragma once

#include "esn/common.hpp"

#include <cstdint>
#include <vector>

namespace esn {

struct LinearModel {
    Vector weights;
    double bias = 0.0;
    double train_mse = 0.0;

    double predict(const Vector& x) const;
};

/// Closed-form linear regression on vectorized fields (rows are samples).
LinearModel fit_linreg(const Matrix& vectors, const Vector& targets, double ridge = 0.0);

/// Fully connected network with identity activation on every layer.
struct MlpModel {
    std::vector<int> layer_dims;   // e.g. {10988, 8, 8, 1}
    std::vector<Matrix> weights;   // weights[l] is dims[l+1] x dims[l]
    std::vector<Vector> biases;    // biases[l] has dims[l+1] entries

    Eigen::Index param_count() const;
};

/// Reference baseline architecture for an input of `inputs` features.
std::vector<int> reference_mlp_dims(int inputs);

/// Uniform init in [-init_range, init_range] from the MlpInit stream.
MlpModel init_mlp(std::vector<int> layer_dims, std::uint64_t seed, double init_range = 0.05);

/// Forward pass on one input vector. Only single-output networks.
double mlp_predict(const MlpModel& model, const Vector& x);

/// Forward pass on a batch, one sample per row; returns batch x outputs.
Matrix mlp_forward(const MlpModel& model, const Matrix& batch);

struct MlpGradients {
    double loss = 0.0;  // mean squared error over the batch
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
};

/// MSE loss and its exact gradient by backpropagation.
MlpGradients mlp_loss_and_gradients(const MlpModel& model, const Matrix& batch, const Vector& targets);

struct AdamOptions {
    double lr = 0.0005;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First/second moments mirroring the model's parameter shapes.
struct AdamState {
    std::vector<Matrix> m_weights, v_weights;
    std::vector<Vector> m_biases, v_biases;
    long step = 0;

    explicit AdamState(const MlpModel& model);
};

void adam_step(MlpModel& model, AdamState& state, const MlpGradients& grads, const AdamOptions& options = {});

struct MlpTrainOptions {
    int epochs = 30;
    int batch_size = 10;
    std::uint64_t seed = 42;
    AdamOptions adam;
};

struct MlpTrainResult {
    MlpModel model;
    std::vector<double> loss_history;  // mean mini-batch loss per epoch
};

/// Mini-batch Adam on MSE with a fresh seeded shuffle every epoch.
MlpTrainResult train_mlp(const Matrix& vectors, const Vector& targets, const MlpTrainOptions& options = {},
                         std::vector<int> layer_dims = {});

}  // namespace esn
