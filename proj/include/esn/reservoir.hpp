#pragma once

#include "esn/common.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace esn {

enum class Activation { Tanh, Sigmoid };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

/// Reservoir hyperparameters. Defaults reproduce the reference ENSO setup.
struct EsnConfig {
    int n_res = 300;
    int n_in = 89;
    double leak_rate = 0.01;
    /// Fraction of NONZERO reservoir connections (0.3 means 30% connected).
    double sparsity = 0.3;
    double spectral_radius = 0.8;
    /// Half-width of the uniform init interval for W_in, b_in, W_res, b_res.
    double weight_range = 0.1;
    Activation activation = Activation::Tanh;
    std::uint64_t seed = 42;

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;

    bool operator==(const EsnConfig&) const = default;
};

/// Frozen input/reservoir weights plus an optional trained readout.
///
/// Input and reservoir blocks cannot change after construction; the readout
/// is attached with set_readout().
class EsnModel {
public:
    /// Assembles a model from explicit weights (no rescaling).
    EsnModel(EsnConfig config, Matrix w_in, Vector b_in, Matrix w_res, Vector b_res);

    const EsnConfig& config() const noexcept { return config_; }
    const Matrix& w_in() const noexcept { return w_in_; }
    const Vector& b_in() const noexcept { return b_in_; }
    const Matrix& w_res() const noexcept { return w_res_; }
    const Vector& b_res() const noexcept { return b_res_; }

    bool trained() const noexcept { return w_out_.has_value(); }
    /// M x N; throws if untrained.
    const Matrix& w_out() const;
    /// M-vector; throws if untrained.
    const Vector& b_out() const;

    void set_readout(Matrix w_out, Vector b_out);

    int n_res() const noexcept { return static_cast<int>(w_res_.rows()); }
    int n_in() const noexcept { return static_cast<int>(w_in_.cols()); }

    /// Output weights plus output biases.
    Eigen::Index trainable_parameter_count() const;

private:
    EsnConfig config_;
    Matrix w_in_;
    Vector b_in_;
    Matrix w_res_;
    Vector b_res_;
    std::optional<Matrix> w_out_;
    std::optional<Vector> b_out_;
};

/// Forward-pass record for one sample. Column t of `states` holds x(t+1) and
/// column t of `act_branch` holds the activation term that entered it, so the
/// LRP backward pass never has to re-run the forward recurrence.
struct StateTrajectory {
    Matrix states;      // N x T
    Matrix act_branch;  // N x T
    Matrix inputs;      // D x T, the sample that produced this trajectory

    Eigen::Index steps() const noexcept { return states.cols(); }
    Vector final_state() const { return states.col(states.cols() - 1); }
};

double activate(Activation a, double z);

/// Scales `w` so its spectral radius equals `target`. Throws NumericError when
/// the matrix has (numerically) zero spectral radius.
Matrix rescale_to_spectral_radius(const Matrix& w, double target);

/// Draws a reservoir from config.seed. Identical configs give bit-identical models.
EsnModel init_reservoir(const EsnConfig& config);

/// Feeds `sample` (D x T) column by column. x(1) = a * act(W_in u(1) + b_in);
/// later steps add the leaky recurrent update. Each call starts from scratch.
StateTrajectory run_reservoir(const EsnModel& model, const Matrix& sample);

/// W_out x(T) + b_out.
Vector model_output(const EsnModel& model, const StateTrajectory& traj);

}  // namespace esn
