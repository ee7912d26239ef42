#include "esn/reservoir.hpp"

#include "esn/rng.hpp"
#include "esn/spectral.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace esn {

std::string_view to_string(Activation a)
{
    switch (a) {
    case Activation::Tanh:
        return "tanh";
    case Activation::Sigmoid:
        return "sigmoid";
    }
    return "unknown";
}

Activation activation_from_string(std::string_view name)
{
    if (name == "tanh") {
        return Activation::Tanh;
    }
    if (name == "sigmoid") {
        return Activation::Sigmoid;
    }
    throw ConfigError("unknown activation '" + std::string(name) + "' (expected tanh or sigmoid)");
}

void EsnConfig::validate() const
{
    if (n_res <= 0) {
        throw ConfigError("n_res must be positive");
    }
    if (n_in <= 0) {
        throw ConfigError("n_in must be positive");
    }
    if (!(leak_rate >= 0.0 && leak_rate <= 1.0)) {
        throw ConfigError("leak_rate must lie in [0, 1]");
    }
    if (!(sparsity > 0.0 && sparsity <= 1.0)) {
        throw ConfigError("sparsity must lie in (0, 1]");
    }
    if (!(spectral_radius > 0.0) || !std::isfinite(spectral_radius)) {
        throw ConfigError("spectral_radius must be positive");
    }
    if (!(weight_range > 0.0) || !std::isfinite(weight_range)) {
        throw ConfigError("weight_range must be positive");
    }
}

EsnModel::EsnModel(EsnConfig config, Matrix w_in, Vector b_in, Matrix w_res, Vector b_res)
    : config_(config), w_in_(std::move(w_in)), b_in_(std::move(b_in)), w_res_(std::move(w_res)),
      b_res_(std::move(b_res))
{
    const auto n = w_res_.rows();
    if (w_res_.cols() != n || w_in_.rows() != n || b_in_.size() != n || b_res_.size() != n) {
        throw PreconditionError("EsnModel: inconsistent weight shapes");
    }
    if (config_.n_res != n || config_.n_in != w_in_.cols()) {
        throw PreconditionError("EsnModel: weight shapes disagree with config (n_res, n_in)");
    }
}

const Matrix& EsnModel::w_out() const
{
    if (!w_out_) {
        throw PreconditionError("readout not trained");
    }
    return *w_out_;
}

const Vector& EsnModel::b_out() const
{
    if (!b_out_) {
        throw PreconditionError("readout not trained");
    }
    return *b_out_;
}

void EsnModel::set_readout(Matrix w_out, Vector b_out)
{
    require(w_out.cols() == w_res_.rows(), "set_readout: w_out must have n_res columns");
    require(b_out.size() == w_out.rows(), "set_readout: b_out size must equal output count");
    require(w_out.allFinite() && b_out.allFinite(), "set_readout: non-finite readout");
    w_out_ = std::move(w_out);
    b_out_ = std::move(b_out);
}

Eigen::Index EsnModel::trainable_parameter_count() const
{
    return w_out().size() + b_out().size();
}

double activate(Activation a, double z)
{
    switch (a) {
    case Activation::Tanh:
        return std::tanh(z);
    case Activation::Sigmoid:
        return 1.0 / (1.0 + std::exp(-z));
    }
    return z;
}

Matrix rescale_to_spectral_radius(const Matrix& w, double target)
{
    const double rho = spectral_radius(w);
    if (!(rho > 1e-300)) {
        throw NumericError("reservoir matrix has zero spectral radius; choose a different seed or a higher sparsity");
    }
    return w * (target / rho);
}

namespace {

Matrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double half_width)
{
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = rng.uniform(-half_width, half_width);
        }
    }
    return m;
}

}  // namespace

EsnModel init_reservoir(const EsnConfig& config)
{
    config.validate();
    const Eigen::Index n = config.n_res;
    const double r = config.weight_range;

    Rng in_rng(config.seed, Stream::InputWeights);
    Matrix w_in = uniform_matrix(in_rng, n, config.n_in, r);
    Rng bin_rng(config.seed, Stream::InputBias);
    Vector b_in = uniform_matrix(bin_rng, n, 1, r);

    // Exactly round(sparsity * N^2) positions via partial Fisher-Yates.
    const auto cells = static_cast<std::uint64_t>(n * n);
    const auto nonzero = static_cast<std::uint64_t>(std::llround(config.sparsity * static_cast<double>(cells)));
    std::vector<std::uint64_t> slots(cells);
    std::iota(slots.begin(), slots.end(), std::uint64_t{0});
    Rng pos_rng(config.seed, Stream::ReservoirPositions);
    for (std::uint64_t k = 0; k < nonzero; ++k) {
        const std::uint64_t pick = k + pos_rng.below(cells - k);
        std::swap(slots[k], slots[pick]);
    }
    Rng val_rng(config.seed, Stream::ReservoirValues);
    Matrix w_res = Matrix::Zero(n, n);
    for (std::uint64_t k = 0; k < nonzero; ++k) {
        const auto row = static_cast<Eigen::Index>(slots[k] / static_cast<std::uint64_t>(n));
        const auto col = static_cast<Eigen::Index>(slots[k] % static_cast<std::uint64_t>(n));
        double v = val_rng.uniform(-r, r);
        // A drawn exact zero would silently lower the density.
        while (v == 0.0) {
            v = val_rng.uniform(-r, r);
        }
        w_res(row, col) = v;
    }
    w_res = rescale_to_spectral_radius(w_res, config.spectral_radius);

    Rng bres_rng(config.seed, Stream::ReservoirBias);
    Vector b_res = uniform_matrix(bres_rng, n, 1, r);

    return EsnModel(config, std::move(w_in), std::move(b_in), std::move(w_res), std::move(b_res));
}

StateTrajectory run_reservoir(const EsnModel& model, const Matrix& sample)
{
    if (sample.rows() != model.n_in()) {
        std::ostringstream msg;
        msg << "run_reservoir: sample has " << sample.rows() << " rows, model expects D=" << model.n_in();
        throw PreconditionError(msg.str());
    }
    require(sample.cols() >= 1, "run_reservoir: sample needs at least one column");
    require(sample.allFinite(), "run_reservoir: sample has non-finite entries");

    const double alpha = model.config().leak_rate;
    const Activation act = model.config().activation;
    const Eigen::Index n = model.n_res();
    const Eigen::Index steps = sample.cols();

    StateTrajectory traj;
    traj.states.resize(n, steps);
    traj.act_branch.resize(n, steps);
    traj.inputs = sample;

    // Input drive for every column at once.
    const Matrix drive = (model.w_in() * sample).colwise() + model.b_in();

    Vector pre(n);
    for (Eigen::Index t = 0; t < steps; ++t) {
        if (t == 0) {
            pre = drive.col(0);
        } else {
            pre = drive.col(t) + model.w_res() * traj.states.col(t - 1) + model.b_res();
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            traj.act_branch(j, t) = activate(act, pre(j));
        }
        if (t == 0) {
            traj.states.col(0) = alpha * traj.act_branch.col(0);
        } else {
            traj.states.col(t) = (1.0 - alpha) * traj.states.col(t - 1) + alpha * traj.act_branch.col(t);
        }
    }
    return traj;
}

Vector model_output(const EsnModel& model, const StateTrajectory& traj)
{
    const Matrix& w_out = model.w_out();
    require(traj.states.rows() == w_out.cols(), "model_output: trajectory does not match model size");
    require(traj.steps() >= 1, "model_output: empty trajectory");
    return w_out * traj.states.col(traj.steps() - 1) + model.b_out();
}

}  // namespace esn
