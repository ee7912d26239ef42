#include "esn/lrp.hpp"

#include <algorithm>
#include <cmath>

namespace esn {

void LrpConfig::validate() const
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("LRP epsilon must be a positive finite number");
    }
}

double RelevanceMap::conservation_residual() const
{
    return total - (scores.sum() + dummy_scores.sum() + absorbed);
}

bool RelevanceMap::conserves(double rel_tol) const
{
    return std::abs(conservation_residual()) <= rel_tol * std::max(1.0, std::abs(total));
}

RelevancePropagator::RelevancePropagator(const EsnModel& model, LrpConfig cfg)
    : model_(model), cfg_(cfg), w_in_pos_(model.w_in().cwiseMax(0.0)), w_in_neg_(model.w_in().cwiseMin(0.0)),
      w_res_pos_(model.w_res().cwiseMax(0.0)), w_res_neg_(model.w_res().cwiseMin(0.0))
{
    cfg_.validate();
}

void RelevancePropagator::check_trajectory(const StateTrajectory& traj) const
{
    require(traj.states.rows() == model_.n_res() && traj.act_branch.rows() == model_.n_res(),
            "LRP: trajectory was not produced by this model (reservoir size)");
    require(traj.inputs.rows() == model_.n_in(), "LRP: trajectory inputs do not match model input size");
    require(traj.steps() >= 1 && traj.inputs.cols() == traj.steps() && traj.act_branch.cols() == traj.steps(),
            "LRP: inconsistent trajectory lengths");
}

OutputRelevance RelevancePropagator::output_layer(const StateTrajectory& traj, Eigen::Index output) const
{
    check_trajectory(traj);
    const Matrix& w_out = model_.w_out();
    require(output >= 0 && output < w_out.rows(), "LRP: output index out of range");

    const Vector x_final = traj.states.col(traj.steps() - 1);
    const Vector z = (w_out.row(output).transpose().array() * x_final.array()).cwiseMax(0.0);
    const double denom = z.sum();

    OutputRelevance out;
    out.total = w_out.row(output).dot(x_final) + model_.b_out()(output);
    if (denom < cfg_.epsilon) {
        out.state = Vector::Zero(model_.n_res());
        out.absorbed = out.total;
    } else {
        out.state = z * (out.total / denom);
    }
    return out;
}

double RelevancePropagator::spread_activation(const Vector& share, const Vector& u, const Vector* x_prev,
                                              Vector& input, Vector* prev) const
{
    // max(w*v, 0) == max(w,0)*max(v,0) + min(w,0)*min(v,0) termwise, which
    // turns every z+ sum into a matrix-vector product.
    const Vector u_pos = u.cwiseMax(0.0);
    const Vector u_neg = u.cwiseMin(0.0);
    Vector denom = w_in_pos_ * u_pos + w_in_neg_ * u_neg;
    Vector x_pos, x_neg;
    if (x_prev) {
        x_pos = x_prev->cwiseMax(0.0);
        x_neg = x_prev->cwiseMin(0.0);
        denom += w_res_pos_ * x_pos + w_res_neg_ * x_neg;
    }

    double absorbed = 0.0;
    Vector ratio(share.size());
    for (Eigen::Index j = 0; j < share.size(); ++j) {
        if (denom(j) < cfg_.epsilon) {
            absorbed += share(j);
            ratio(j) = 0.0;
        } else {
            ratio(j) = share(j) / denom(j);
        }
    }

    input.array() += u_pos.array() * (w_in_pos_.transpose() * ratio).array() +
                     u_neg.array() * (w_in_neg_.transpose() * ratio).array();
    if (x_prev) {
        prev->array() += x_pos.array() * (w_res_pos_.transpose() * ratio).array() +
                         x_neg.array() * (w_res_neg_.transpose() * ratio).array();
    }
    return absorbed;
}

StepRelevance RelevancePropagator::step_back(const StateTrajectory& traj, Eigen::Index t,
                                             const Vector& state_relevance) const
{
    check_trajectory(traj);
    require(t >= 1 && t < traj.steps(), "relevance_step_back: time index out of range");
    require(state_relevance.size() == model_.n_res(), "relevance_step_back: relevance vector has wrong size");

    const double alpha = model_.config().leak_rate;
    const Vector x_prev = traj.states.col(t - 1);
    const Eigen::Index n = model_.n_res();

    StepRelevance step;
    step.input = Vector::Zero(model_.n_in());
    step.previous_state = Vector::Zero(n);

    // Stage 1: leak path vs activation branch.
    Vector act_share(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double z_leak = std::max((1.0 - alpha) * x_prev(j), 0.0);
        const double z_act = std::max(alpha * traj.act_branch(j, t), 0.0);
        const double denom = z_leak + z_act;
        if (denom < cfg_.epsilon) {
            step.absorbed += state_relevance(j);
            act_share(j) = 0.0;
            continue;
        }
        step.previous_state(j) = state_relevance(j) * (z_leak / denom);
        act_share(j) = state_relevance(j) * (z_act / denom);
    }

    // Stage 2: the activation branch passes act(.) unchanged.
    const Vector u = traj.inputs.col(t);
    step.absorbed += spread_activation(act_share, u, &x_prev, step.input, &step.previous_state);
    return step;
}

StepRelevance RelevancePropagator::first_step(const StateTrajectory& traj, const Vector& state_relevance) const
{
    check_trajectory(traj);
    require(state_relevance.size() == model_.n_res(), "relevance first step: relevance vector has wrong size");
    StepRelevance step;
    step.input = Vector::Zero(model_.n_in());
    step.previous_state = Vector::Zero(0);
    const Vector u = traj.inputs.col(0);
    step.absorbed = spread_activation(state_relevance, u, nullptr, step.input, nullptr);
    return step;
}

RelevanceMap RelevancePropagator::relevance_map(const StateTrajectory& traj, Eigen::Index output) const
{
    const OutputRelevance out = output_layer(traj, output);
    const Eigen::Index steps = traj.steps();

    RelevanceMap map;
    map.total = out.total;
    map.absorbed = out.absorbed;
    map.scores = Matrix::Zero(model_.n_in(), steps - 1);

    Vector relevance = out.state;
    for (Eigen::Index t = steps - 1; t >= 1; --t) {
        StepRelevance step = step_back(traj, t, relevance);
        map.scores.col(t - 1) = step.input;
        map.absorbed += step.absorbed;
        relevance = std::move(step.previous_state);
    }
    const StepRelevance first = first_step(traj, relevance);
    map.dummy_scores = first.input;
    map.absorbed += first.absorbed;
    return map;
}

OutputRelevance relevance_output_layer(const EsnModel& model, const StateTrajectory& traj, const LrpConfig& cfg)
{
    return RelevancePropagator(model, cfg).output_layer(traj);
}

StepRelevance relevance_step_back(const EsnModel& model, const StateTrajectory& traj, Eigen::Index t,
                                  const Vector& state_relevance, const LrpConfig& cfg)
{
    return RelevancePropagator(model, cfg).step_back(traj, t, state_relevance);
}

RelevanceMap relevance_map(const EsnModel& model, const StateTrajectory& traj, const LrpConfig& cfg)
{
    return RelevancePropagator(model, cfg).relevance_map(traj);
}

Matrix mean_relevance(std::span<const RelevanceMap> maps)
{
    require(!maps.empty(), "mean_relevance: no maps given");
    Matrix mean = Matrix::Zero(maps.front().scores.rows(), maps.front().scores.cols());
    for (const RelevanceMap& map : maps) {
        require(map.scores.rows() == mean.rows() && map.scores.cols() == mean.cols(),
                "mean_relevance: maps differ in shape");
        mean += map.scores;
    }
    mean /= static_cast<double>(maps.size());
    const double peak = mean.size() ? mean.cwiseAbs().maxCoeff() : 0.0;
    if (peak < 1e-15) {
        return Matrix::Zero(mean.rows(), mean.cols());
    }
    return mean / peak;
}

}  // namespace esn
