#pragma once

#include "esn/reservoir.hpp"

#include <span>

namespace esn {

enum class LrpRule { ZPlus };

struct LrpConfig {
    /// Denominators below this are treated as degenerate; their relevance is
    /// booked to `absorbed` instead of being redistributed.
    double epsilon = 1e-12;
    LrpRule rule = LrpRule::ZPlus;

    void validate() const;
};

/// Relevance of one sample, laid out like the sample minus its dummy column.
struct RelevanceMap {
    Matrix scores;        // D x (T-1): input columns 2..T of the fed sample
    Vector dummy_scores;  // D: first (dummy) column, not part of the map proper
    double absorbed = 0.0;
    double total = 0.0;  // y(T), the output being decomposed

    /// total - (sum(scores) + sum(dummy_scores) + absorbed); zero up to rounding.
    double conservation_residual() const;
    bool conserves(double rel_tol = 1e-6) const;
};

struct OutputRelevance {
    Vector state;  // N: relevance on x(T)
    double absorbed = 0.0;
    double total = 0.0;
};

struct StepRelevance {
    Vector input;           // D: relevance on u(t)
    Vector previous_state;  // N: relevance on x(t-1), leak and recurrent paths merged
    double absorbed = 0.0;
};

/// z+ relevance propagation through a time-unfolded leaky reservoir.
///
/// Time indices are 0-based columns of the trajectory: column 0 is the first
/// fed column (x(1) in the usual 1-based notation). Holds sign-split copies of
/// the weights, so build one per model and reuse it across samples.
class RelevancePropagator {
public:
    RelevancePropagator(const EsnModel& model, LrpConfig cfg = {});

    /// Distributes y(T) onto x(T) in proportion to max(w_out[j] x_T[j], 0).
    OutputRelevance output_layer(const StateTrajectory& traj, Eigen::Index output = 0) const;

    /// One backward step from x(t) (t >= 1): first split between the leak
    /// term (1-a) x(t-1) and the activation term a act(.), then spread the
    /// activation share over the positive pre-activation contributions
    /// W_in[j,d] u_d(t) and W_res[j,k] x_k(t-1). Biases receive nothing.
    StepRelevance step_back(const StateTrajectory& traj, Eigen::Index t, const Vector& state_relevance) const;

    /// Column 0 has no previous state: all of x(1)'s relevance goes to the
    /// column's inputs through W_in.
    StepRelevance first_step(const StateTrajectory& traj, const Vector& state_relevance) const;

    RelevanceMap relevance_map(const StateTrajectory& traj, Eigen::Index output = 0) const;

private:
    void check_trajectory(const StateTrajectory& traj) const;
    // Redistributes `share` (N) over the W_in u and, if present, W_res x_prev
    // contributions. Adds into `input` / `prev` and returns the absorbed part.
    double spread_activation(const Vector& share, const Vector& u, const Vector* x_prev, Vector& input,
                             Vector* prev) const;

    const EsnModel& model_;
    LrpConfig cfg_;
    Matrix w_in_pos_, w_in_neg_;
    Matrix w_res_pos_, w_res_neg_;
};

OutputRelevance relevance_output_layer(const EsnModel& model, const StateTrajectory& traj, const LrpConfig& cfg = {});

StepRelevance relevance_step_back(const EsnModel& model, const StateTrajectory& traj, Eigen::Index t,
                                  const Vector& state_relevance, const LrpConfig& cfg = {});

/// Full backward pass. `traj` must come from a sample whose first column is
/// the dummy ones-column; its relevance lands in dummy_scores.
RelevanceMap relevance_map(const EsnModel& model, const StateTrajectory& traj, const LrpConfig& cfg = {});

/// Elementwise mean of the maps' scores, normalized by the largest magnitude
/// to [-1, 1]. An all-(near-)zero mean is returned as zeros.
Matrix mean_relevance(std::span<const RelevanceMap> maps);

}  // namespace esn
