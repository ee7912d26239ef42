#pragma once

#include "esn/common.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace esn {

enum class EnsoClass { ElNino, LaNina, Neutral };

std::string_view to_string(EnsoClass c);

struct ReadoutSolution {
    Matrix w_out;  // M x N
    Vector b_out;  // M
    double train_mse = 0.0;
};

/// Least-squares readout on [final_states | 1] with an optional Tikhonov term
/// on the weights (the bias column is never penalized).
///
/// final_states is S x N, targets S x M. With ridge == 0 a rank-deficient
/// design is an error; with ridge > 0 the system is always solvable and the
/// dual (S x S) form is used when N exceeds S.
ReadoutSolution fit_readout(const Matrix& final_states, const Matrix& targets, double ridge = 0.0);

struct ClassPrediction {
    EnsoClass label = EnsoClass::ElNino;
    double score = 0.0;
};

/// Non-negative scores are El Nino (an exact 0 included), negative La Nina.
ClassPrediction binarize(double output);

struct ClassAccuracy {
    std::size_t correct = 0;
    std::size_t total = 0;
    std::optional<double> rate() const
    {
        if (total == 0) {
            return std::nullopt;
        }
        return static_cast<double>(correct) / static_cast<double>(total);
    }
};

struct AccuracyReport {
    double overall = 0.0;
    ClassAccuracy el_nino;
    ClassAccuracy la_nina;
};

/// Fraction of predictions matching `labels`, pooled and per class.
AccuracyReport accuracy(std::span<const ClassPrediction> predictions, std::span<const EnsoClass> labels);

}  // namespace esn
