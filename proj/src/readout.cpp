#include "esn/readout.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>

namespace esn {

std::string_view to_string(EnsoClass c)
{
    switch (c) {
    case EnsoClass::ElNino:
        return "elnino";
    case EnsoClass::LaNina:
        return "lanina";
    case EnsoClass::Neutral:
        return "neutral";
    }
    return "unknown";
}

ReadoutSolution fit_readout(const Matrix& final_states, const Matrix& targets, double ridge)
{
    const Eigen::Index samples = final_states.rows();
    const Eigen::Index features = final_states.cols();
    require(samples >= 2, "fit_readout: need at least two samples");
    require(targets.rows() == samples, "fit_readout: targets must have one row per sample");
    require(targets.cols() >= 1 && features >= 1, "fit_readout: empty design or target");
    require(final_states.allFinite() && targets.allFinite(), "fit_readout: non-finite input");
    require(ridge >= 0.0 && std::isfinite(ridge), "fit_readout: ridge must be a finite non-negative number");

    // Centering removes the unpenalized intercept from the system.
    const Eigen::RowVectorXd x_mean = final_states.colwise().mean();
    const Eigen::RowVectorXd y_mean = targets.colwise().mean();
    const Matrix xc = final_states.rowwise() - x_mean;
    const Matrix yc = targets.rowwise() - y_mean;

    Matrix beta;  // N x M
    if (ridge == 0.0) {
        Eigen::ColPivHouseholderQR<Matrix> qr(xc);
        if (qr.rank() < features) {
            throw NumericError("fit_readout: design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                               " < " + std::to_string(features) + "); use a positive ridge, e.g. 1e-8");
        }
        beta = qr.solve(yc);
    } else if (features <= samples) {
        Matrix augmented(samples + features, features);
        augmented << xc, std::sqrt(ridge) * Matrix::Identity(features, features);
        Matrix rhs = Matrix::Zero(samples + features, targets.cols());
        rhs.topRows(samples) = yc;
        beta = augmented.householderQr().solve(rhs);
    } else {
        Matrix gram = xc * xc.transpose();
        gram.diagonal().array() += ridge;
        beta = xc.transpose() * gram.llt().solve(yc);
    }
    if (!beta.allFinite()) {
        throw NumericError("fit_readout: solution is not finite");
    }

    ReadoutSolution sol;
    sol.w_out = beta.transpose();
    sol.b_out = (y_mean - x_mean * beta).transpose();
    const Matrix residual = (final_states * beta).rowwise() + sol.b_out.transpose() - targets;
    sol.train_mse = residual.squaredNorm() / static_cast<double>(residual.size());
    return sol;
}

ClassPrediction binarize(double output)
{
    return {output >= 0.0 ? EnsoClass::ElNino : EnsoClass::LaNina, output};
}

AccuracyReport accuracy(std::span<const ClassPrediction> predictions, std::span<const EnsoClass> labels)
{
    require(!predictions.empty(), "accuracy: empty input");
    require(predictions.size() == labels.size(), "accuracy: predictions and labels differ in length");

    AccuracyReport report;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool hit = predictions[i].label == labels[i];
        correct += hit ? 1 : 0;
        ClassAccuracy* bucket = nullptr;
        if (labels[i] == EnsoClass::ElNino) {
            bucket = &report.el_nino;
        } else if (labels[i] == EnsoClass::LaNina) {
            bucket = &report.la_nina;
        }
        if (bucket) {
            ++bucket->total;
            bucket->correct += hit ? 1 : 0;
        }
    }
    report.overall = static_cast<double>(correct) / static_cast<double>(labels.size());
    return report;
}

}  // namespace esn
