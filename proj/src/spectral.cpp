#include "esn/spectral.hpp"

#include "esn/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

namespace esn {

namespace {

constexpr Eigen::Index kWindow = 16;  // Krylov vectors added per sweep
constexpr Eigen::Index kKeep = 6;     // Ritz pairs carried across restarts

struct Sweep {
    double magnitude = 0.0;
    double residual = 0.0;  // ||m v - lambda v|| / ||v|| of the dominant Ritz pair
    Matrix kept;            // orthonormal real basis of the leading Ritz vectors
    Vector restart;
};

// Appends w to the orthonormal columns of q (Gram-Schmidt, twice) unless it
// is numerically inside their span.
bool extend_basis(Matrix& q, Eigen::Index& cols, Vector w, double floor)
{
    for (int pass = 0; pass < 2; ++pass) {
        w -= q.leftCols(cols) * (q.leftCols(cols).transpose() * w);
    }
    const double norm = w.norm();
    if (norm <= floor) {
        return false;
    }
    q.col(cols++) = w / norm;
    return true;
}

// Rayleigh-Ritz on span{kept, x, m x, ..., m^k x}. Keeping the leading Ritz
// vectors stops the restart from dropping the dominant direction when the
// spectrum is crowded near its edge.
Sweep ritz_sweep(const Matrix& m, const Matrix& kept, const Vector& x, double scale)
{
    const Eigen::Index n = m.rows();
    Matrix q(n, std::min(n, kept.cols() + kWindow + 1));
    Eigen::Index cols = 0;
    const double floor = 1e-13;
    for (Eigen::Index i = 0; i < kept.cols() && cols < q.cols(); ++i) {
        extend_basis(q, cols, kept.col(i), floor);
    }
    // After a restart x already lies in the kept span, so the new directions
    // start from m x.
    Vector w = x;
    extend_basis(q, cols, w, floor);
    for (Eigen::Index j = 0; j < kWindow && cols < q.cols(); ++j) {
        w = m * w;
        const double norm = w.norm();
        if (norm <= 1e-14 * scale) {
            break;
        }
        w /= norm;
        if (!extend_basis(q, cols, w, floor)) {
            break;
        }
    }

    const Matrix basis = q.leftCols(cols);
    const Matrix image = m * basis;
    Eigen::EigenSolver<Matrix> solver(basis.transpose() * image, true);
    if (solver.info() != Eigen::Success) {
        throw NumericError("spectral_radius: Ritz eigenproblem failed");
    }
    const auto& values = solver.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(values(a)) > std::abs(values(b)); });

    using Complex = std::complex<double>;
    const Eigen::Index best = order.front();
    const Eigen::VectorXcd y = solver.eigenvectors().col(best);
    const Eigen::VectorXcd v = basis.cast<Complex>() * y;
    const Eigen::VectorXcd mv = image.cast<Complex>() * y;

    Sweep sweep;
    sweep.magnitude = std::abs(values(best));
    sweep.residual = (mv - values(best) * v).norm() / v.norm();
    // Real and imaginary parts both lie in the dominant invariant subspace.
    sweep.restart = v.real() + v.imag();
    sweep.restart.normalize();

    const Eigen::Index keep = std::min<Eigen::Index>(kKeep, values.size());
    sweep.kept.resize(n, 2 * keep);
    for (Eigen::Index i = 0; i < keep; ++i) {
        const Eigen::VectorXcd r = basis.cast<Complex>() * solver.eigenvectors().col(order[i]);
        sweep.kept.col(2 * i) = r.real();
        sweep.kept.col(2 * i + 1) = r.imag();
    }
    return sweep;
}

}  // namespace

double spectral_radius(const Matrix& m, double tol, int max_iter)
{
    require(m.rows() == m.cols(), "spectral_radius: matrix must be square");
    require(m.allFinite(), "spectral_radius: matrix has non-finite entries");
    require(tol > 0.0 && max_iter > 0, "spectral_radius: tol and max_iter must be positive");
    if (m.size() == 0) {
        return 0.0;
    }

    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    if (m.cwiseAbs().maxCoeff() == 0.0) {
        return 0.0;
    }

    Rng rng(0, Stream::PowerIteration);
    Vector x(m.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x(i) = rng.uniform(-1.0, 1.0);
    }
    x.normalize();

    // Plain power iterate kept alongside the sweeps: exact annihilation
    // (nilpotent matrices) is reported as radius 0 rather than via unstable
    // Ritz values.
    Vector power = x;
    Matrix kept(m.rows(), 0);
    double previous = -1.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        for (Eigen::Index j = 0; j < std::min(kWindow, m.rows()); ++j) {
            power = m * power;
            const double pnorm = power.norm();
            if (pnorm == 0.0) {
                return 0.0;
            }
            power /= pnorm;
        }
        const Sweep sweep = ritz_sweep(m, kept, x, scale);
        const double estimate = sweep.magnitude;
        if (previous >= 0.0) {
            const double denom = std::max(estimate, previous);
            if (denom > 0.0 && std::abs(estimate - previous) < tol * denom &&
                sweep.residual < std::sqrt(tol) * denom) {
                return estimate;
            }
        }
        previous = estimate;
        kept = sweep.kept;
        x = sweep.restart;
    }

    std::ostringstream msg;
    msg << "spectral_radius: no convergence after " << max_iter << " sweeps (last estimate " << previous << ")";
    throw SpectralNonConvergence(msg.str(), previous);
}

}  // namespace esn
