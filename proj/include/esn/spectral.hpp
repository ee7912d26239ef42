#pragma once

#include "esn/common.hpp"

namespace esn {

inline constexpr double kSpectralTol = 1e-10;
inline constexpr int kSpectralMaxIter = 10'000;

/// Thrown when the iteration budget runs out; carries the last estimate.
class SpectralNonConvergence : public NumericError {
public:
    SpectralNonConvergence(const std::string& what, double last_estimate)
        : NumericError(what), last_estimate_(last_estimate)
    {
    }
    double last_estimate() const noexcept { return last_estimate_; }

private:
    double last_estimate_;
};

/// Largest eigenvalue magnitude of a square matrix.
///
/// Restarted power iteration: every sweep extends the leading Ritz vectors of
/// the previous sweep by a short Krylov block, takes the dominant Ritz value
/// of the projection and restarts from the matching Ritz vector. Unlike the
/// bare Rayleigh quotient this also converges when the dominant eigenvalue is
/// a complex-conjugate pair, which random non-symmetric reservoirs often have.
/// Converged when two successive estimates differ by less than `tol`
/// relatively and the Ritz residual is below sqrt(tol) relatively. A matrix
/// that maps the power iterate to zero reports 0.
double spectral_radius(const Matrix& m, double tol = kSpectralTol, int max_iter = kSpectralMaxIter);

}  // namespace esn
