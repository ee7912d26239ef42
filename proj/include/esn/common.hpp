#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace esn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Error hierarchy. The CLI maps each family onto its own exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated an operation's documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Invalid hyperparameters or experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (files, sample sets).
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: non-convergence, singular systems, non-finite values.
class NumericError : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw PreconditionError(message);
    }
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m)
{
    return m.allFinite();
}

}  // namespace esn
