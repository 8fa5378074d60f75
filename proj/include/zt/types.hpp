#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace zt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Units: hbar = 1, energies and rates in units of the coupling v, times in 1/v.
// Site indices are 1-based everywhere in the public API.

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (bad dimension, negative rate, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Inputs are valid but outside the regime where an approximate formula holds.
class OutOfRegime : public Error {
public:
    using Error::Error;
};

/// A numerical invariant failed (non-finite state, inconsistent spectrum, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The efficiency integral or series has no finite value (no loss channel).
class EfficiencyUndefined : public Error {
public:
    using Error::Error;
};

} // namespace zt
