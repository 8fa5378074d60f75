#pragma once

#include "zt/types.hpp"

namespace zt {

/// Right-eigenvector decomposition H = V diag(lambda) V^{-1} of a general
/// complex matrix, with the 2-norm condition number of V.
struct Eigensystem {
    CVector eigenvalues;
    CMatrix vectors;
    CMatrix inverse;
    double condition = 0.0;
};

Eigensystem eigensystem(const CMatrix& h);

/// Eigenvector-matrix condition number above which spectral formulas are not trusted.
inline constexpr double kConditionCutoff = 1e8;

/// exp(-i h t) from a precomputed eigensystem.
CMatrix expm_from_eigensystem(const Eigensystem& es, double t);

/// exp(A) by scaling and squaring of a truncated Taylor series; the truncation
/// order is chosen so the scaled series remainder is below `tol`.
CMatrix expm_series(const CMatrix& a, double tol = 1e-12);

/// (1 - exp(-z)) / z, continuous at z = 0.
Complex one_minus_exp_over(Complex z);

/// Largest absolute entry (the max-norm).
double max_abs(const CMatrix& m);

} // namespace zt
