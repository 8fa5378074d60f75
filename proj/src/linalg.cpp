#include "zt/linalg.hpp"

#include <cmath>
#include <limits>

namespace zt {

Eigensystem eigensystem(const CMatrix& h) {
    if (!h.allFinite()) throw NumericalError("matrix has non-finite entries");
    Eigen::ComplexEigenSolver<CMatrix> solver(h, true);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    Eigensystem es;
    es.eigenvalues = solver.eigenvalues();
    es.vectors = solver.eigenvectors();
    Eigen::JacobiSVD<CMatrix> svd(es.vectors);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    es.condition = smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
    if (std::isfinite(es.condition) && es.condition < 1e14)
        es.inverse = es.vectors.partialPivLu().inverse();
    return es;
}

CMatrix expm_from_eigensystem(const Eigensystem& es, double t) {
    const auto phases = (es.eigenvalues * Complex(0.0, -t)).array().exp().matrix();
    return es.vectors * phases.asDiagonal() * es.inverse;
}

CMatrix expm_series(const CMatrix& a, double tol) {
    if (!a.allFinite()) throw NumericalError("matrix has non-finite entries");
    const Eigen::Index n = a.rows();
    // scale so that ||A / 2^s||_1 <= 1/2
    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const CMatrix scaled = a / std::ldexp(1.0, squarings);
    const double snorm = norm / std::ldexp(1.0, squarings);

    // Remainder of the order-k series is bounded by snorm^(k+1)/(k+1)! * 2 for snorm <= 1/2.
    // The squaring phase amplifies relative error by ~2^s, so tighten accordingly.
    const double target = tol / std::ldexp(1.0, squarings + 1);
    CMatrix result = CMatrix::Identity(n, n);
    CMatrix term = CMatrix::Identity(n, n);
    double bound = 1.0;
    for (int k = 1; k < 64; ++k) {
        term = (term * scaled) / double(k);
        result += term;
        bound *= snorm / double(k + 1);
        if (2.0 * bound < target) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

Complex one_minus_exp_over(Complex z) {
    if (std::abs(z) < 1e-3) {
        // 1 - z/2 + z^2/6 - z^3/24 + z^4/120
        return 1.0 + z * (-0.5 + z * (1.0 / 6.0 + z * (-1.0 / 24.0 + z / 120.0)));
    }
    return (1.0 - std::exp(-z)) / z;
}

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

} // namespace zt
