#include "zt/dynamics.hpp"

#include <cmath>
#include <string>

namespace zt {

DensityMatrix::DensityMatrix(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw InvalidArgument("density matrix must be square");
    if (!m_.allFinite()) throw NumericalError("density matrix has non-finite entries");
}

DensityMatrix DensityMatrix::pure_site(int n_sites, int site) {
    if (site < 1 || site > n_sites) throw InvalidArgument("site index out of range");
    CMatrix m = CMatrix::Zero(n_sites, n_sites);
    m(site - 1, site - 1) = 1.0;
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_sites) {
    return DensityMatrix(CMatrix::Identity(n_sites, n_sites) / double(n_sites));
}

void DensityMatrix::check() const {
    const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12)
        throw NumericalError("density matrix not Hermitian (deviation " +
                             std::to_string(herm) + ")");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw NumericalError("density matrix has negative eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()));
    const double tr = trace();
    if (tr < -1e-10 || tr > 1.0 + 1e-10)
        throw NumericalError("density matrix trace " + std::to_string(tr) + " out of [0,1]");
}

CMatrix hermitize(const CMatrix& x) { return 0.5 * (x + x.adjoint()); }

Propagator propagator(const CMatrix& h_eff, double t, PropagatorMethod method) {
    if (!(t >= 0.0)) throw InvalidArgument("propagator time must be >= 0");
    if (!h_eff.allFinite()) throw NumericalError("H_eff has non-finite entries");
    if (method == PropagatorMethod::series)
        return {t, expm_series(h_eff * Complex(0.0, -t)), PropagatorMethod::series};
    const Eigensystem es = eigensystem(h_eff);
    if (method == PropagatorMethod::eigendecomposition) {
        if (es.inverse.size() == 0)
            throw NumericalError("eigenvector matrix is singular");
        return {t, expm_from_eigensystem(es, t), PropagatorMethod::eigendecomposition};
    }
    return propagator(h_eff, es, t);
}

Propagator propagator(const CMatrix& h_eff, const Eigensystem& es, double t) {
    if (!(t >= 0.0)) throw InvalidArgument("propagator time must be >= 0");
    if (es.condition < kConditionCutoff && es.inverse.size() != 0)
        return {t, expm_from_eigensystem(es, t), PropagatorMethod::eigendecomposition};
    return {t, expm_series(h_eff * Complex(0.0, -t)), PropagatorMethod::series};
}

DensityMatrix evolve(const CMatrix& u, const DensityMatrix& rho) {
    if (u.rows() != rho.dim() || u.cols() != rho.dim())
        throw InvalidArgument("propagator and density matrix dimensions differ");
    return DensityMatrix(hermitize(u * rho.matrix() * u.adjoint()));
}

RVector populations(const DensityMatrix& rho) { return rho.matrix().diagonal().real(); }

double time_averaged_population(const LatticeModel& model, int site, double duration,
                                double dt) {
    if (!(duration > 0.0) || !(dt > 0.0))
        throw InvalidArgument("averaging time and step must be positive");
    const int n = model.n_sites();
    if (site < 1 || site > n) throw InvalidArgument("site index out of range");
    const RVector& e = model.site_energies();
    const double spread = e.maxCoeff() - e.minCoeff();
    if (spread > 0.0 && dt > 0.1 / spread * (1.0 + 1e-12))
        throw InvalidArgument("dt must be <= 0.1 / max|eps_i - eps_j| = " +
                              std::to_string(0.1 / spread));

    RMatrix h = model.couplings();
    h.diagonal() = e;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
    const RVector& w = es.eigenvalues();
    // amplitude <site|U(t)|init> = sum_a V(site,a) V(init,a) exp(-i w_a t)
    const RVector weights =
        es.eigenvectors().row(site - 1).transpose().cwiseProduct(
            es.eigenvectors().row(model.initial_site() - 1).transpose());

    const long steps = static_cast<long>(std::ceil(duration / dt));
    const double h_step = duration / double(steps);
    // Advance phases by multiplication, re-seeded every 1024 steps.
    CVector phase = CVector::Ones(n);
    CVector step(n);
    for (int a = 0; a < n; ++a) step(a) = std::polar(1.0, -w(a) * h_step);
    double sum = 0.0;
    for (long k = 0; k <= steps; ++k) {
        if (k % 1024 == 0) {
            const double t = k * h_step;
            for (int a = 0; a < n; ++a) phase(a) = std::polar(1.0, -w(a) * t);
        }
        Complex amp = 0.0;
        for (int a = 0; a < n; ++a) amp += weights(a) * phase(a);
        const double p = std::norm(amp);
        sum += (k == 0 || k == steps) ? 0.5 * p : p;
        phase = phase.cwiseProduct(step);
    }
    return sum * h_step / duration;
}

double time_averaged_population(const LatticeModel& model, int site, double duration) {
    RMatrix h = model.couplings();
    h.diagonal() = model.site_energies();
    const double hmax = h.cwiseAbs().maxCoeff();
    const double dt = hmax > 0.0 ? 0.05 / hmax : duration / 1000.0;
    return time_averaged_population(model, site, duration, dt);
}

double perturbative_average(const LatticeModel& model) {
    if (!model.is_chain()) throw InvalidArgument("perturbative_average requires a chain");
    const int n = model.n_sites();
    const int L = n - 1;
    const double eps = model.site_energies()(0) - model.site_energies()(n - 1);
    if (eps == 0.0)
        throw OutOfRegime("eps_1 - eps_{L+1} = 0: localized-population formula is invalid");
    const double v = model.couplings()(0, 1);
    return double(L + 1) * std::pow(std::abs(v / eps), 2 * L);
}

} // namespace zt
