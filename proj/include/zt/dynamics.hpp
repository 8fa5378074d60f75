#pragma once

#include "zt/linalg.hpp"
#include "zt/model.hpp"
#include "zt/types.hpp"

namespace zt {

/// Site-basis density matrix of the single-excitation sector. Trace may drop
/// below one when the excitation is trapped or decays.
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix m);

    static DensityMatrix pure_site(int n_sites, int site);
    static DensityMatrix maximally_mixed(int n_sites);

    const CMatrix& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }
    double trace() const { return m_.trace().real(); }
    Complex operator()(int i, int j) const { return m_(i, j); }

    /// Throws NumericalError unless Hermitian to 1e-12, eigenvalues >= -1e-10
    /// and trace in [0, 1 + 1e-10].
    void check() const;

private:
    CMatrix m_;
};

enum class PropagatorMethod { automatic, eigendecomposition, series };

struct Propagator {
    double t = 0.0;
    CMatrix u;
    PropagatorMethod method = PropagatorMethod::eigendecomposition;
};

/// U(t) = exp(-i H_eff t). With `automatic`, uses the eigendecomposition when
/// the eigenvector condition number is below 1e8 and the series otherwise.
Propagator propagator(const CMatrix& h_eff, double t,
                      PropagatorMethod method = PropagatorMethod::automatic);

/// Same, reusing a precomputed eigensystem of h_eff.
Propagator propagator(const CMatrix& h_eff, const Eigensystem& es, double t);

/// U rho U^dagger, re-symmetrized.
DensityMatrix evolve(const CMatrix& u, const DensityMatrix& rho);
inline DensityMatrix evolve(const Propagator& p, const DensityMatrix& rho) {
    return evolve(p.u, rho);
}

RVector populations(const DensityMatrix& rho);

/// (X + X^dagger) / 2
CMatrix hermitize(const CMatrix& x);

/// (1/T) int_0^T p_site(t) dt under the Hermitian part of the model, trapezoidal
/// rule with step dt. `site` is 1-based; the excitation starts at initial_site.
double time_averaged_population(const LatticeModel& model, int site, double duration,
                                double dt);
/// Default step 0.05 / ||H||_max.
double time_averaged_population(const LatticeModel& model, int site, double duration);

/// Leading-order localized population at the last site of a chain,
/// (L+1) (v/eps)^{2L} with eps = eps_1 - eps_{L+1}.
double perturbative_average(const LatticeModel& model);

} // namespace zt
