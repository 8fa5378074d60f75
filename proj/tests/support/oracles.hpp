#pragma once

// Independent reference computations used only by the tests. Nothing here
// shares code with the library's spectral or series paths.

#include <cmath>
#include <random>
#include <vector>

#include "zt/model.hpp"
#include "zt/rng.hpp"
#include "zt/types.hpp"

namespace oracle {

using zt::CMatrix;
using zt::Complex;
using zt::RMatrix;
using zt::RVector;

/// exp(-i h dt) by a plain 40-term Taylor sum; only for small |h| dt.
inline CMatrix short_step(const CMatrix& h, double dt) {
    const CMatrix a = h * Complex(0.0, -dt);
    CMatrix term = CMatrix::Identity(h.rows(), h.cols());
    CMatrix sum = term;
    for (int k = 1; k <= 40; ++k) {
        term = term * a / double(k);
        sum += term;
    }
    return sum;
}

struct DirectSum {
    double trapped = 0.0;
    double dissipated = 0.0;
    double residual = 0.0;
};

/// Efficiency under full-site measurement by explicit summation over
/// `intervals` measurement periods. Each period's occupation integral uses
/// composite Simpson on `sub` substeps of a Taylor-built propagator.
inline DirectSum direct_summation(const zt::LatticeModel& m, double tau, int intervals,
                                  int sub = 400) {
    const int n = m.n_sites();
    const CMatrix h = zt::effective_hamiltonian(m).matrix;
    const double ds = tau / sub;
    const CMatrix step = short_step(h, ds);
    RMatrix occ = RMatrix::Zero(n, n);
    CMatrix u = CMatrix::Identity(n, n);
    for (int k = 0; k <= sub; ++k) {
        const double w = (k == 0 || k == sub) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        occ += (w * ds / 3.0) * u.cwiseAbs2();
        if (k < sub) u = step * u;
    }
    const RMatrix t = u.cwiseAbs2();
    RVector trap_w = RVector::Zero(n), diss_w = RVector::Zero(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            trap_w(j) += 2.0 * m.trap_rates()(i) * occ(i, j);
            diss_w(j) += 2.0 * m.decay_rate() * occ(i, j);
        }
    RVector p = RVector::Zero(n);
    p(m.initial_site() - 1) = 1.0;
    DirectSum out;
    for (int k = 0; k < intervals; ++k) {
        out.trapped += trap_w.dot(p);
        out.dissipated += diss_w.dot(p);
        p = t * p;
    }
    out.residual = p.sum();
    return out;
}

/// Generator of the dephasing master equation applied to rho, written out
/// term by term.
inline CMatrix generator(const CMatrix& h_eff, double gamma, const std::vector<int>& sites,
                         const CMatrix& rho) {
    const Eigen::Index n = rho.rows();
    CMatrix out = Complex(0.0, -1.0) * (h_eff * rho - rho * h_eff.adjoint());
    if (gamma == 0.0) return out;
    CMatrix q = CMatrix::Identity(n, n);
    CMatrix channel = CMatrix::Zero(n, n);
    for (int s : sites) {
        CMatrix p = CMatrix::Zero(n, n);
        p(s - 1, s - 1) = 1.0;
        q -= p;
        channel += p * rho * p;
    }
    channel += q * rho * q;
    return out + 2.0 * gamma * (channel - rho);
}

/// int_0^inf rho(t) dt = -L^{-1} rho0, by assembling L column by column.
inline CMatrix integrated_density(const CMatrix& h_eff, double gamma,
                                  const std::vector<int>& sites, const CMatrix& rho0) {
    const Eigen::Index n = rho0.rows();
    CMatrix l(n * n, n * n);
    for (Eigen::Index c = 0; c < n * n; ++c) {
        CMatrix e = CMatrix::Zero(n, n);
        e(c % n, c / n) = 1.0;
        const CMatrix g = generator(h_eff, gamma, sites, e);
        for (Eigen::Index r = 0; r < n * n; ++r) l(r, c) = g(r % n, r / n);
    }
    CMatrix rhs(n * n, 1);
    for (Eigen::Index r = 0; r < n * n; ++r) rhs(r, 0) = -rho0(r % n, r / n);
    const CMatrix x = l.fullPivLu().solve(rhs);
    CMatrix out(n, n);
    for (Eigen::Index r = 0; r < n * n; ++r) out(r % n, r / n) = x(r, 0);
    return out;
}

/// Two-site Rabi oscillation from site 1: p_2(t) = 4v^2/(eps^2+4v^2) sin^2(Omega t/2).
inline double rabi_p2(double eps, double v, double t) {
    const double om = std::sqrt(eps * eps + 4.0 * v * v);
    const double s = std::sin(0.5 * om * t);
    return 4.0 * v * v / (om * om) * s * s;
}

/// Random dissipative model: complete graph on n sites, energies in [0, 5],
/// couplings in [0.5, 1.5], trap at site n.
inline zt::LatticeModel random_model(std::uint64_t seed, int n, double kappa_lo = 0.2,
                                     double gamma_lo = 0.005) {
    std::mt19937_64 rng(seed);
    RVector e(n);
    for (int i = 0; i < n; ++i) e(i) = zt::uniform(rng, 0.0, 5.0);
    RMatrix c = RMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) c(i, j) = c(j, i) = zt::uniform(rng, 0.5, 1.5);
    RVector traps = RVector::Zero(n);
    traps(n - 1) = zt::uniform(rng, kappa_lo, 1.0);
    return {e, c, traps, zt::uniform(rng, gamma_lo, 4.0 * gamma_lo)};
}

} // namespace oracle
