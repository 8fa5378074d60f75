#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "zt/model.hpp"
#include "zt/types.hpp"

namespace zt {

enum class EfficiencyMethod {
    closed_form, ///< spectral integral over [0, inf)
    series,      ///< geometric series over measurement intervals
    quadrature,  ///< numerical integration to a finite horizon
};

const char* to_string(EfficiencyMethod m);

/// Where the excitation ends up. `eta` equals `trapped`; `residual` is the
/// probability still in the system at the computation horizon (0 for
/// closed-form and series results).
struct EfficiencyResult {
    double eta = 0.0;
    double trapped = 0.0;
    double dissipated = 0.0;
    double residual = 0.0;
    std::optional<double> tau;
    EfficiencyMethod method = EfficiencyMethod::closed_form;

    double total() const { return trapped + dissipated + residual; }
};

/// eta = sum_traps 2 kappa_i int_0^inf p_i(t) dt without measurements.
EfficiencyResult efficiency_no_measurement(const LatticeModel& model);

/// eta under full-site measurement every tau: w . (I - T)^{-1} p(0), where w_j
/// is the trapped probability accrued during one interval started on site j.
EfficiencyResult efficiency_measured(const LatticeModel& model, double tau);

/// A_ij = int_0^tau |<i|exp(-i H_eff s)|j>|^2 ds, from the eigensystem when it
/// is well conditioned and by Gauss-Legendre quadrature otherwise.
RMatrix interval_occupation(const CMatrix& h_eff, double tau);
/// Composite 8-point Gauss-Legendre with at least 8 panels (64 nodes).
RMatrix interval_occupation_quadrature(const CMatrix& h_eff, double tau);

struct TauPoint {
    double tau = 0.0;
    EfficiencyResult result;
};

struct TauScan {
    std::vector<TauPoint> points;
    double eps = 0.0; ///< eps_1 - eps_n of the scanned model
    int n_sites = 0;
};

/// efficiency_measured on every grid point; grid must be positive and strictly increasing.
TauScan tau_scan(const LatticeModel& model, const std::vector<double>& tau_grid);
/// Single-threaded reference for tau_scan.
TauScan tau_scan_serial(const LatticeModel& model, const std::vector<double>& tau_grid);

/// `points` values of tau with eps*tau evenly spaced on [lo, hi].
std::vector<double> eps_tau_grid(double eps, double lo, double hi, int points);

struct TauOptimum {
    double tau = 0.0;
    double eta = 0.0;
    EfficiencyResult result;
};

/// Maximizes efficiency_measured over tau. Default bracket (0.1/eps, 10/eps).
TauOptimum optimal_tau(const LatticeModel& model,
                       std::optional<std::pair<double, double>> bracket = std::nullopt);

struct AsymptoticEstimate {
    double value = 0.0;
    bool in_regime = true; ///< false when eps/v < 5
};

/// 1 - 2 Gamma (1/kappa + pi eps / (4 v^2)) for a two-site model.
AsymptoticEstimate asymptotic_efficiency_max(const LatticeModel& model);
/// (Gamma/kappa) (eps/v)^2 for a two-site model.
AsymptoticEstimate asymptotic_deficit_no_measurement(const LatticeModel& model);

} // namespace zt
