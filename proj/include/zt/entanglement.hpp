#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "zt/dynamics.hpp"
#include "zt/model.hpp"
#include "zt/types.hpp"

namespace zt {

/// Two-site reduced state in the basis {|gg>, |ge>, |eg>, |ee>} (indices 0..3)
/// for an ordered pair (a, b); "eg" means site a excited.
struct TwoQubitState {
    Eigen::Matrix4cd rho;
};

/// Pair reduction of a single-excitation density matrix. Population outside
/// the pair, and norm already lost to traps or decay, goes to |gg>.
TwoQubitState reduce_to_pair(const DensityMatrix& rho, int a, int b);

/// Wootters concurrence from the singular values of sqrt(rho) S conj(sqrt(rho)),
/// S = sigma_y (x) sigma_y. Single-excitation states are cross-checked against
/// 2 |rho_{eg,ge}|.
double concurrence(const TwoQubitState& state);

/// Unitary three-site result for a symmetric chain started on the middle site,
/// eps = eps_2 - eps_1 = eps_2 - eps_3.
double analytic_concurrence(double eps, double v, double t);

/// 1/2 {1 - [1 - 2 C(tau)]^{t/tau}} with the middle site measured every tau.
/// For a negative base at non-integer t/tau the real part of the power is used.
double measured_concurrence(double eps, double v, double tau, double t);

/// Symmetric three-site chain eps_1 = eps_3 = v, eps_2 = 10 v, no loss,
/// excitation on site 2. `eps3_shift` breaks the degeneracy.
LatticeModel symmetric_trimer(double eps3_shift = 0.0);

struct UnitaryDynamics {};
struct RepeatedMeasurement {
    std::vector<int> sites;
    double tau = 0.0;
};
struct DephasingDynamics {
    double gamma = 0.0;
    std::vector<int> sites;
};
using DynamicsSpec = std::variant<UnitaryDynamics, RepeatedMeasurement, DephasingDynamics>;

enum class ConcurrenceSource { simulated, analytic, analytic_measured };
const char* to_string(ConcurrenceSource s);

struct ConcurrenceSeries {
    std::vector<double> times;
    std::vector<double> values;
    ConcurrenceSource source = ConcurrenceSource::simulated;
};

/// Evolves |initial_site> under `dynamics` and records C of the pair (a, b).
ConcurrenceSeries simulate_concurrence(const LatticeModel& model, const DynamicsSpec& dynamics,
                                       std::pair<int, int> pair,
                                       const std::vector<double>& times);

ConcurrenceSeries analytic_concurrence_series(double eps, double v,
                                              const std::vector<double>& times);
ConcurrenceSeries measured_concurrence_series(double eps, double v, double tau,
                                              const std::vector<double>& times);

/// n evenly spaced points on [0, t_max].
std::vector<double> linspace_times(double t_max, int n);

} // namespace zt
