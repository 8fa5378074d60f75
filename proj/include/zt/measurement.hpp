#pragma once

#include <optional>
#include <vector>

#include "zt/dynamics.hpp"
#include "zt/model.hpp"

namespace zt {

/// Non-selective projective measurement of the excitation on a set of sites,
/// repeated every `tau`. Unmeasured sites form one block Q = I - sum P_i.
class MeasurementChannel {
public:
    MeasurementChannel(std::vector<int> measured_sites, double tau);

    /// Every site measured.
    static MeasurementChannel all_sites(int n_sites, double tau);

    const std::vector<int>& sites() const { return sites_; }
    double tau() const { return tau_; }
    bool covers_all(int n_sites) const { return static_cast<int>(sites_.size()) == n_sites; }

private:
    std::vector<int> sites_; // 1-based, sorted, unique
    double tau_;
};

/// sum_{i in S} P_i rho P_i + Q rho Q
DensityMatrix apply_channel(const MeasurementChannel& channel, const DensityMatrix& rho);
/// Projection for a bare site set, shared with the dephasing generator.
CMatrix apply_projection(const std::vector<int>& sites, const CMatrix& rho);

/// T_ij = |<i|U(tau)|j>|^2, so that p(t + tau) = T p(t) under full measurement.
struct TransitionMatrix {
    RMatrix t;
};

TransitionMatrix transition_matrix(const CMatrix& h_eff, double tau);
TransitionMatrix transition_matrix(const CMatrix& u);

struct MeasuredTrajectory {
    std::vector<double> times;            // t_k = k tau
    std::vector<RVector> populations;     // p(t_k), after the k-th measurement
    std::vector<CMatrix> densities;       // filled on the dense path only
};

/// n_steps measurement intervals starting from |initial_site>. Uses p <- T p
/// when every site is measured and full density matrices otherwise.
MeasuredTrajectory repeated_measurement_trajectory(const LatticeModel& model,
                                                   const MeasurementChannel& channel,
                                                   int n_steps);

/// Always the density-matrix path: evolve, then apply the channel, n_steps times.
MeasuredTrajectory repeated_measurement_dense(const LatticeModel& model,
                                              const MeasurementChannel& channel,
                                              int n_steps);

/// Density matrices at arbitrary times under repeated measurement starting
/// from `rho0`; a measurement happens at every k tau <= t (k >= 1) before t is recorded.
std::vector<DensityMatrix> measured_densities(const LatticeModel& model,
                                              const MeasurementChannel& channel,
                                              const DensityMatrix& rho0,
                                              const std::vector<double>& times);

/// Small-tau recursion p_i <- (1 - n_i a) p_i + a (p_{i-1} + p_{i+1}), a = (tau v)^2,
/// n_i the number of chain neighbours of site i. Requires tau v < 1/sqrt(2).
RVector recursive_step(const RVector& p, double tau, double v);

/// C(n, n-L) (1 - 2a)^{n-L} a^L with a = (tau v)^2; requires n >= L and n a < 1.
double binomial_population(int L, long n, double tau, double v);

struct CrossoverResult {
    std::optional<double> t_c;        // first t_n with p_target(t_n) > p_bar
    std::optional<long> n_c;
    double p_bar = 0.0;               // numerical time average without measurement
    std::optional<double> p_bar_perturbative; // chains only
    double scaling_estimate = 0.0;    // L / (eps^2 tau)
    double averaging_time = 0.0;
};

/// Zeno to anti-Zeno crossover at the last site under full-site measurement
/// every tau; the model must have no trapping and no decay.
CrossoverResult crossover_time(const LatticeModel& model, double tau, double horizon);

/// Averaging window used by crossover_time for p_bar.
double default_averaging_time(const LatticeModel& model);

} // namespace zt
