#pragma once

#include <cstdint>
#include <vector>

#include "zt/dynamics.hpp"
#include "zt/model.hpp"
#include "zt/transfer.hpp"

namespace zt {

/// Dephasing of a site set D at rate gamma on top of the model's
/// non-Hermitian dynamics:
///   d rho/dt = -i (H rho - rho H^dag) + 2 gamma (sum_{i in D} P_i rho P_i + Q rho Q - rho).
struct DephasingSpec {
    LatticeModel model;
    double gamma = 0.0;
    std::vector<int> dephased_sites; // 1-based

    /// Dephasing on every site.
    static DephasingSpec all_sites(const LatticeModel& model, double gamma);
    void validate() const;
};

/// Largest step integrate_master accepts: 0.02 / max(||H_eff||_max, 2 gamma).
double max_master_step(const DephasingSpec& spec);

/// Fixed-step RK4 integration of the master equation; returns rho at each of
/// the sorted `times` (t >= 0).
std::vector<DensityMatrix> integrate_master(const DephasingSpec& spec, const DensityMatrix& rho0,
                                            const std::vector<double>& times, double dt);
/// Uses dt = max_master_step(spec).
std::vector<DensityMatrix> integrate_master(const DephasingSpec& spec, const DensityMatrix& rho0,
                                            const std::vector<double>& times);

enum class JumpMode {
    poisson,  ///< jumps at rate 2 gamma, exponential waiting times
    periodic, ///< jumps exactly every tau = 1 / (2 gamma)
};

struct EnsembleResult {
    int n_traj = 0;
    std::uint64_t seed = 0;
    std::vector<double> times;
    std::vector<CMatrix> mean;             ///< ensemble-mean density matrix per time
    std::vector<RVector> population_se;    ///< standard error of each site population
};

/// Quantum-jump unraveling of the dephasing master equation. Each trajectory
/// draws from its own RNG stream derived from (seed, trajectory index), and the
/// result does not depend on the number of threads.
///
/// In periodic mode the jump times are deterministic, so the outcome average is
/// taken exactly (the measurement channel applied to rho) and standard errors
/// are zero. With gamma = 0 there are no jumps and the deterministic evolution
/// is returned.
EnsembleResult quantum_jump_ensemble(const DephasingSpec& spec, const DensityMatrix& rho0,
                                     const std::vector<double>& times, int n_traj,
                                     std::uint64_t seed, JumpMode mode);
/// Single-threaded reference accumulating trajectories in index order.
EnsembleResult quantum_jump_ensemble_serial(const DephasingSpec& spec, const DensityMatrix& rho0,
                                            const std::vector<double>& times, int n_traj,
                                            std::uint64_t seed, JumpMode mode);

/// Transfer efficiency under dephasing of every site, integrated for 20
/// half-lives of the slowest Liouvillian mode. `tau` reports 1/(2 gamma).
EfficiencyResult efficiency_dephasing(const DephasingSpec& spec);

/// Slowest decay rate (min -Re of the Liouvillian spectrum).
double slowest_liouvillian_rate(const DephasingSpec& spec);

} // namespace zt
