#include "zt/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "zt/linalg.hpp"
#include "zt/measurement.hpp"
#include "zt/rng.hpp"

namespace zt {

DephasingSpec DephasingSpec::all_sites(const LatticeModel& model, double gamma) {
    std::vector<int> s(model.n_sites());
    for (int i = 0; i < model.n_sites(); ++i) s[i] = i + 1;
    return {model, gamma, std::move(s)};
}

void DephasingSpec::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw InvalidArgument("dephasing rate gamma must be finite and >= 0");
    if (gamma > 0.0 && dephased_sites.empty())
        throw InvalidArgument("dephased site set is empty while gamma > 0");
    for (int s : dephased_sites)
        if (s < 1 || s > model.n_sites())
            throw InvalidArgument("dephased site " + std::to_string(s) + " out of range");
}

double max_master_step(const DephasingSpec& spec) {
    const double hmax = max_abs(effective_hamiltonian(spec.model).matrix);
    const double scale = std::max(hmax, 2.0 * spec.gamma);
    return scale > 0.0 ? 0.02 / scale : std::numeric_limits<double>::infinity();
}

namespace {

// Column-major vectorization: vec(rho)[i + n j] = rho(i, j).
CMatrix liouvillian(const DephasingSpec& spec) {
    const CMatrix h = effective_hamiltonian(spec.model).matrix;
    const Eigen::Index n = h.rows();
    const Eigen::Index d = n * n;
    CMatrix l = CMatrix::Zero(d, d);
    const Complex mi(0.0, -1.0);
    // -i (H rho - rho H^dag):  vec(H rho) = (I (x) H) vec rho,  vec(rho H^dag) = (conj(H) (x) I) vec rho
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index row = i + n * j;
            for (Eigen::Index k = 0; k < n; ++k) {
                l(row, k + n * j) += mi * h(i, k);
                l(row, i + n * k) -= mi * std::conj(h(j, k));
            }
        }
    if (spec.gamma > 0.0) {
        std::vector<bool> measured(n, false);
        for (int s : spec.dephased_sites) measured[s - 1] = true;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                if (i != j && (measured[i] || measured[j]))
                    l(i + n * j, i + n * j) -= 2.0 * spec.gamma;
    }
    return l;
}

CVector vec(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

CMatrix unvec(const CVector& v, Eigen::Index n) { return Eigen::Map<const CMatrix>(v.data(), n, n); }

void hermitize_vec(CVector& x, Eigen::Index n) {
    for (Eigen::Index j = 0; j < n; ++j) {
        x(j + n * j) = x(j + n * j).real();
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const Complex a = 0.5 * (x(i + n * j) + std::conj(x(j + n * i)));
            x(i + n * j) = a;
            x(j + n * i) = std::conj(a);
        }
    }
}

// One RK4 step of x' = L x is x <- (I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24) x;
// a functional q' = f.x advances by h f.(I + hL/2 + (hL)^2/6 + (hL)^3/24) x.
struct Rk4Map {
    double h = 0.0;
    CMatrix step;
    CMatrix quad; // h (I + hL/2 + ...) for the accumulators
};

Rk4Map make_rk4(const CMatrix& l, double h) {
    const Eigen::Index d = l.rows();
    const CMatrix hl = h * l;
    const CMatrix i = CMatrix::Identity(d, d);
    const CMatrix hl2 = hl * hl;
    const CMatrix hl3 = hl2 * hl;
    Rk4Map m;
    m.h = h;
    m.step = i + hl + hl2 / 2.0 + hl3 / 6.0 + hl3 * hl / 24.0;
    m.quad = h * (i + hl / 2.0 + hl2 / 6.0 + hl3 / 24.0);
    return m;
}

struct MasterRun {
    std::vector<DensityMatrix> states;
    double trapped = 0.0;
    double dissipated = 0.0;
};

MasterRun run_master(const DephasingSpec& spec, const DensityMatrix& rho0,
                     const std::vector<double>& times, double dt, bool accumulate) {
    spec.validate();
    const Eigen::Index n = spec.model.n_sites();
    if (rho0.dim() != n) throw InvalidArgument("rho0 dimension mismatch");
    const double dt_max = max_master_step(spec);
    if (!(dt > 0.0) || dt > dt_max * (1.0 + 1e-12))
        throw InvalidArgument("step-size violation: dt = " + std::to_string(dt) +
                              " exceeds 0.02 / max(||H||_max, 2 gamma) = " +
                              std::to_string(dt_max));

    const CMatrix l = liouvillian(spec);
    // functionals picking 2 kappa_i rho_ii and 2 Gamma rho_ii
    Eigen::RowVectorXcd f_trap = Eigen::RowVectorXcd::Zero(n * n);
    Eigen::RowVectorXcd f_diss = Eigen::RowVectorXcd::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        f_trap(i + n * i) = 2.0 * spec.model.trap_rates()(i);
        f_diss(i + n * i) = 2.0 * spec.model.decay_rate();
    }

    MasterRun out;
    CVector x = vec(rho0.matrix());
    double t_now = 0.0;
    std::map<long, Rk4Map> cache; // keyed by step count per unit interval length
    Rk4Map map;
    Eigen::RowVectorXcd g_trap, g_diss;
    for (double t : times) {
        if (!(t >= t_now - 1e-15)) throw InvalidArgument("times must be sorted and >= 0");
        const double span = t - t_now;
        if (span > 0.0) {
            const long steps = static_cast<long>(std::ceil(span / dt - 1e-9));
            const double h = span / double(steps);
            if (map.h != h) {
                map = make_rk4(l, h);
                if (accumulate) {
                    g_trap = f_trap * map.quad;
                    g_diss = f_diss * map.quad;
                }
            }
            for (long s = 0; s < steps; ++s) {
                if (accumulate) {
                    out.trapped += (g_trap * x).value().real();
                    out.dissipated += (g_diss * x).value().real();
                }
                x = map.step * x;
                hermitize_vec(x, n);
            }
            if (!x.allFinite()) throw NumericalError("master equation state became non-finite");
            t_now = t;
        }
        DensityMatrix rho(unvec(x, n));
        const RVector p = populations(rho);
        if (p.minCoeff() < -1e-8 || p.maxCoeff() > 1.0 + 1e-8)
            throw NumericalError("master equation populations left [0,1] at t = " +
                                 std::to_string(t));
        out.states.push_back(std::move(rho));
    }
    return out;
}

} // namespace

std::vector<DensityMatrix> integrate_master(const DephasingSpec& spec, const DensityMatrix& rho0,
                                            const std::vector<double>& times, double dt) {
    return run_master(spec, rho0, times, dt, false).states;
}

std::vector<DensityMatrix> integrate_master(const DephasingSpec& spec, const DensityMatrix& rho0,
                                            const std::vector<double>& times) {
    return integrate_master(spec, rho0, times, max_master_step(spec));
}

double slowest_liouvillian_rate(const DephasingSpec& spec) {
    spec.validate();
    const CMatrix l = liouvillian(spec);
    Eigen::ComplexEigenSolver<CMatrix> es(l, false);
    double rate = std::numeric_limits<double>::infinity();
    for (auto z : es.eigenvalues()) rate = std::min(rate, -z.real());
    return rate;
}

EfficiencyResult efficiency_dephasing(const DephasingSpec& spec) {
    spec.validate();
    const LatticeModel& model = spec.model;
    if (!(model.decay_rate() > 0.0 || model.trap_rates().maxCoeff() > 0.0))
        throw EfficiencyUndefined("efficiency undefined: kappa = Gamma = 0 (no loss channel)");
    if (spec.gamma > 0.0 && static_cast<int>(spec.dephased_sites.size()) != model.n_sites())
        throw InvalidArgument("efficiency_dephasing requires dephasing on every site");
    const double rate = slowest_liouvillian_rate(spec);
    if (!(rate > 1e-14))
        throw EfficiencyUndefined("a Liouvillian mode does not decay; efficiency integral diverges");
    const double horizon = 20.0 * std::numbers::ln2 / rate;

    const auto rho0 = DensityMatrix::pure_site(model.n_sites(), model.initial_site());
    const auto run = run_master(spec, rho0, {horizon}, max_master_step(spec), true);
    EfficiencyResult r;
    r.trapped = run.trapped;
    r.dissipated = run.dissipated;
    r.residual = run.states.back().trace();
    r.eta = r.trapped;
    if (spec.gamma > 0.0) r.tau = 1.0 / (2.0 * spec.gamma);
    r.method = EfficiencyMethod::quadrature;
    return r;
}

// ---------------------------------------------------------------------------
// quantum jumps

namespace {

struct Accumulator {
    std::vector<CMatrix> rho;
    std::vector<RVector> p_sum;
    std::vector<RVector> p2_sum;

    Accumulator(std::size_t n_times, Eigen::Index n)
        : rho(n_times, CMatrix::Zero(n, n)),
          p_sum(n_times, RVector::Zero(n)),
          p2_sum(n_times, RVector::Zero(n)) {}

    void add(const Accumulator& o) {
        for (std::size_t k = 0; k < rho.size(); ++k) {
            rho[k] += o.rho[k];
            p_sum[k] += o.p_sum[k];
            p2_sum[k] += o.p2_sum[k];
        }
    }
};

class TrajectoryEngine {
public:
    TrajectoryEngine(const DephasingSpec& spec, const DensityMatrix& rho0,
                     const std::vector<double>& times)
        : spec_(spec), times_(times), h_(effective_hamiltonian(spec.model).matrix),
          es_(eigensystem(h_)), n_(spec.model.n_sites()), measured_(n_, false) {
        for (int s : spec.dephased_sites) measured_[s - 1] = true;
        Eigen::SelfAdjointEigenSolver<CMatrix> sa(hermitize(rho0.matrix()));
        weights_ = sa.eigenvalues().cwiseMax(0.0);
        vectors_ = sa.eigenvectors();
        total_ = weights_.sum();
        spectral_ = es_.condition < kConditionCutoff && es_.inverse.size() != 0;
    }

    void run(std::uint64_t seed, long index, Accumulator& acc) const {
        std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(index)));
        CVector psi = initial_state(rng);
        const double rate = 2.0 * spec_.gamma;
        double t_state = 0.0;
        double t_jump = next_jump(rng, 0.0, rate);
        for (std::size_t k = 0; k < times_.size(); ++k) {
            const double t = times_[k];
            while (t_jump <= t) {
                psi = advance(psi, t_jump - t_state);
                t_state = t_jump;
                jump(psi, rng);
                t_jump = next_jump(rng, t_jump, rate);
            }
            const CVector now = advance(psi, t - t_state);
            acc.rho[k] += now * now.adjoint();
            const RVector p = now.cwiseAbs2();
            acc.p_sum[k] += p;
            acc.p2_sum[k] += p.cwiseAbs2();
        }
    }

    Eigen::Index dim() const { return n_; }

private:
    CVector initial_state(std::mt19937_64& rng) const {
        if (total_ <= 0.0) return CVector::Zero(n_);
        // pick an eigenvector of rho0 with probability lambda_k / tr rho0
        double r = uniform01(rng) * total_;
        Eigen::Index pick = weights_.size() - 1;
        for (Eigen::Index k = weights_.size() - 1; k >= 0; --k) {
            if (weights_(k) <= 0.0) continue;
            pick = k;
            if (r < weights_(k)) break;
            r -= weights_(k);
        }
        return vectors_.col(pick) * std::sqrt(total_);
    }

    static double next_jump(std::mt19937_64& rng, double from, double rate) {
        if (rate <= 0.0) return std::numeric_limits<double>::infinity();
        return from - std::log1p(-uniform01(rng)) / rate;
    }

    CVector advance(const CVector& psi, double dt) const {
        if (dt <= 0.0) return psi;
        if (spectral_) {
            const CVector phases = (es_.eigenvalues * Complex(0.0, -dt)).array().exp().matrix();
            return es_.vectors * phases.cwiseProduct(es_.inverse * psi);
        }
        return expm_series(h_ * Complex(0.0, -dt)) * psi;
    }

    // Non-selective channel unraveled on a pure state; the norm is kept.
    void jump(CVector& psi, std::mt19937_64& rng) const {
        const double norm2 = psi.squaredNorm();
        if (norm2 <= 0.0) return;
        double r = uniform01(rng) * norm2;
        for (Eigen::Index i = 0; i < n_; ++i) {
            if (!measured_[i]) continue;
            const double pi = std::norm(psi(i));
            if (r < pi) {
                const Complex amp = psi(i);
                psi.setZero();
                psi(i) = amp * std::sqrt(norm2 / pi);
                return;
            }
            r -= pi;
        }
        // Q block: unmeasured sites
        double q2 = 0.0;
        for (Eigen::Index i = 0; i < n_; ++i)
            if (!measured_[i]) q2 += std::norm(psi(i));
        if (q2 <= 0.0) {
            // rounding pushed r past the last measured site; fall back to the largest one
            Eigen::Index best = 0;
            psi.cwiseAbs2().maxCoeff(&best);
            const Complex amp = psi(best);
            psi.setZero();
            psi(best) = amp * std::sqrt(norm2 / std::norm(amp));
            return;
        }
        for (Eigen::Index i = 0; i < n_; ++i)
            if (measured_[i]) psi(i) = 0.0;
        psi *= std::sqrt(norm2 / q2);
    }

    const DephasingSpec& spec_;
    const std::vector<double>& times_;
    CMatrix h_;
    Eigensystem es_;
    Eigen::Index n_;
    std::vector<bool> measured_;
    RVector weights_;
    CMatrix vectors_;
    double total_ = 0.0;
    bool spectral_ = true;
};

void check_ensemble_args(const DephasingSpec& spec, const DensityMatrix& rho0,
                         const std::vector<double>& times, int n_traj) {
    spec.validate();
    if (n_traj < 1) throw InvalidArgument("n_traj must be >= 1");
    if (rho0.dim() != spec.model.n_sites()) throw InvalidArgument("rho0 dimension mismatch");
    double prev = 0.0;
    for (double t : times) {
        if (!(t >= prev)) throw InvalidArgument("times must be sorted and >= 0");
        prev = t;
    }
}

// Deterministic cases: no jumps, or jumps at fixed times.
std::optional<EnsembleResult> deterministic_ensemble(const DephasingSpec& spec,
                                                     const DensityMatrix& rho0,
                                                     const std::vector<double>& times,
                                                     int n_traj, std::uint64_t seed,
                                                     JumpMode mode) {
    if (spec.gamma > 0.0 && mode == JumpMode::poisson) return std::nullopt;
    EnsembleResult r;
    r.n_traj = n_traj;
    r.seed = seed;
    r.times = times;
    const Eigen::Index n = spec.model.n_sites();
    if (spec.gamma == 0.0) {
        const CMatrix h = effective_hamiltonian(spec.model).matrix;
        const Eigensystem es = eigensystem(h);
        for (double t : times) {
            r.mean.push_back(evolve(propagator(h, es, t), rho0).matrix());
            r.population_se.push_back(RVector::Zero(n));
        }
        return r;
    }
    const MeasurementChannel channel(spec.dephased_sites, 1.0 / (2.0 * spec.gamma));
    for (auto& rho : measured_densities(spec.model, channel, rho0, times)) {
        r.mean.push_back(rho.matrix());
        r.population_se.push_back(RVector::Zero(n));
    }
    return r;
}

EnsembleResult finish(const Accumulator& acc, const std::vector<double>& times, int n_traj,
                      std::uint64_t seed) {
    EnsembleResult r;
    r.n_traj = n_traj;
    r.seed = seed;
    r.times = times;
    const double nt = double(n_traj);
    for (std::size_t k = 0; k < times.size(); ++k) {
        r.mean.push_back(hermitize(acc.rho[k] / nt));
        const RVector mean = acc.p_sum[k] / nt;
        RVector se = RVector::Zero(mean.size());
        if (n_traj > 1) {
            const RVector var =
                ((acc.p2_sum[k] - nt * mean.cwiseAbs2()) / (nt - 1.0)).cwiseMax(0.0);
            se = (var / nt).cwiseSqrt();
        }
        r.population_se.push_back(se);
    }
    return r;
}

constexpr long kBlock = 64; // trajectories summed serially inside a block

} // namespace

EnsembleResult quantum_jump_ensemble_serial(const DephasingSpec& spec, const DensityMatrix& rho0,
                                            const std::vector<double>& times, int n_traj,
                                            std::uint64_t seed, JumpMode mode) {
    check_ensemble_args(spec, rho0, times, n_traj);
    if (auto d = deterministic_ensemble(spec, rho0, times, n_traj, seed, mode)) return *d;
    const TrajectoryEngine engine(spec, rho0, times);
    // same block structure as the parallel version, so the sums match bit for bit
    Accumulator total(times.size(), engine.dim());
    for (long b = 0; b * kBlock < n_traj; ++b) {
        Accumulator block(times.size(), engine.dim());
        const long end = std::min<long>(n_traj, (b + 1) * kBlock);
        for (long i = b * kBlock; i < end; ++i) engine.run(seed, i, block);
        total.add(block);
    }
    return finish(total, times, n_traj, seed);
}

EnsembleResult quantum_jump_ensemble(const DephasingSpec& spec, const DensityMatrix& rho0,
                                     const std::vector<double>& times, int n_traj,
                                     std::uint64_t seed, JumpMode mode) {
    check_ensemble_args(spec, rho0, times, n_traj);
    if (auto d = deterministic_ensemble(spec, rho0, times, n_traj, seed, mode)) return *d;
    const TrajectoryEngine engine(spec, rho0, times);
    const long n_blocks = (n_traj + kBlock - 1) / kBlock;
    std::vector<Accumulator> blocks(n_blocks, Accumulator(times.size(), engine.dim()));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long b = 0; b < n_blocks; ++b) {
        try {
            const long end = std::min<long>(n_traj, (b + 1) * kBlock);
            for (long i = b * kBlock; i < end; ++i) engine.run(seed, i, blocks[b]);
        } catch (...) {
#pragma omp critical(zt_ensemble_error)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    Accumulator total(times.size(), engine.dim());
    for (const auto& b : blocks) total.add(b);
    return finish(total, times, n_traj, seed);
}

} // namespace zt
