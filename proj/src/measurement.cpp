#include "zt/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace zt {

MeasurementChannel::MeasurementChannel(std::vector<int> measured_sites, double tau)
    : sites_(std::move(measured_sites)), tau_(tau) {
    if (sites_.empty()) throw InvalidArgument("measured site set is empty");
    if (!(tau_ > 0.0) || !std::isfinite(tau_))
        throw InvalidArgument("measurement interval tau must be finite and > 0");
    std::sort(sites_.begin(), sites_.end());
    sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
    if (sites_.front() < 1) throw InvalidArgument("measured site indices are 1-based");
}

MeasurementChannel MeasurementChannel::all_sites(int n_sites, double tau) {
    std::vector<int> s(n_sites);
    for (int i = 0; i < n_sites; ++i) s[i] = i + 1;
    return {std::move(s), tau};
}

CMatrix apply_projection(const std::vector<int>& sites, const CMatrix& rho) {
    const Eigen::Index n = rho.rows();
    // Entry (i,j) survives iff i and j fall in the same block: both unmeasured
    // (the Q block) or i == j.
    std::vector<bool> measured(n, false);
    for (int s : sites) {
        if (s < 1 || s > n)
            throw InvalidArgument("measured site " + std::to_string(s) + " out of range");
        measured[s - 1] = true;
    }
    CMatrix out = rho;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && (measured[i] || measured[j])) out(i, j) = 0.0;
    return out;
}

DensityMatrix apply_channel(const MeasurementChannel& channel, const DensityMatrix& rho) {
    return DensityMatrix(apply_projection(channel.sites(), rho.matrix()));
}

TransitionMatrix transition_matrix(const CMatrix& u) { return {u.cwiseAbs2()}; }

TransitionMatrix transition_matrix(const CMatrix& h_eff, double tau) {
    if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
    return transition_matrix(propagator(h_eff, tau).u);
}

namespace {

void check_channel(const LatticeModel& model, const MeasurementChannel& channel) {
    if (channel.sites().back() > model.n_sites())
        throw InvalidArgument("measured site exceeds model size");
}

} // namespace

MeasuredTrajectory repeated_measurement_dense(const LatticeModel& model,
                                              const MeasurementChannel& channel,
                                              int n_steps) {
    if (n_steps < 0) throw InvalidArgument("n_steps must be >= 0");
    check_channel(model, channel);
    const auto h = effective_hamiltonian(model);
    const CMatrix u = propagator(h.matrix, channel.tau()).u;
    MeasuredTrajectory out;
    DensityMatrix rho = DensityMatrix::pure_site(model.n_sites(), model.initial_site());
    for (int k = 0; k <= n_steps; ++k) {
        if (k > 0) rho = apply_channel(channel, evolve(u, rho));
        out.times.push_back(k * channel.tau());
        out.populations.push_back(populations(rho));
        out.densities.push_back(rho.matrix());
    }
    return out;
}

MeasuredTrajectory repeated_measurement_trajectory(const LatticeModel& model,
                                                   const MeasurementChannel& channel,
                                                   int n_steps) {
    if (n_steps < 0) throw InvalidArgument("n_steps must be >= 0");
    check_channel(model, channel);
    if (!channel.covers_all(model.n_sites()))
        return repeated_measurement_dense(model, channel, n_steps);

    const auto h = effective_hamiltonian(model);
    const RMatrix t = transition_matrix(h.matrix, channel.tau()).t;
    MeasuredTrajectory out;
    RVector p = RVector::Zero(model.n_sites());
    p(model.initial_site() - 1) = 1.0;
    for (int k = 0; k <= n_steps; ++k) {
        if (k > 0) p = t * p;
        out.times.push_back(k * channel.tau());
        out.populations.push_back(p);
    }
    return out;
}

std::vector<DensityMatrix> measured_densities(const LatticeModel& model,
                                              const MeasurementChannel& channel,
                                              const DensityMatrix& rho0,
                                              const std::vector<double>& times) {
    check_channel(model, channel);
    if (rho0.dim() != model.n_sites()) throw InvalidArgument("rho0 dimension mismatch");
    const auto h = effective_hamiltonian(model);
    const Eigensystem es = eigensystem(h.matrix);
    const double tau = channel.tau();
    const CMatrix u_tau = propagator(h.matrix, es, tau).u;

    std::vector<DensityMatrix> out;
    out.reserve(times.size());
    DensityMatrix rho = rho0;  // state right after the last measurement
    long done = 0;             // measurements applied so far
    double prev = 0.0;
    for (double t : times) {
        if (!(t >= prev)) throw InvalidArgument("times must be sorted and nonnegative");
        prev = t;
        // number of measurements at or before t, tolerant to rounding of k*tau
        const long k = static_cast<long>(std::floor(t / tau + 1e-9));
        for (; done < k; ++done) rho = apply_channel(channel, evolve(u_tau, rho));
        const double rest = std::max(0.0, t - double(k) * tau);
        if (rest <= 1e-12 * std::max(1.0, tau))
            out.push_back(rho);
        else
            out.push_back(evolve(propagator(h.matrix, es, rest).u, rho));
    }
    return out;
}

RVector recursive_step(const RVector& p, double tau, double v) {
    const double a = tau * tau * v * v;
    if (!(2.0 * a < 1.0))
        throw OutOfRegime("recursive_step needs tau v < 1/sqrt(2), got tau v = " +
                          std::to_string(tau * std::abs(v)));
    const Eigen::Index n = p.size();
    RVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double inflow = 0.0;
        int neighbours = 0;
        if (i > 0) inflow += p(i - 1), ++neighbours;
        if (i + 1 < n) inflow += p(i + 1), ++neighbours;
        out(i) = (1.0 - neighbours * a) * p(i) + a * inflow;
    }
    return out;
}

double binomial_population(int L, long n, double tau, double v) {
    if (L < 0) throw InvalidArgument("L must be >= 0");
    if (n < L) throw OutOfRegime("binomial_population needs n >= L");
    const double a = tau * tau * v * v;
    if (!(double(n) * a < 1.0)) throw OutOfRegime("binomial_population needs n (tau v)^2 < 1");
    const long k = n - L;
    if (a == 0.0) return L == 0 ? 1.0 : 0.0;
    if (n > 50) {
        const double log_binom =
            std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) - std::lgamma(L + 1.0);
        return std::exp(log_binom + double(k) * std::log1p(-2.0 * a) + L * std::log(a));
    }
    double binom = 1.0;
    for (int j = 1; j <= L; ++j) binom = binom * double(k + j) / double(j);
    return binom * std::pow(1.0 - 2.0 * a, double(k)) * std::pow(a, L);
}

double default_averaging_time(const LatticeModel& model) {
    RMatrix h = model.couplings();
    h.diagonal() = model.site_energies();
    const RVector w = Eigen::SelfAdjointEigenSolver<RMatrix>(h, Eigen::EigenvaluesOnly)
                          .eigenvalues();
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a + 1 < w.size(); ++a) gap = std::min(gap, w(a + 1) - w(a));
    // resolve the slowest beat 100 times over, within [200, 1e5]
    const double t = gap > 0.0 ? 200.0 * std::numbers::pi / gap : 1e5;
    return std::clamp(t, 200.0, 1e5);
}

CrossoverResult crossover_time(const LatticeModel& model, double tau, double horizon) {
    if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
    if (horizon < tau) throw InvalidArgument("horizon must be >= tau");
    if (model.decay_rate() != 0.0 || model.trap_rates().cwiseAbs().maxCoeff() != 0.0)
        throw InvalidArgument("crossover_time requires kappa = Gamma = 0");
    const int n = model.n_sites();
    const int L = n - 1;

    CrossoverResult res;
    res.averaging_time = default_averaging_time(model);
    res.p_bar = time_averaged_population(model, n, res.averaging_time);
    if (model.is_chain() && model.site_energies()(0) != model.site_energies()(n - 1))
        res.p_bar_perturbative = perturbative_average(model);
    const double eps = model.site_energies()(0) - model.site_energies()(n - 1);
    res.scaling_estimate = eps != 0.0 ? double(L) / (eps * eps * tau)
                                      : std::numeric_limits<double>::infinity();

    const auto h = effective_hamiltonian(model);
    const RMatrix t = transition_matrix(h.matrix, tau).t;
    RVector p = RVector::Zero(n);
    p(model.initial_site() - 1) = 1.0;
    const long n_max = static_cast<long>(std::floor(horizon / tau + 1e-9));
    for (long k = 1; k <= n_max; ++k) {
        p = t * p;
        if (p(n - 1) > res.p_bar) {
            res.n_c = k;
            res.t_c = double(k) * tau;
            break;
        }
    }
    return res;
}

} // namespace zt
