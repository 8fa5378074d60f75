#include "zt/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "zt/measurement.hpp"
#include "zt/open_system.hpp"

namespace zt {

TwoQubitState reduce_to_pair(const DensityMatrix& rho, int a, int b) {
    const int n = rho.dim();
    if (a == b) throw InvalidArgument("pair sites must differ");
    if (a < 1 || a > n || b < 1 || b > n)
        throw InvalidArgument("pair (" + std::to_string(a) + "," + std::to_string(b) +
                              ") out of range");
    const Complex raa = rho(a - 1, a - 1);
    const Complex rbb = rho(b - 1, b - 1);
    const double gg = 1.0 - raa.real() - rbb.real();
    if (gg < -1e-10)
        throw NumericalError("inconsistent state: pair populations exceed 1 by " +
                             std::to_string(-gg));
    TwoQubitState s;
    s.rho.setZero();
    s.rho(0, 0) = std::max(gg, 0.0);
    s.rho(1, 1) = rbb.real();
    s.rho(2, 2) = raa.real();
    s.rho(2, 1) = rho(a - 1, b - 1);
    s.rho(1, 2) = rho(b - 1, a - 1);
    return s;
}

namespace {

bool single_excitation(const Eigen::Matrix4cd& r) {
    constexpr double tiny = 1e-14;
    for (int k = 0; k < 4; ++k)
        if (std::abs(r(3, k)) > tiny || std::abs(r(k, 3)) > tiny) return false;
    return std::abs(r(0, 1)) <= tiny && std::abs(r(0, 2)) <= tiny;
}

} // namespace

double concurrence(const TwoQubitState& state) {
    const Eigen::Matrix4cd r = 0.5 * (state.rho + state.rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(r);
    const Eigen::Vector4d w = es.eigenvalues();
    if (w.minCoeff() < -1e-10)
        throw InvalidArgument("concurrence of a non-PSD state (min eigenvalue " +
                              std::to_string(w.minCoeff()) + ")");
    const Eigen::Matrix4cd root =
        es.eigenvectors() * w.cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
    s(0, 3) = s(3, 0) = -1.0;
    s(1, 2) = s(2, 1) = 1.0;
    const Eigen::Matrix4cd a = root * s * root.conjugate();
    const Eigen::Vector4d l = Eigen::JacobiSVD<Eigen::Matrix4cd>(a).singularValues();
    const double c = std::max(0.0, l(0) - l(1) - l(2) - l(3));

    if (single_excitation(r)) {
        const double fast = 2.0 * std::abs(r(2, 1));
        if (std::abs(fast - c) > 1e-8)
            throw NumericalError("concurrence fast path disagrees with Wootters: " +
                                 std::to_string(fast) + " vs " + std::to_string(c));
        return fast;
    }
    return c;
}

double analytic_concurrence(double eps, double v, double t) {
    const double w2 = 8.0 * v * v + eps * eps;
    if (w2 == 0.0) return 0.0;
    return 4.0 * v * v / w2 * (1.0 - std::cos(std::sqrt(w2) * t));
}

double measured_concurrence(double eps, double v, double tau, double t) {
    if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
    const double base = 1.0 - 2.0 * analytic_concurrence(eps, v, tau);
    const double x = t / tau;
    const double k = std::round(x);
    double p;
    if (std::abs(x - k) <= 1e-9 * std::max(1.0, std::abs(x)))
        p = std::pow(base, k);
    else if (base >= 0.0)
        p = std::pow(base, x);
    else
        p = std::pow(-base, x) * std::cos(std::numbers::pi * x);
    return 0.5 * (1.0 - p);
}

LatticeModel symmetric_trimer(double eps3_shift) {
    RVector e(3);
    e << 1.0, 10.0, 1.0 + eps3_shift;
    RMatrix c = RMatrix::Zero(3, 3);
    c(0, 1) = c(1, 0) = 1.0;
    c(1, 2) = c(2, 1) = 1.0;
    return LatticeModel(e, c, RVector::Zero(3), 0.0, 2);
}

const char* to_string(ConcurrenceSource s) {
    switch (s) {
    case ConcurrenceSource::simulated: return "simulated";
    case ConcurrenceSource::analytic: return "analytic";
    case ConcurrenceSource::analytic_measured: return "analytic_measured";
    }
    return "unknown";
}

ConcurrenceSeries simulate_concurrence(const LatticeModel& model, const DynamicsSpec& dynamics,
                                       std::pair<int, int> pair,
                                       const std::vector<double>& times) {
    const auto rho0 = DensityMatrix::pure_site(model.n_sites(), model.initial_site());
    std::vector<DensityMatrix> states;
    if (std::holds_alternative<UnitaryDynamics>(dynamics)) {
        const CMatrix h = effective_hamiltonian(model).matrix;
        const Eigensystem es = eigensystem(h);
        double prev = 0.0;
        for (double t : times) {
            if (!(t >= prev)) throw InvalidArgument("times must be sorted and >= 0");
            prev = t;
            states.push_back(evolve(propagator(h, es, t), rho0));
        }
    } else if (const auto* m = std::get_if<RepeatedMeasurement>(&dynamics)) {
        states = measured_densities(model, MeasurementChannel(m->sites, m->tau), rho0, times);
    } else {
        const auto& d = std::get<DephasingDynamics>(dynamics);
        states = integrate_master(DephasingSpec{model, d.gamma, d.sites}, rho0, times);
    }
    ConcurrenceSeries out;
    out.times = times;
    out.source = ConcurrenceSource::simulated;
    out.values.reserve(states.size());
    for (const auto& rho : states)
        out.values.push_back(concurrence(reduce_to_pair(rho, pair.first, pair.second)));
    return out;
}

ConcurrenceSeries analytic_concurrence_series(double eps, double v,
                                              const std::vector<double>& times) {
    ConcurrenceSeries out{times, {}, ConcurrenceSource::analytic};
    for (double t : times) out.values.push_back(analytic_concurrence(eps, v, t));
    return out;
}

ConcurrenceSeries measured_concurrence_series(double eps, double v, double tau,
                                              const std::vector<double>& times) {
    ConcurrenceSeries out{times, {}, ConcurrenceSource::analytic_measured};
    for (double t : times) out.values.push_back(measured_concurrence(eps, v, tau, t));
    return out;
}

std::vector<double> linspace_times(double t_max, int n) {
    if (n < 2) throw InvalidArgument("need at least two time points");
    std::vector<double> t(n);
    for (int k = 0; k < n; ++k) t[k] = t_max * double(k) / double(n - 1);
    return t;
}

} // namespace zt
