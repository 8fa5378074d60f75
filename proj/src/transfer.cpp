#include "zt/transfer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "zt/dynamics.hpp"
#include "zt/linalg.hpp"
#include "zt/measurement.hpp"

namespace zt {

const char* to_string(EfficiencyMethod m) {
    switch (m) {
    case EfficiencyMethod::closed_form: return "closed_form";
    case EfficiencyMethod::series: return "series";
    case EfficiencyMethod::quadrature: return "quadrature";
    }
    return "?";
}

namespace {

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 8> kGLNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGLWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

bool has_loss(const LatticeModel& model) {
    return model.decay_rate() > 0.0 || model.trap_rates().maxCoeff() > 0.0;
}

void require_loss(const LatticeModel& model) {
    if (!has_loss(model))
        throw EfficiencyUndefined("efficiency undefined: kappa = Gamma = 0 (no loss channel)");
}

// Split occupation integrals of the sites into trapped and dissipated parts.
struct Accounting {
    double trapped = 0.0;
    double dissipated = 0.0;
};

Accounting account(const LatticeModel& model, const RVector& occupation) {
    Accounting a;
    a.trapped = 2.0 * model.trap_rates().dot(occupation);
    a.dissipated = 2.0 * model.decay_rate() * occupation.sum();
    return a;
}

double slowest_decay_rate(const CVector& eigenvalues) {
    double rate = std::numeric_limits<double>::infinity();
    for (auto l : eigenvalues) rate = std::min(rate, -2.0 * l.imag());
    return rate;
}

// int_0^horizon rho(t) dt and rho(horizon) by composite Gauss-Legendre with
// propagators from the scaling-and-squaring series.
std::pair<CMatrix, CMatrix> integrate_density(const CMatrix& h_eff, const CMatrix& rho0,
                                              double horizon) {
    const double scale = std::max(1e-12, max_abs(h_eff) * double(h_eff.rows()));
    const long panels = std::max(1L, static_cast<long>(std::ceil(horizon * scale / 2.0)));
    const double h = horizon / double(panels);
    std::array<CMatrix, 8> u_nodes;
    for (std::size_t k = 0; k < 8; ++k)
        u_nodes[k] = expm_series(h_eff * Complex(0.0, -0.5 * h * (kGLNodes[k] + 1.0)));
    const CMatrix u_panel = expm_series(h_eff * Complex(0.0, -h));

    CMatrix integral = CMatrix::Zero(rho0.rows(), rho0.cols());
    CMatrix rho = rho0;
    for (long p = 0; p < panels; ++p) {
        for (std::size_t k = 0; k < 8; ++k)
            integral += (0.5 * h * kGLWeights[k]) * (u_nodes[k] * rho * u_nodes[k].adjoint());
        rho = hermitize(u_panel * rho * u_panel.adjoint());
    }
    return {hermitize(integral), rho};
}

} // namespace

EfficiencyResult efficiency_no_measurement(const LatticeModel& model) {
    require_loss(model);
    const auto h = effective_hamiltonian(model);
    const int n = model.n_sites();
    const Eigensystem es = eigensystem(h.matrix);
    for (auto l : es.eigenvalues)
        if (!(l.imag() < 0.0))
            throw NumericalError("H_eff eigenvalue " + std::to_string(l.real()) + "+" +
                                 std::to_string(l.imag()) +
                                 "i does not decay; the efficiency integral diverges");

    CMatrix rho0 = CMatrix::Zero(n, n);
    rho0(model.initial_site() - 1, model.initial_site() - 1) = 1.0;

    EfficiencyResult r;
    if (es.condition < kConditionCutoff && es.inverse.size() != 0) {
        // int_0^inf exp(-i (l_a - conj l_b) t) dt = 1 / (i (l_a - conj l_b))
        const CMatrix m = es.inverse * rho0 * es.inverse.adjoint();
        CMatrix k(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                k(a, b) = m(a, b) /
                          (Complex(0.0, 1.0) * (es.eigenvalues(a) - std::conj(es.eigenvalues(b))));
        const CMatrix x = es.vectors * k * es.vectors.adjoint();
        const auto acc = account(model, x.diagonal().real());
        r.trapped = acc.trapped;
        r.dissipated = acc.dissipated;
        r.residual = 0.0;
        r.method = EfficiencyMethod::closed_form;
    } else {
        const double rate = slowest_decay_rate(es.eigenvalues);
        const double horizon = 20.0 * std::numbers::ln2 / rate;
        const auto [x, rho_end] = integrate_density(h.matrix, rho0, horizon);
        const auto acc = account(model, x.diagonal().real());
        r.trapped = acc.trapped;
        r.dissipated = acc.dissipated;
        r.residual = rho_end.trace().real();
        r.method = EfficiencyMethod::quadrature;
    }
    r.eta = r.trapped;
    return r;
}

RMatrix interval_occupation_quadrature(const CMatrix& h_eff, double tau) {
    if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
    const double scale = max_abs(h_eff) * double(h_eff.rows());
    const long panels = std::max(8L, static_cast<long>(std::ceil(tau * scale / 2.0)));
    const double h = tau / double(panels);
    const Eigen::Index n = h_eff.rows();
    RMatrix a = RMatrix::Zero(n, n);
    std::array<CMatrix, 8> u_nodes;
    for (std::size_t k = 0; k < 8; ++k)
        u_nodes[k] = expm_series(h_eff * Complex(0.0, -0.5 * h * (kGLNodes[k] + 1.0)));
    const CMatrix u_panel = expm_series(h_eff * Complex(0.0, -h));
    CMatrix u_start = CMatrix::Identity(n, n);
    for (long p = 0; p < panels; ++p) {
        for (std::size_t k = 0; k < 8; ++k)
            a += (0.5 * h * kGLWeights[k]) * (u_nodes[k] * u_start).cwiseAbs2();
        u_start = u_panel * u_start;
    }
    return a;
}

RMatrix interval_occupation(const CMatrix& h_eff, double tau) {
    if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
    const Eigensystem es = eigensystem(h_eff);
    if (!(es.condition < kConditionCutoff) || es.inverse.size() == 0)
        return interval_occupation_quadrature(h_eff, tau);

    const Eigen::Index n = h_eff.rows();
    // g(a,b) = int_0^tau exp(-i (l_a - conj l_b) s) ds
    CMatrix g(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            const Complex mu = es.eigenvalues(a) - std::conj(es.eigenvalues(b));
            g(a, b) = tau * one_minus_exp_over(Complex(0.0, 1.0) * mu * tau);
        }
    RMatrix out(n, n);
    CVector c(n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index a = 0; a < n; ++a) c(a) = es.vectors(i, a) * es.inverse(a, j);
            out(i, j) = std::max(0.0, (c.transpose() * g * c.conjugate()).value().real());
        }
    return out;
}

EfficiencyResult efficiency_measured(const LatticeModel& model, double tau) {
    if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
    require_loss(model);
    const auto h = effective_hamiltonian(model);
    const int n = model.n_sites();
    const RMatrix t = transition_matrix(h.matrix, tau).t;
    const double radius = Eigen::EigenSolver<RMatrix>(t, false).eigenvalues().cwiseAbs().maxCoeff();
    if (!(radius < 1.0 - 1e-12))
        throw EfficiencyUndefined("series non-convergent: spectral radius of T is " +
                                  std::to_string(radius));

    const RMatrix occ = interval_occupation(h.matrix, tau);
    RVector p0 = RVector::Zero(n);
    p0(model.initial_site() - 1) = 1.0;
    // expected number of intervals started on each site
    const RVector visits = (RMatrix::Identity(n, n) - t).partialPivLu().solve(p0);
    const RVector occupation = occ * visits;
    const auto acc = account(model, occupation);

    EfficiencyResult r;
    r.trapped = acc.trapped;
    r.dissipated = acc.dissipated;
    r.residual = 0.0;
    r.eta = r.trapped;
    r.tau = tau;
    r.method = EfficiencyMethod::series;
    return r;
}

namespace {

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidArgument("tau grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw InvalidArgument("tau grid entries must be > 0");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw InvalidArgument("tau grid must be strictly increasing");
    }
}

TauScan scan_header(const LatticeModel& model) {
    TauScan s;
    s.n_sites = model.n_sites();
    s.eps = model.site_energies()(0) - model.site_energies()(model.n_sites() - 1);
    return s;
}

} // namespace

TauScan tau_scan_serial(const LatticeModel& model, const std::vector<double>& tau_grid) {
    check_grid(tau_grid);
    TauScan s = scan_header(model);
    for (double tau : tau_grid) s.points.push_back({tau, efficiency_measured(model, tau)});
    return s;
}

TauScan tau_scan(const LatticeModel& model, const std::vector<double>& tau_grid) {
    check_grid(tau_grid);
    TauScan s = scan_header(model);
    const long n = static_cast<long>(tau_grid.size());
    s.points.resize(n);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            s.points[i] = {tau_grid[i], efficiency_measured(model, tau_grid[i])};
        } catch (...) {
#pragma omp critical(zt_tau_scan_error)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return s;
}

std::vector<double> eps_tau_grid(double eps, double lo, double hi, int points) {
    if (!(eps > 0.0)) throw InvalidArgument("eps must be > 0");
    if (!(lo > 0.0) || !(hi > lo) || points < 1)
        throw InvalidArgument("need 0 < lo < hi and points >= 1");
    std::vector<double> g(points);
    for (int k = 0; k < points; ++k) {
        const double x = points == 1 ? lo : lo + (hi - lo) * double(k) / double(points - 1);
        g[k] = x / eps;
    }
    return g;
}

TauOptimum optimal_tau(const LatticeModel& model,
                       std::optional<std::pair<double, double>> bracket) {
    const int n = model.n_sites();
    const double eps = std::abs(model.site_energies()(0) - model.site_energies()(n - 1));
    if (!bracket) {
        if (eps == 0.0) throw InvalidArgument("default bracket needs eps_1 != eps_n");
        bracket = {0.1 / eps, 10.0 / eps};
    }
    auto [lo, hi] = *bracket;
    if (!(lo > 0.0) || !(hi > lo)) throw InvalidArgument("bracket must satisfy 0 < lo < hi");
    const double tol = 1e-3 / (eps > 0.0 ? eps : 1.0 / (hi - lo));

    const auto eta = [&](double tau) { return efficiency_measured(model, tau).eta; };

    // coarse scan picks the cell holding the global maximum
    constexpr int kCoarse = 64;
    std::vector<double> xs(kCoarse), ys(kCoarse);
    for (int k = 0; k < kCoarse; ++k) {
        xs[k] = lo + (hi - lo) * double(k) / double(kCoarse - 1);
        ys[k] = eta(xs[k]);
    }
    const int best = int(std::max_element(ys.begin(), ys.end()) - ys.begin());
    // A plateau (eta = 1 for every tau when trapping is the only loss) has no
    // interior optimum to refine; any point attains it.
    if (ys[best] - *std::min_element(ys.begin(), ys.end()) <= 1e-9) {
        const EfficiencyResult r = efficiency_measured(model, xs[best]);
        return {xs[best], r.eta, r};
    }
    if (best == 0 || best == kCoarse - 1)
        throw InvalidArgument("no interior maximum of eta(tau) in bracket [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");

    // golden-section search on the neighbouring cells
    double a = xs[best - 1], b = xs[best + 1];
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = eta(c), fd = eta(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a); fc = eta(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a); fd = eta(d);
        }
    }
    double tau_star = 0.5 * (a + b);
    EfficiencyResult r = efficiency_measured(model, tau_star);
    if (ys[best] > r.eta) { // golden section should not lose to the coarse point
        tau_star = xs[best];
        r = efficiency_measured(model, tau_star);
    }
    return {tau_star, r.eta, r};
}

namespace {

struct TwoSite {
    double eps, v, kappa, gamma;
};

TwoSite two_site_parameters(const LatticeModel& model) {
    if (model.n_sites() != 2) throw InvalidArgument("asymptotic formulas need a two-site model");
    return {model.site_energies()(0) - model.site_energies()(1), model.couplings()(0, 1),
            model.trap_rates()(1), model.decay_rate()};
}

} // namespace

AsymptoticEstimate asymptotic_efficiency_max(const LatticeModel& model) {
    const auto p = two_site_parameters(model);
    if (p.gamma == 0.0) return {1.0, std::abs(p.eps / p.v) >= 5.0};
    if (p.kappa <= 0.0 || p.v == 0.0)
        throw InvalidArgument("asymptotic_efficiency_max needs kappa > 0 and v != 0");
    const double value =
        1.0 - 2.0 * p.gamma * (1.0 / p.kappa + std::numbers::pi * std::abs(p.eps) / (4.0 * p.v * p.v));
    return {value, std::abs(p.eps / p.v) >= 5.0};
}

AsymptoticEstimate asymptotic_deficit_no_measurement(const LatticeModel& model) {
    const auto p = two_site_parameters(model);
    if (p.gamma == 0.0) return {0.0, std::abs(p.eps / p.v) >= 5.0};
    if (p.kappa <= 0.0 || p.v == 0.0)
        throw InvalidArgument("asymptotic_deficit_no_measurement needs kappa > 0 and v != 0");
    return {(p.gamma / p.kappa) * (p.eps / p.v) * (p.eps / p.v), std::abs(p.eps / p.v) >= 5.0};
}

} // namespace zt
