// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "zt/entanglement.hpp"
#include "zt/measurement.hpp"
#include "zt/open_system.hpp"
#include "zt/rng.hpp"
#include "zt/transfer.hpp"

using namespace zt;
using std::numbers::pi;

namespace {

// tolerances
constexpr double kPeakTol = 0.01;          // eta(pi/eps) = 0.98 +- 0.01
constexpr double kAsymptoticTol = 0.005;   // vs the two-site maximum formula
constexpr double kBaselineTarget = 0.80;
constexpr double kBaselineTol = 0.02;
constexpr double kZenoCeiling = 0.1;       // eta at the smallest tau
constexpr double kLargeTauTol = 0.03;
constexpr double kSeriesTol = 1e-6;
constexpr double kSumRuleTol = 1e-6;
constexpr double kCorrespondenceTol = 0.03;
constexpr double kConcurrenceLimitTol = 0.01;
constexpr double kMeasuredFormulaTol = 0.02;
constexpr double kUnitaryFormulaTol = 1e-6;
constexpr double kMcFloor = 0.01;
constexpr double kCrossoverSpread = 2.0;
constexpr double kBinomialRelTol = 0.20;
constexpr double kTopologyTol = 0.05;
constexpr double kDegeneracyDrop = 0.05;

int failures = 0;
double worst_sum_rule = 0.0;

void report(int id, bool ok, const std::string& what) {
    std::printf("[%s] %2d  %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const EfficiencyResult& tally(const EfficiencyResult& r) {
    worst_sum_rule = std::max(worst_sum_rule, std::abs(r.total() - 1.0));
    return r;
}

LatticeModel dimer(double eps, double kappa = 0.5, double gamma = 0.001) {
    return build_chain(2, {eps, 0.0}, 1.0, kappa, gamma);
}

double peak_eta(const LatticeModel& m, double eps) {
    double best = 0.0;
    for (const auto& p : tau_scan(m, eps_tau_grid(eps, 0.05, 20.0, 400)).points)
        best = std::max(best, p.result.eta);
    return best;
}

void criterion1() {
    const auto m = dimer(10.0);
    const double eta = tally(efficiency_measured(m, pi / 10.0)).eta;
    const double asym = asymptotic_efficiency_max(m).value;
    const bool ok = std::abs(eta - 0.98) <= kPeakTol && std::abs(eta - asym) <= kAsymptoticTol;
    report(1, ok, fmt("peak efficiency: eta(tau=pi/eps) = %.5f (0.98 +- %.2f), asymptotic max %.5f, "
                      "|diff| = %.5f (<= %.3f)",
                      eta, kPeakTol, asym, std::abs(eta - asym), kAsymptoticTol));
}

void criterion2() {
    const double eta = tally(efficiency_no_measurement(dimer(10.0))).eta;
    report(2, std::abs(eta - kBaselineTarget) <= kBaselineTol,
           fmt("no-measurement baseline: eta = %.5f (target %.2f +- %.2f)", eta,
               kBaselineTarget, kBaselineTol));
}

void criterion3() {
    const std::vector<double> eps_values{5.0, 10.0, 15.0, 20.0};
    bool a = true, b = true, c = true, d = true;
    std::string detail;
    double prev_tail = 2.0;
    for (double eps : eps_values) {
        const auto m = dimer(eps);
        const auto scan = tau_scan(m, eps_tau_grid(eps, 0.05, 20.0, 400));
        std::vector<double> eta;
        for (const auto& p : scan.points) eta.push_back(tally(p.result).eta);
        const double base = tally(efficiency_no_measurement(m)).eta;

        const auto top = std::max_element(eta.begin(), eta.end()) - eta.begin();
        int local_max = 0;
        bool unique = true;
        for (std::size_t k = 1; k + 1 < eta.size(); ++k)
            if (eta[k] > eta[k - 1] && eta[k] > eta[k + 1]) {
                ++local_max;
                if (long(k) != top && eta[k] >= eta[top]) unique = false;
            }
        const double eps_tau_star = eps * scan.points[top].tau;
        const bool ok_a = eta.front() < kZenoCeiling;
        const bool ok_b = unique && top > 0 && top + 1 < long(eta.size()) &&
                          eps_tau_star >= 0.5 * pi && eps_tau_star <= 1.5 * pi;
        const bool ok_c = std::abs(eta.back() - base) <= kLargeTauTol;
        const bool ok_d = eta.back() < prev_tail;
        prev_tail = eta.back();
        a &= ok_a;
        b &= ok_b;
        c &= ok_c;
        d &= ok_d;
        detail += fmt(" | eps=%g: eta(0.05)=%.3f, eps*tau*=%.3f (%d local max), eta(20)=%.3f "
                      "vs base %.3f",
                      eps, eta.front(), eps_tau_star, local_max, eta.back(), base);
    }
    report(3, a && b && c && d,
           fmt("efficiency curve shape: (a) %s (b) %s (c) %s (d) %s", a ? "pass" : "FAIL",
               b ? "pass" : "FAIL", c ? "pass" : "FAIL", d ? "pass" : "FAIL") +
               detail);
}

void criterion4() {
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const std::uint64_t seed = 4000 + k;
        const auto m = oracle::random_model(seed, 2 + int(k % 4));
        std::mt19937_64 rng(stream_seed(seed, 1));
        const double tau = uniform(rng, 0.2, 2.0);
        const auto series = tally(efficiency_measured(m, tau));
        const auto direct = oracle::direct_summation(m, tau, 10000);
        worst_sum_rule = std::max(
            worst_sum_rule, std::abs(direct.trapped + direct.dissipated + direct.residual - 1.0));
        worst = std::max(worst, std::abs(series.eta - direct.trapped));
    }
    report(4, worst <= kSeriesTol,
           fmt("series vs direct summation (1e4 intervals, 20 models): max |d eta| = %.2e "
               "(<= %.0e)",
               worst, kSeriesTol));
}

void criterion5() {
    report(5, worst_sum_rule <= kSumRuleTol,
           fmt("sum rule over items 1-4: max |trapped + dissipated + residual - 1| = %.2e "
               "(<= %.0e)",
               worst_sum_rule, kSumRuleTol));
}

void criterion6() {
    const double eps = 10.0;
    const auto m = dimer(eps);
    const double deph = efficiency_dephasing(DephasingSpec::all_sites(m, eps / 2.0)).eta;
    const double meas = efficiency_measured(m, 1.0 / eps).eta;
    double best_eta = -1.0, best_two_gamma = 0.0;
    for (int k = 0; k <= 40; ++k) {
        const double two_gamma = 0.1 * eps * std::pow(100.0, k / 40.0);
        const double eta = efficiency_dephasing(DephasingSpec::all_sites(m, two_gamma / 2.0)).eta;
        if (eta > best_eta) best_eta = eta, best_two_gamma = two_gamma;
    }
    const bool ok = std::abs(deph - meas) <= kCorrespondenceTol && best_two_gamma >= eps / 3.0 &&
                    best_two_gamma <= 3.0 * eps;
    report(6, ok,
           fmt("measurement-dephasing: eta_deph(2g=eps) = %.5f vs eta_meas(tau=1/eps) = %.5f "
               "(|d| <= %.2f); sweep max at 2g = %.3f (in [%.2f, %.0f])",
               deph, meas, kCorrespondenceTol, best_two_gamma, eps / 3.0, 3.0 * eps));
}

void criterion7() {
    const auto model = symmetric_trimer();
    const std::pair<int, int> pair{1, 3};
    const auto times = linspace_times(20.0, 2000);
    const std::vector<int> d{2};

    const auto unitary = simulate_concurrence(model, UnitaryDynamics{}, pair, times);
    double unitary_err = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
        unitary_err = std::max(unitary_err, std::abs(unitary.values[k] - analytic_concurrence(9.0, 1.0, times[k])));

    const double tau = 0.1; // 1/(2 gamma) for 2 gamma = 10
    std::vector<double> tn;
    for (int n = 1; n <= 200; ++n) tn.push_back(n * tau);
    const auto deph_n = simulate_concurrence(model, DephasingDynamics{5.0, d}, pair, tn);
    double measured_err = 0.0;
    for (std::size_t k = 0; k < tn.size(); ++k)
        measured_err = std::max(measured_err, std::abs(deph_n.values[k] - measured_concurrence(9.0, 1.0, tau, tn[k])));
    const double c20 = deph_n.values.back();

    std::vector<double> at1;
    for (double two_gamma : {0.0, 0.1, 10.0, 1000.0}) {
        const DynamicsSpec dyn = two_gamma == 0.0
                                     ? DynamicsSpec{UnitaryDynamics{}}
                                     : DynamicsSpec{DephasingDynamics{two_gamma / 2.0, d}};
        at1.push_back(simulate_concurrence(model, dyn, pair, {1.0}).values[0]);
    }
    const bool zeno = at1[3] < *std::min_element(at1.begin(), at1.begin() + 3);

    const bool ok = std::abs(c20 - 0.5) <= kConcurrenceLimitTol && measured_err <= kMeasuredFormulaTol &&
                    unitary_err <= kUnitaryFormulaTol && zeno;
    report(7, ok,
           fmt("concurrence (D={2}): C_2g=10(20) = %.5f (0.50 +- %.2f); sup|C - measured formula| at t_n = %.4f "
               "(<= %.2f); sup|C_0 - unitary formula| = %.1e (<= %.0e); C(t=1) for 2g = 0, 0.1, 10, 1e3: "
               "%.4f %.4f %.4f %.4f (1e3 lowest: %s)",
               c20, kConcurrenceLimitTol, measured_err, kMeasuredFormulaTol, unitary_err, kUnitaryFormulaTol, at1[0], at1[1], at1[2],
               at1[3], zeno ? "yes" : "no"));
}

void criterion8() {
    const auto model = symmetric_trimer();
    const DephasingSpec spec{model, 5.0, {2}};
    const auto rho0 = DensityMatrix::pure_site(3, 2);
    const std::vector<double> times{1.0, 5.0, 10.0};
    const auto ens = quantum_jump_ensemble(spec, rho0, times, 10000, 20240601, JumpMode::poisson);
    const auto ref = integrate_master(spec, rho0, times);
    double worst_ratio = 0.0, worst_dev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
        for (int i = 0; i < 3; ++i) {
            const double dev = std::abs(ens.mean[k](i, i).real() - ref[k](i, i).real());
            const double tol = std::max(3.0 * ens.population_se[k](i), kMcFloor);
            worst_ratio = std::max(worst_ratio, dev / tol);
            worst_dev = std::max(worst_dev, dev);
        }

    std::vector<double> tn;
    for (int n = 1; n <= 100; ++n) tn.push_back(n * 0.1);
    const auto periodic = quantum_jump_ensemble(spec, rho0, tn, 1, 1, JumpMode::periodic);
    const auto channel = repeated_measurement_dense(model.with_initial_site(2),
                                                    MeasurementChannel({2}, 0.1), 100);
    bool exact = true;
    for (std::size_t k = 0; k < tn.size(); ++k) exact &= periodic.mean[k] == channel.densities[k + 1];

    report(8, worst_ratio <= 1.0 && exact,
           fmt("Monte Carlo: poisson n_traj=1e4 max |dev| = %.4f, max dev/max(3SE, %.2f) = %.3f "
               "(<= 1); periodic == channel bit for bit: %s",
               worst_dev, kMcFloor, worst_ratio, exact ? "yes" : "no"));
}

void criterion9() {
    std::vector<double> per_site;
    std::string tc;
    bool all_found = true;
    for (int L = 2; L <= 6; ++L) {
        const auto m = build_chain(L + 1, chain_energies(L + 1, 10.0, ChainProfile::ramp), 1.0,
                                   0.0, 0.0);
        const auto c = crossover_time(m, 0.05, 1000.0);
        if (!c.t_c) {
            all_found = false;
            tc += fmt(" L=%d:none", L);
            continue;
        }
        per_site.push_back(*c.t_c / L);
        tc += fmt(" %.3f", *c.t_c / L);
    }
    const double spread =
        all_found ? *std::max_element(per_site.begin(), per_site.end()) /
                        *std::min_element(per_site.begin(), per_site.end())
                  : INFINITY;

    std::string binomial;
    double worst = 0.0;
    const double eps = 20.0, tau = 0.02;
    for (int L = 2; L <= 6; ++L) {
        const auto m = build_chain(L + 1, chain_energies(L + 1, eps, ChainProfile::ramp), 1.0,
                                   0.0, 0.0);
        const auto traj =
            repeated_measurement_trajectory(m, MeasurementChannel::all_sites(L + 1, tau), 3 * L);
        double w = 0.0;
        for (int n = L; n <= 3 * L; ++n) {
            const double exact = traj.populations[n](L);
            w = std::max(w, std::abs(binomial_population(L, n, tau, 1.0) - exact) / exact);
        }
        worst = std::max(worst, w);
        binomial += fmt(" L=%d:%.0f%%", L, 100.0 * w);
    }
    report(9, spread <= kCrossoverSpread && worst <= kBinomialRelTol,
           fmt("crossover: t_c/L for L=2..6 =%s, spread %.2f (<= %.0f); binomial formula max rel. error vs "
               "exact, n in [L,3L]:%s (<= %.0f%%)",
               tc.c_str(), spread, kCrossoverSpread, binomial.c_str(), 100.0 * kBinomialRelTol));
}

void criterion10() {
    bool ok = true;
    std::string detail;
    for (int L = 1; L <= 3; ++L) {
        const auto m = build_chain(L + 1, chain_energies(L + 1, 10.0, ChainProfile::ladder), 1.0,
                                   0.0, 0.0);
        const double ratio = time_averaged_population(m, L + 1, default_averaging_time(m)) /
                             perturbative_average(m);
        ok &= ratio >= 0.5 && ratio <= 2.0;
        detail += fmt(" L=%d:%.3f", L, ratio);
    }
    report(10, ok, "localization: time average / (L+1)(v/eps)^{2L} =" + detail + " (in [0.5, 2])");
}

void criterion11() {
    const double two_site = peak_eta(dimer(10.0), 10.0);
    constexpr int kSeeds = 16;
    auto mean_peak = [&](Topology topo, int n, std::vector<std::pair<int, int>> removed,
                         double* worst_gap) {
        double sum = 0.0;
        for (int s = 0; s < kSeeds; ++s) {
            DisorderSpec spec;
            spec.n_sites = n;
            spec.topology = topo;
            spec.removed_edges = removed;
            spec.seed = stream_seed(11, std::uint64_t(s));
            const double p = peak_eta(build_graph(spec), spec.mean_disorder);
            if (worst_gap) *worst_gap = std::max(*worst_gap, std::abs(p - two_site));
            sum += p;
        }
        return sum / kSeeds;
    };
    double gap = 0.0;
    const double complete3 = mean_peak(Topology::complete, 3, {}, &gap);
    const double complete4 = mean_peak(Topology::complete, 4, {}, &gap);
    const double cut = mean_peak(Topology::complete_minus_edges, 4, {{1, 4}}, nullptr);
    const double chain3 = mean_peak(Topology::chain, 3, {}, nullptr);
    const bool ok = gap <= kTopologyTol && chain3 < cut && cut < complete4;
    report(11, ok,
           fmt("topology (16 seeds each): two-site peak %.4f, worst |complete 3/4-site peak - "
               "two-site| = %.4f (<= %.2f); mean peaks chain3 %.4f < cut(1,4) %.4f < complete4 "
               "%.4f",
               two_site, gap, kTopologyTol, chain3, cut, complete4));
}

void criterion12() {
    const std::vector<double> t{20.0};
    const double sym =
        simulate_concurrence(symmetric_trimer(), RepeatedMeasurement{{2}, 0.1}, {1, 3}, t).values[0];
    const double off =
        simulate_concurrence(symmetric_trimer(1.0), RepeatedMeasurement{{2}, 0.1}, {1, 3}, t).values[0];
    report(12, sym - off >= kDegeneracyDrop,
           fmt("degeneracy: measured C(20) = %.4f symmetric, %.4f with eps3 + v; drop %.4f "
               "(>= %.2f)",
               sym, off, sym - off, kDegeneracyDrop));
}

} // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    void (*const items[])() = {criterion1, criterion2, criterion3,  criterion4,
                               criterion5, criterion6, criterion7,  criterion8,
                               criterion9, criterion10, criterion11, criterion12};
    int id = 1;
    for (auto item : items) {
        try {
            item();
        } catch (const std::exception& e) {
            report(id, false, std::string("threw: ") + e.what());
        }
        ++id;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 12 criteria failed (%.1f s)\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
