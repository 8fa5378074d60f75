#include "doctest.h"

#include <cmath>
#include <numbers>

#include "support/oracles.hpp"
#include "zt/dynamics.hpp"

using namespace zt;
using std::numbers::pi;

namespace {

LatticeModel dimer(double eps, double kappa = 0.0, double gamma = 0.0, double v = 1.0) {
    return build_chain(2, {eps, 0.0}, v, kappa, gamma);
}

LatticeModel closed(std::uint64_t seed, int n) {
    const auto m = oracle::random_model(seed, n);
    return {m.site_energies(), m.couplings(), RVector::Zero(n), 0.0};
}

} // namespace

TEST_CASE("propagator at t = 0 is the identity") {
    const CMatrix h = effective_hamiltonian(dimer(10.0, 0.5, 0.001)).matrix;
    CHECK((propagator(h, 0.0).u - CMatrix::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("two-level Rabi transfer") {
    const CMatrix res = effective_hamiltonian(dimer(0.0)).matrix;
    CHECK(std::norm(propagator(res, pi / 2).u(1, 0)) == doctest::Approx(1.0).epsilon(1e-12));

    const CMatrix h = effective_hamiltonian(dimer(10.0)).matrix;
    double peak = 0.0;
    for (int k = 0; k <= 4000; ++k) {
        const double t = 2.0 * k / 4000.0;
        const double p = std::norm(propagator(h, t).u(1, 0));
        CHECK(p == doctest::Approx(oracle::rabi_p2(10.0, 1.0, t)).epsilon(1e-10));
        peak = std::max(peak, p);
    }
    CHECK(peak == doctest::Approx(4.0 / 104.0).epsilon(1e-4));
}

TEST_CASE("unitarity and contraction of U") {
    const CMatrix lossless = effective_hamiltonian(closed(3, 5)).matrix;
    for (double t : {0.3, 2.0, 9.0}) {
        const CMatrix u = propagator(lossless, t).u;
        CHECK((u.adjoint() * u - CMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
    }
    const CMatrix open = effective_hamiltonian(oracle::random_model(4, 5)).matrix;
    for (double t : {0.3, 2.0, 9.0}) {
        const RVector s = Eigen::JacobiSVD<CMatrix>(propagator(open, t).u).singularValues();
        CHECK(s.maxCoeff() <= 1.0 + 1e-10);
    }
}

TEST_CASE("eigendecomposition and series paths agree on random 8-site models") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const CMatrix h = effective_hamiltonian(oracle::random_model(100 + seed, 8)).matrix;
        for (double t : {0.1, 1.0, 4.0, 10.0}) {
            const auto a = propagator(h, t, PropagatorMethod::eigendecomposition);
            const auto b = propagator(h, t, PropagatorMethod::series);
            CHECK(a.method == PropagatorMethod::eigendecomposition);
            CHECK(b.method == PropagatorMethod::series);
            CHECK((a.u - b.u).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("defective H_eff falls back to the series") {
    // [[a, 1], [0, a]] is a Jordan block; exp(-i H t) = e^{-iat} [[1, -it], [0, 1]].
    CMatrix h(2, 2);
    const Complex a(1.0, -0.25);
    h << a, 1.0, 0.0, a;
    const auto p = propagator(h, 2.0);
    CHECK(p.method == PropagatorMethod::series);
    const Complex ph = std::exp(Complex(0.0, -2.0) * a);
    CHECK(std::abs(p.u(0, 0) - ph) < 1e-12);
    CHECK(std::abs(p.u(0, 1) - ph * Complex(0.0, -2.0)) < 1e-12);
    CHECK(std::abs(p.u(1, 0)) < 1e-14);
}

TEST_CASE("evolve and populations") {
    const auto rho = DensityMatrix::pure_site(3, 1);
    CHECK(populations(rho) == RVector::Unit(3, 0));
    CHECK(populations(DensityMatrix::maximally_mixed(4)).isApprox(RVector::Constant(4, 0.25)));
    CHECK(evolve(CMatrix::Identity(3, 3), rho).matrix() == rho.matrix());

    const CMatrix res = effective_hamiltonian(dimer(0.0)).matrix;
    const auto half = evolve(propagator(res, pi / 4), DensityMatrix::pure_site(2, 1));
    CHECK(populations(half)(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(populations(half)(1) == doctest::Approx(0.5).epsilon(1e-12));

    const CMatrix lossless = effective_hamiltonian(closed(9, 4)).matrix;
    CHECK(evolve(propagator(lossless, 3.7), DensityMatrix::pure_site(4, 2)).trace() ==
          doctest::Approx(1.0).epsilon(1e-12));

    // v = 0, kappa = 0.5 at site 2: pure decay at rate 2 kappa
    const CMatrix decay = effective_hamiltonian(dimer(10.0, 0.5, 0.0, 0.0)).matrix;
    CHECK(evolve(propagator(decay, 1.0), DensityMatrix::pure_site(2, 2)).trace() ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    CHECK_THROWS_AS(evolve(CMatrix::Identity(2, 2), rho), InvalidArgument);
}

TEST_CASE("trace is monotone under dissipation") {
    const CMatrix h = effective_hamiltonian(oracle::random_model(17, 4)).matrix;
    const auto rho0 = DensityMatrix::pure_site(4, 1);
    double prev = rho0.trace();
    for (int k = 1; k <= 200; ++k) {
        const double tr = evolve(propagator(h, 0.05 * k), rho0).trace();
        CHECK(tr <= prev + 1e-10);
        prev = tr;
    }
}

TEST_CASE("density-matrix checks") {
    CMatrix bad = CMatrix::Zero(2, 2);
    bad(0, 0) = 1.0;
    bad(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix(bad).check(), NumericalError);
    CMatrix neg = CMatrix::Zero(2, 2);
    neg(0, 0) = 1.2;
    neg(1, 1) = -0.2;
    CHECK_THROWS_AS(DensityMatrix(neg).check(), NumericalError);
    CHECK_NOTHROW(DensityMatrix::maximally_mixed(3).check());
}

TEST_CASE("time-averaged populations against closed forms") {
    CHECK(time_averaged_population(dimer(10.0), 2, 200.0, 0.01) ==
          doctest::Approx(2.0 / 104.0).epsilon(0.002 / (2.0 / 104.0)));
    CHECK(time_averaged_population(dimer(0.0), 2, 200.0) ==
          doctest::Approx(0.5).epsilon(0.02));
    // dt must resolve the largest energy gap
    CHECK_THROWS_AS(time_averaged_population(dimer(10.0), 2, 200.0, 0.02), InvalidArgument);
    CHECK_THROWS_AS(time_averaged_population(dimer(10.0), 2, -1.0, 0.01), InvalidArgument);

    // trapezoid average of the Rabi formula, evaluated independently
    const double T = 50.0, dt = 0.005;
    double ref = 0.0;
    const long steps = long(T / dt + 0.5);
    for (long k = 0; k <= steps; ++k)
        ref += (k == 0 || k == steps ? 0.5 : 1.0) * oracle::rabi_p2(10.0, 1.0, k * dt);
    ref *= dt / T;
    CHECK(time_averaged_population(dimer(10.0), 2, T, dt) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("perturbative average") {
    CHECK(perturbative_average(dimer(10.0)) == doctest::Approx(0.02));
    const auto l2 = build_chain(3, {10.0, 5.0, 0.0}, 1.0, 0.0, 0.0);
    CHECK(perturbative_average(l2) == doctest::Approx(3e-4));
    CHECK(perturbative_average(dimer(10.0, 0.0, 0.0, 1e-6)) < 1e-10);
    CHECK_THROWS_AS(perturbative_average(dimer(0.0)), OutOfRegime);

    const auto three = build_chain(3, chain_energies(3, 10.0, ChainProfile::ladder), 1.0, 0.0, 0.0);
    const double ratio = time_averaged_population(three, 3, 2000.0) / perturbative_average(three);
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 2.0);
}
