#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "qms/constants.hpp"
#include "qms/eit.hpp"
#include "qms/errors.hpp"

using namespace qms;
using std::complex;

namespace {

constexpr complex<double> kI(0.0, 1.0);

// Independent oracle: steady state of the weak-probe three-level amplitude
// equations, assembled as a 2x2 linear system and solved numerically
// instead of through the closed form.
complex<double> steady_state_oracle(const EitParameters& p,
                                    complex<double> omega_k) {
    Eigen::Matrix2cd m;
    m(0, 0) = complex<double>(0.5 * (1.0 + p.Gamma), -(p.delta - p.Delta));
    m(0, 1) = -kI * p.omega_p;
    m(1, 0) = -kI * p.omega_p;
    m(1, 1) = complex<double>(0.5 * p.gamma_r, -(p.delta_r + p.V));
    Eigen::Vector2cd rhs(kI * omega_k, complex<double>(0.0, 0.0));
    const Eigen::Vector2cd c = m.fullPivLu().solve(rhs);
    return c[0];
}

// Scattering map from coherence to reflection: the array mode radiates the
// coherence back into the drive with weight (1+Gamma)/2.
complex<double> reflection_from_coherence(const EitParameters& p) {
    const complex<double> rho = eit_coherence(p, complex<double>(1.0, 0.0));
    return -0.5 * (1.0 + p.Gamma) * rho / kI;
}

EitParameters draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    EitParameters p;
    p.delta = -20.0 + 40.0 * u(rng);
    p.Delta = -5.0 + 10.0 * u(rng);
    p.Gamma = -0.9 + 10.0 * u(rng);
    p.delta_r = -20.0 + 40.0 * u(rng);
    p.gamma_r = 5.0 * u(rng);
    p.omega_p = 10.0 * u(rng);
    p.V = 50.0 * u(rng);
    return p;
}

}  // namespace

TEST_CASE("dark state: zero two-photon detuning kills the coherence") {
    for (double op : {0.5, 1.0, 7.0}) {
        EitParameters p;
        p.delta = 0.7;
        p.omega_p = op;
        const complex<double> rho = eit_coherence(p, complex<double>(1.0, 0.0));
        CHECK(rho == complex<double>(0.0, 0.0));
    }
}

TEST_CASE("control off reduces to the collective two-level response") {
    for (double g : {0.0, 1.5, 4.0}) {
        EitParameters p;
        p.Gamma = g;
        p.delta = 0.4;
        p.Delta = 0.4;  // on collective resonance
        p.V = 12.0;     // arbitrary, must drop out at omega_p = 0
        p.delta_r = -3.0;
        const complex<double> omega_k(0.3, -0.2);
        const complex<double> rho = eit_coherence(p, omega_k);
        const complex<double> expect = kI * omega_k / (0.5 * (1.0 + g));
        CHECK(std::abs(rho - expect) <= 1e-14 * std::abs(expect));
    }
}

TEST_CASE("closed form matches the steady-state solve over random draws") {
    std::mt19937_64 rng(20260815u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const EitParameters p = draw(rng);
        const complex<double> omega_k(2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0);
        const complex<double> closed = eit_coherence(p, omega_k);
        const complex<double> oracle = steady_state_oracle(p, omega_k);
        const double scale = std::max(std::abs(oracle), 1e-30);
        CHECK(std::abs(closed - oracle) <= 1e-12 * scale);
    }
}

TEST_CASE("reflection equals the scattering map applied to the coherence") {
    std::mt19937_64 rng(77u);
    for (int i = 0; i < 10000; ++i) {
        const EitParameters p = draw(rng);
        const complex<double> direct = reflection_coefficient(p);
        const complex<double> mapped = reflection_from_coherence(p);
        const double scale = std::max(std::abs(direct), 1e-30);
        CHECK(std::abs(direct - mapped) <= 1e-12 * scale);
    }
}

TEST_CASE("reflection at a pinned parameter point") {
    // delta = Delta, delta_r = 0, omega_p = 1, V = 100, Gamma = 0:
    // r = 100 i / (2 - 100 i) = (-10000 + 200 i) / 10004 exactly.
    EitParameters p;
    p.delta = 1.3;
    p.Delta = 1.3;
    p.omega_p = 1.0;
    p.V = 100.0;
    const complex<double> expect(-10000.0 / 10004.0, 200.0 / 10004.0);
    CHECK(std::abs(reflection_coefficient(p) - expect) <= 1e-15);
}

TEST_CASE("transparent configuration reflects nothing") {
    EitParameters p;
    p.delta = -0.8;
    p.omega_p = 0.8;
    CHECK(reflection_coefficient(p) == complex<double>(0.0, 0.0));
}

TEST_CASE("large shift approaches the mirror with the two-photon correction") {
    for (double op : {0.3, 1.0, 3.0}) {
        for (double g : {0.0, 1.5}) {
            EitParameters p;
            p.delta = p.Delta = 0.9;
            p.omega_p = op;
            p.Gamma = g;
            const double half = 0.5 * (1.0 + g);
            const double limit = op * op / half;

            // On the ideal operating point the closed form collapses to
            // r = -1/(1+ix) with x = omega_p^2 / (half * V).
            p.V = 7.3;
            const double x = op * op / (half * p.V);
            const complex<double> expect = -1.0 / (1.0 + kI * x);
            CHECK(std::abs(reflection_coefficient(p) - expect) <= 1e-14);

            for (double v : {100.0 * limit, 300.0 * limit, 1000.0 * limit}) {
                p.V = v;
                const double lhs = std::abs(reflection_coefficient(p) + 1.0) * v;
                CHECK(lhs == doctest::Approx(limit).epsilon(0.01));
            }
        }
    }
}

TEST_CASE("reflection is passive for physical parameters") {
    std::mt19937_64 rng(31337u);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const EitParameters p = draw(rng);
        worst = std::max(worst, std::abs(reflection_coefficient(p)));
    }
    CHECK(worst <= 1.0 + 1e-12);
}

TEST_CASE("simultaneous zero of control and two-photon term is a pole") {
    EitParameters p;
    p.delta = 0.2;
    CHECK_THROWS_AS((void)eit_coherence(p, complex<double>(1.0, 0.0)),
                    SingularityError);
    CHECK_THROWS_AS((void)reflection_coefficient(p), SingularityError);
}

TEST_CASE("parameter invariants are enforced") {
    EitParameters p;
    p.omega_p = 1.0;
    p.gamma_r = -0.1;
    CHECK_THROWS_AS((void)reflection_coefficient(p), InvalidArgument);
    p.gamma_r = 0.0;
    p.Gamma = -1.0;
    CHECK_THROWS_AS((void)eit_coherence(p, complex<double>(1.0, 0.0)),
                    InvalidArgument);
}

TEST_CASE("conditional pair switches between transparency and mirror") {
    EitParameters base;
    base.delta = base.Delta = 0.9;
    base.omega_p = 1.0;

    const double v_on = 500.0;
    const auto [r_u, r_c] = conditional_pair(base, v_on);
    CHECK(r_u == complex<double>(0.0, 0.0));
    const double x = 1.0 / (0.5 * v_on);
    CHECK(std::abs(r_c + 1.0) == doctest::Approx(x).epsilon(0.01));

    // Continuity toward the transparent branch.
    const auto [ru0, rc0] = conditional_pair(base, 1e-9);
    CHECK(std::abs(rc0 - ru0) <= 1e-8);

    // |r_C + 1| decreases monotonically over three decades of V.
    double prev = 2.0;
    for (int k = 0; k <= 30; ++k) {
        const double v = 1.0 * std::pow(10.0, 0.1 * k);
        const auto [ru, rc] = conditional_pair(base, v);
        const double miss = std::abs(rc + 1.0);
        CHECK(miss < prev);
        prev = miss;
    }

    CHECK_THROWS_AS((void)conditional_pair(base, 0.0), InvalidArgument);
    CHECK_THROWS_AS((void)conditional_pair(base, -2.0), InvalidArgument);
}

TEST_CASE("cascade polarizability reduces to the two-level form") {
    for (double d : {-1.2, 0.0, 0.7}) {
        EitParameters p;
        p.delta = d;
        p.omega_p = 0.0;
        p.V = 3.0;  // irrelevant with the control off
        const complex<double> a = eit_polarizability(p);
        const complex<double> expect = two_level_polarizability(d);
        CHECK(std::abs(a - expect) <= 1e-13 * std::abs(expect));
    }
    // With the control on and the two-photon condition met the atom is
    // transparent: zero polarizability, ready for the dipole solver.
    EitParameters p;
    p.delta = 0.3;
    p.omega_p = 2.0;
    CHECK(eit_polarizability(p) == complex<double>(0.0, 0.0));
}
