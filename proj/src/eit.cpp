#include "qms/eit.hpp"

#include <cmath>
#include <numbers>

#include "qms/errors.hpp"

namespace qms {

namespace {

constexpr std::complex<double> kI(0.0, 1.0);

void validate(const EitParameters& p) {
    if (!(p.gamma_r >= 0.0)) {
        throw InvalidArgument("eit: gamma_r must be non-negative");
    }
    if (!(p.Gamma > -1.0)) {
        throw InvalidArgument("eit: total linewidth 1 + Gamma must be positive");
    }
}

// Two-photon term with dephasing folded in; zero exactly when the bare
// parameters are zero, which together with omega_p = 0 is the only pole.
std::complex<double> two_photon(const EitParameters& p) {
    return std::complex<double>(p.delta_r + p.V, 0.5 * p.gamma_r);
}

}  // namespace

std::complex<double> eit_coherence(const EitParameters& p,
                                   std::complex<double> omega_k) {
    validate(p);
    const std::complex<double> z = two_photon(p);
    const std::complex<double> probe =
        std::complex<double>(0.5 * (1.0 + p.Gamma), -(p.delta - p.Delta));
    const std::complex<double> den = -kI * z * probe + p.omega_p * p.omega_p;
    if (den == std::complex<double>(0.0, 0.0)) {
        throw SingularityError(
            "eit_coherence: two-photon term and control field both vanish");
    }
    return omega_k * z / den;
}

std::complex<double> reflection_coefficient(const EitParameters& p) {
    validate(p);
    const std::complex<double> z = two_photon(p);
    const double total = 1.0 + p.Gamma;
    const std::complex<double> den =
        -kI * z * std::complex<double>(total, -2.0 * (p.delta - p.Delta)) +
        2.0 * p.omega_p * p.omega_p;
    if (den == std::complex<double>(0.0, 0.0)) {
        throw SingularityError(
            "reflection_coefficient: two-photon term and control field both vanish");
    }
    return kI * total * z / den;
}

std::pair<std::complex<double>, std::complex<double>> conditional_pair(
    const EitParameters& base, double v_on) {
    if (!(v_on > 0.0)) {
        throw InvalidArgument("conditional_pair: V_on must be positive");
    }
    EitParameters off = base;
    off.V = 0.0;
    EitParameters on = base;
    on.V = v_on;
    return {reflection_coefficient(off), reflection_coefficient(on)};
}

std::complex<double> eit_polarizability(const EitParameters& p) {
    return 3.0 * std::numbers::pi_v<double> *
           eit_coherence(p, std::complex<double>(1.0, 0.0));
}

}  // namespace qms
