#pragma once

#include <complex>
#include <utility>

namespace qms {

// All rates and detunings in units of the bare linewidth gamma. Delta and
// Gamma are the cooperative corrections of the array mode; delta_r, gamma_r,
// omega_p, V describe the control leg to the Rydberg level.
struct EitParameters {
    double delta = 0.0;
    double Delta = 0.0;
    double Gamma = 0.0;
    double delta_r = 0.0;
    double gamma_r = 0.0;
    double omega_p = 0.0;
    double V = 0.0;
};

// Weak-probe coherence of the cascade scheme for drive amplitude omega_k:
//   rho = i w (gamma_r/2 - i(delta_r+V)) /
//         [ (gamma_r/2 - i(delta_r+V)) ((1+Gamma)/2 - i(delta-Delta)) + omega_p^2 ]
// The denominator vanishes only when the two-photon term and the control
// field are both exactly zero; that pole throws.
std::complex<double> eit_coherence(const EitParameters& p,
                                   std::complex<double> omega_k);

// Reflection coefficient of the array in the cascade scheme. Reduces to the
// two-level collective response at omega_p = 0 and to r = 0 in the
// transparent configuration delta_r + V = 0 (with gamma_r = 0). Nonzero
// gamma_r enters through (delta_r+V) -> (delta_r+V) + i gamma_r/2.
std::complex<double> reflection_coefficient(const EitParameters& p);

// Reflection pair conditioned on the ancilla: V = 0 (transparent) and
// V = v_on (mirror-like). Feeds the photonic branch construction.
std::pair<std::complex<double>, std::complex<double>> conditional_pair(
    const EitParameters& base, double v_on);

// Single-atom polarizability implied by the cascade coherence, suitable for
// the coupled-dipole solver. Cooperative corrections must be left at zero
// here; they emerge from the lattice solve instead. Normalized so that
// omega_p = 0 reproduces the two-level -3 pi / (delta + i/2).
std::complex<double> eit_polarizability(const EitParameters& p);

}  // namespace qms
