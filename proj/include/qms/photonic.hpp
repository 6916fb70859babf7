#pragma once

#include <complex>

namespace qms {

// Right- and left-propagating coherent amplitudes of the probe pair.
struct TwoModeCoherent {
    std::complex<double> alpha_R{0.0, 0.0};
    std::complex<double> alpha_L{0.0, 0.0};
};

// Superposition of the two ancilla-conditioned scattering branches. Each
// branch keeps its two in-mode amplitudes plus the coherent amplitude
// radiated into off-mode directions (sc_amp), so branch overlaps stay
// well defined. Weights default to the balanced projection outcome.
struct ConditionalState {
    TwoModeCoherent branch_u;
    TwoModeCoherent branch_c;
    std::complex<double> sc_amp_u{0.0, 0.0};
    std::complex<double> sc_amp_c{0.0, 0.0};
    std::complex<double> weight_u{0.7071067811865476, 0.0};
    std::complex<double> weight_c{0.7071067811865476, 0.0};
};

struct CatFidelityReport {
    double fidelity = 0.0;
    double approx_fidelity = 0.0;  // second-order law in |r_C + 1|
    double alpha_sq = 0.0;
};

// Two-port splitter action on coherent amplitudes:
// (a_R, a_L) -> (t a_R + r a_L, r a_R + t a_L).
TwoModeCoherent beam_splitter(std::complex<double> r, std::complex<double> t,
                              const TwoModeCoherent& in);

// Applies the branch splitters of the conditioned array and attaches the
// off-mode amplitude carrying each branch's power deficit 1 - |r|^2 - |t|^2.
ConditionalState conditional_scatter(std::complex<double> r_u,
                                     std::complex<double> t_u,
                                     std::complex<double> r_c,
                                     std::complex<double> t_c,
                                     const TwoModeCoherent& in);

// Full complex overlap <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b).
std::complex<double> coherent_overlap(std::complex<double> a,
                                      std::complex<double> b);

// Fidelity of the projected state against the even (or odd) coherent cat
// with amplitude alpha entering on the R port. States are normalized
// exactly, so fidelity <= 1 holds including the overlapping-branch terms.
CatFidelityReport cat_fidelity(const ConditionalState& cond,
                               std::complex<double> alpha,
                               bool odd_projection = false);

}  // namespace qms
