#include "qms/photonic.hpp"

#include <algorithm>
#include <cmath>

#include "qms/errors.hpp"

namespace qms {

namespace {

using cplx = std::complex<double>;

void validate_branch(cplx r, cplx t) {
    if (std::norm(r) + std::norm(t) > 1.0 + 1e-9) {
        throw InvalidArgument("beam_splitter: |r|^2 + |t|^2 exceeds unity");
    }
}

}  // namespace

TwoModeCoherent beam_splitter(cplx r, cplx t, const TwoModeCoherent& in) {
    validate_branch(r, t);
    TwoModeCoherent out;
    out.alpha_R = t * in.alpha_R + r * in.alpha_L;
    out.alpha_L = r * in.alpha_R + t * in.alpha_L;
    return out;
}

ConditionalState conditional_scatter(cplx r_u, cplx t_u, cplx r_c, cplx t_c,
                                     const TwoModeCoherent& in) {
    ConditionalState out;
    out.branch_u = beam_splitter(r_u, t_u, in);
    out.branch_c = beam_splitter(r_c, t_c, in);
    // Power missing from the two guided modes leaves as a coherent
    // amplitude in the (shared) off-mode channel.
    const cplx total = in.alpha_R + in.alpha_L;
    const double def_u = std::max(0.0, 1.0 - std::norm(r_u) - std::norm(t_u));
    const double def_c = std::max(0.0, 1.0 - std::norm(r_c) - std::norm(t_c));
    out.sc_amp_u = std::sqrt(def_u) * total;
    out.sc_amp_c = std::sqrt(def_c) * total;
    return out;
}

cplx coherent_overlap(cplx a, cplx b) {
    return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) +
                    std::conj(a) * b);
}

CatFidelityReport cat_fidelity(const ConditionalState& cond, cplx alpha,
                               bool odd_projection) {
    if (alpha == cplx(0.0, 0.0)) {
        throw InvalidArgument("cat_fidelity: input amplitude must be nonzero");
    }
    const double s = odd_projection ? -1.0 : 1.0;
    const cplx zero(0.0, 0.0);
    const TwoModeCoherent& bu = cond.branch_u;
    const TwoModeCoherent& bc = cond.branch_c;

    // Overlaps of the two target branches (alpha, 0, 0) and (0, -alpha, 0)
    // with the two actual branches, off-mode vacuum on the target side.
    const cplx m_uu = coherent_overlap(alpha, bu.alpha_R) *
                      coherent_overlap(zero, bu.alpha_L) *
                      coherent_overlap(zero, cond.sc_amp_u);
    const cplx m_uc = coherent_overlap(alpha, bc.alpha_R) *
                      coherent_overlap(zero, bc.alpha_L) *
                      coherent_overlap(zero, cond.sc_amp_c);
    const cplx m_cu = coherent_overlap(zero, bu.alpha_R) *
                      coherent_overlap(-alpha, bu.alpha_L) *
                      coherent_overlap(zero, cond.sc_amp_u);
    const cplx m_cc = coherent_overlap(zero, bc.alpha_R) *
                      coherent_overlap(-alpha, bc.alpha_L) *
                      coherent_overlap(zero, cond.sc_amp_c);

    const cplx w_u = cond.weight_u;
    const cplx w_c = odd_projection ? -cond.weight_c : cond.weight_c;

    // Exact norms; the branch cross term matters once overlaps are not
    // exponentially small.
    const double u = std::exp(-std::norm(alpha));
    const double norm_target2 = 2.0 * (1.0 + s * u);
    const cplx cross = coherent_overlap(bu.alpha_R, bc.alpha_R) *
                       coherent_overlap(bu.alpha_L, bc.alpha_L) *
                       coherent_overlap(cond.sc_amp_u, cond.sc_amp_c);
    const double norm_actual2 =
        std::norm(w_u) + std::norm(w_c) +
        2.0 * (std::conj(w_u) * w_c * cross).real();

    const cplx a = (m_uu + s * m_cu) * w_u + (m_uc + s * m_cc) * w_c;

    CatFidelityReport rep;
    rep.alpha_sq = std::norm(alpha);
    rep.fidelity =
        std::clamp(std::norm(a) / (norm_target2 * norm_actual2), 0.0, 1.0);
    const cplx r_c_eff = bc.alpha_L / alpha;
    rep.approx_fidelity =
        1.0 - 0.5 * rep.alpha_sq * std::norm(r_c_eff + 1.0);
    return rep;
}

}  // namespace qms
