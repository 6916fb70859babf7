#include "qms/mode_selective.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "qms/constants.hpp"
#include "qms/coupled_dipole.hpp"
#include "qms/errors.hpp"
#include "qms/green.hpp"
#include "qms/io.hpp"

namespace qms {

namespace {

void validate_grid(const std::vector<Eigen::Vector2d>& k_grid) {
    if (k_grid.empty())
        throw InvalidArgument("reflectivity spectrum: empty momentum grid");
    for (const auto& k : k_grid) {
        if (!(k.squaredNorm() < 1.0)) {
            throw InvalidArgument(
                "reflectivity spectrum: grid point outside the light cone");
        }
    }
}

void validate_profile(const LatticeGeometry& geom,
                      const PermittivityProfile& profile) {
    if (profile.alpha_i.size() != geom.active_count()) {
        throw InvalidArgument(
            "reflectivity spectrum: profile does not match the active atoms");
    }
    const double kmag = profile.K_a.norm();
    if (kmag == 0.0) return;
    // The spectrum only makes sense when the aperture resolves the written
    // grating: require at least four modulation periods along K_a.
    const double period = 0.5 / kmag;  // cos(2 K.r) in lambda
    const Eigen::Vector2d khat = profile.K_a / kmag;
    const double lx = (geom.nx - 1) * geom.spacing;
    const double ly = (geom.ny - 1) * geom.spacing;
    const double extent = std::abs(khat.x()) * lx + std::abs(khat.y()) * ly;
    if (extent < 4.0 * period) {
        throw InvalidArgument(
            "reflectivity spectrum: array spans fewer than 4 modulation periods");
    }
}

// NaN-proof passivity gate. Projection noise can push |r|^2 a few 1e-4
// above unity; that gets snapped back to 1. Anything past 1e-2 means the
// solve itself is wrong and must not pass silently.
void sanitize_reflectivities(std::vector<double>& r2) {
    for (double& v : r2) {
        if (!(v >= 0.0 && v <= 1.0 + 1e-2)) {
            throw NumericalFailure("reflectivity spectrum: passivity violated", v);
        }
        if (v > 1.0) v = 1.0;
    }
}

}  // namespace

PermittivityProfile uniform_profile(const LatticeGeometry& geom,
                                    std::complex<double> alpha0) {
    PermittivityProfile p;
    p.alpha_i = Eigen::VectorXcd::Constant(geom.active_count(), alpha0);
    p.label = "uniform";
    p.alpha0 = alpha0;
    return p;
}

PermittivityProfile periodic_profile(const LatticeGeometry& geom,
                                     const Eigen::Vector2d& K_a,
                                     std::complex<double> alpha0) {
    if (!(K_a.squaredNorm() < 1.0)) {
        throw InvalidArgument("periodic_profile: |K_a| must stay below k0");
    }
    PermittivityProfile p;
    p.K_a = K_a;
    p.alpha0 = alpha0;
    p.label = K_a.squaredNorm() == 0.0 ? "uniform" : "periodic";
    const Eigen::Matrix3Xd pos = geom.active_positions();
    p.alpha_i.resize(pos.cols());
    for (Eigen::Index i = 0; i < pos.cols(); ++i) {
        const double phase =
            2.0 * kWavenumber * (K_a.x() * pos(0, i) + K_a.y() * pos(1, i));
        p.alpha_i[i] = alpha0 * 0.5 * (1.0 + std::cos(phase));
    }
    return p;
}

ReflectivitySpectrum reflectivity_spectrum_realspace(
    const LatticeGeometry& geom, const PermittivityProfile& profile,
    const std::vector<Eigen::Vector2d>& k_grid) {
    validate_profile(geom, profile);
    validate_grid(k_grid);

    const DipoleSolver solver(geom, profile.alpha_i);

    ReflectivitySpectrum out;
    out.method = SpectrumMethod::RealSpace;
    out.k_perp_grid = k_grid;
    out.r2.assign(k_grid.size(), 0.0);

    const int n = static_cast<int>(k_grid.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            const OpticalResponse resp = reflection_transmission(
                geom, solver, plane_wave(0.0, k_grid[static_cast<std::size_t>(i)]));
            out.r2[static_cast<std::size_t>(i)] = std::norm(resp.r);
        } catch (...) {
#pragma omp critical(qms_spectrum_err)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    sanitize_reflectivities(out.r2);
    return out;
}

ReflectivitySpectrum reflectivity_spectrum_eigenmode(
    const LatticeGeometry& geom, const PermittivityProfile& profile,
    const std::vector<Eigen::Vector2d>& k_grid) {
    validate_profile(geom, profile);
    validate_grid(k_grid);

    const GreenMatrix gm = green_matrix(geom);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es;
    es.compute(gm.entries, true);
    if (es.info() != Eigen::Success) {
        throw NumericalFailure(
            "reflectivity spectrum: collective-mode decomposition failed", 0.0);
    }
    const Eigen::MatrixXcd& V = es.eigenvectors();
    const Eigen::VectorXcd g = es.eigenvalues();
    const Eigen::PartialPivLU<Eigen::MatrixXcd> vlu(V);

    // Profile in the collective-mode basis. Only the diagonal is kept; the
    // discarded off-diagonal weight is the approximation being made.
    const Eigen::MatrixXcd B = vlu.solve(profile.alpha_i.asDiagonal() * V);
    const Eigen::VectorXcd b_diag = B.diagonal();
    const double diag2 = b_diag.squaredNorm();
    const double off2 = std::max(0.0, B.squaredNorm() - diag2);

    ReflectivitySpectrum out;
    out.method = SpectrumMethod::Eigenmode;
    out.k_perp_grid = k_grid;
    out.r2.assign(k_grid.size(), 0.0);
    out.offdiag_discarded = diag2 > 0.0 ? std::sqrt(off2 / diag2) : 0.0;

    // Each mode scatters independently: y_m = B_mm e_m / (1 - C B_mm g_m).
    const Eigen::VectorXcd denom =
        Eigen::VectorXcd::Ones(g.size()) -
        kCouplingConstant * b_diag.cwiseProduct(g);
    const Eigen::Matrix3Xd pos = geom.active_positions();

    const int n = static_cast<int>(k_grid.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            const DriveField drive =
                plane_wave(0.0, k_grid[static_cast<std::size_t>(i)]);
            const Eigen::VectorXcd e_mode = vlu.solve(incident_field(drive, pos));
            PolarizationVector P;
            P.p = V * b_diag.cwiseProduct(e_mode).cwiseQuotient(denom).eval();
            P.alphas = profile.alpha_i;
            P.drive = drive;
            P.rcond = vlu.rcond();
            const OpticalResponse resp = response_from_polarization(geom, P);
            out.r2[static_cast<std::size_t>(i)] = std::norm(resp.r);
        } catch (...) {
#pragma omp critical(qms_spectrum_err2)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    sanitize_reflectivities(out.r2);
    return out;
}

std::string spectrum_csv(const ReflectivitySpectrum& spectrum) {
    if (spectrum.k_perp_grid.size() != spectrum.r2.size()) {
        throw InvalidArgument("spectrum_csv: grid and r2 lengths differ");
    }
    const char* method =
        spectrum.method == SpectrumMethod::RealSpace ? "real-space" : "eigenmode";
    std::string s;
    s += "# units: lengths in lambda, rates in gamma, wavevectors in k0\n";
    s += "kx,ky,r2,method\n";
    for (std::size_t i = 0; i < spectrum.r2.size(); ++i) {
        s += format_g12(spectrum.k_perp_grid[i].x()) + "," +
             format_g12(spectrum.k_perp_grid[i].y()) + "," +
             format_g12(spectrum.r2[i]) + "," + method + "\n";
    }
    return s;
}

}  // namespace qms
