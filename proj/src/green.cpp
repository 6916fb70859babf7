#include "qms/green.hpp"

#include <cmath>
#include <numbers>

#include "qms/constants.hpp"
#include "qms/errors.hpp"

namespace qms {

namespace {
constexpr std::complex<double> kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi_v<double>;
}  // namespace

std::complex<double> green_scalar(const Eigen::Vector3d& ra,
                                  const Eigen::Vector3d& rb,
                                  const Eigen::Vector3d& dipole_axis) {
    const Eigen::Vector3d d = ra - rb;
    const double r = d.norm();
    if (r == 0.0) {
        throw InvalidArgument("green_scalar: coincident points");
    }
    const double kr = kWavenumber * r;
    const double kr2 = kr * kr;
    const double proj = d.dot(dipole_axis) / r;  // r_d / r
    const std::complex<double> ikr = kI * kr;

    const std::complex<double> iso = 1.0 + (ikr - 1.0) / kr2;
    const std::complex<double> axial = (3.0 - 3.0 * ikr - kr2) / kr2;
    return std::exp(ikr) / (4.0 * kPi * r) * (iso + axial * proj * proj);
}

GreenMatrix green_matrix(const LatticeGeometry& geom) {
    const Eigen::Matrix3Xd pos = geom.active_positions();
    const Eigen::Index n = pos.cols();
    if (n == 0) {
        throw InvalidArgument("green_matrix: geometry has no active atoms");
    }
    GreenMatrix gm;
    gm.wavenumber = kWavenumber;
    gm.entries = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const std::complex<double> g =
                green_scalar(pos.col(i), pos.col(j), geom.dipole_axis);
            gm.entries(i, j) = g;
            gm.entries(j, i) = g;  // bitwise symmetric by construction
        }
    }
    return gm;
}

namespace detail {

namespace {
// Unity out to R/2, cos^2 roll-off to zero at R.
double taper_weight(double r, double R) {
    if (r <= 0.5 * R) return 1.0;
    const double c = std::cos(kPi * (r - 0.5 * R) / R);
    return c * c;
}
}  // namespace

LatticeSum lattice_sum_gk(const Eigen::Vector2d& k_perp, double spacing,
                          double truncation_radius) {
    const double a = spacing;
    const double R = truncation_radius;
    const Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
    const Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    // Phases take k_perp in units of k0.
    const double kx = k_perp.x() * kWavenumber;
    const double ky = k_perp.y() * kWavenumber;

    const long long m = static_cast<long long>(std::ceil(R / a));
    std::complex<double> full(0.0, 0.0);
    std::complex<double> half(0.0, 0.0);
    for (long long iy = -m; iy <= m; ++iy) {
        const double y = static_cast<double>(iy) * a;
        for (long long ix = -m; ix <= m; ++ix) {
            if (ix == 0 && iy == 0) continue;
            const double x = static_cast<double>(ix) * a;
            const double r = std::hypot(x, y);
            if (r >= R) continue;
            const std::complex<double> term =
                std::polar(1.0, kx * x + ky * y) *
                green_scalar(Eigen::Vector3d(x, y, 0.0), origin, axis);
            full += taper_weight(r, R) * term;
            if (r < 0.5 * R) half += taper_weight(r, 0.5 * R) * term;
        }
    }
    return {full, half};
}

double resonance_detuning_estimate(double spacing) {
    const LatticeSum s = lattice_sum_gk(Eigen::Vector2d::Zero(), spacing, 100.0);
    return -1.5 * kGamma * s.value.real();
}

double resonance_linewidth_estimate(double spacing) {
    const LatticeSum s = lattice_sum_gk(Eigen::Vector2d::Zero(), spacing, 100.0);
    return kGamma + 3.0 * kGamma * s.value.imag();
}

}  // namespace detail

CollectiveMode collective_shift(const Eigen::Vector2d& k_perp, double spacing,
                                double truncation_radius, double tolerance) {
    if (!(spacing > 0.0) || !(spacing < 1.0)) {
        throw InvalidArgument("collective_shift: spacing must lie in (0, 1)");
    }
    if (!(truncation_radius >= 20.0)) {
        throw InvalidArgument(
            "collective_shift: truncation radius must be >= 20 lambda");
    }
    const detail::LatticeSum s =
        detail::lattice_sum_gk(k_perp, spacing, truncation_radius);

    CollectiveMode mode;
    mode.k_perp = k_perp;
    mode.delta_k = -3.0 * kGamma * s.value.real();
    mode.gamma_k = 1.5 * kGamma * s.value.imag();
    const double d_delta = std::abs(mode.delta_k + 3.0 * kGamma * s.half_radius_value.real());
    const double d_gamma = std::abs(mode.gamma_k - 1.5 * kGamma * s.half_radius_value.imag());
    mode.convergence = std::max(d_delta, d_gamma);
    if (!(mode.convergence <= tolerance)) {
        throw ConvergenceFailure(
            "collective_shift: lattice sum did not self-converge", mode.convergence);
    }
    return mode;
}

}  // namespace qms
