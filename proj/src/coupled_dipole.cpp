#include "qms/coupled_dipole.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "qms/constants.hpp"
#include "qms/errors.hpp"
#include "qms/green.hpp"

namespace qms {

namespace {

constexpr std::complex<double> kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi_v<double>;

double rayleigh_range(double waist) { return kPi * waist * waist; }

double beam_width(double waist, double z) {
    const double zr = rayleigh_range(waist);
    return waist * std::sqrt(1.0 + (z / zr) * (z / zr));
}

// Unit-amplitude mode value at one point; the drive amplitude multiplies the
// result afterwards so amplitude scaling stays bit-exact.
std::complex<double> mode_value(const DriveField& d, const Eigen::Vector3d& p) {
    const double s = static_cast<double>(d.direction);
    if (d.kind == DriveKind::PlaneWave) {
        const double kz = kWavenumber * std::sqrt(1.0 - d.k_perp.squaredNorm());
        const double phase = kWavenumber * (d.k_perp.x() * p.x() + d.k_perp.y() * p.y()) +
                             s * kz * p.z();
        return std::polar(1.0, phase);
    }
    // Fundamental paraxial mode through the complex beam parameter
    // q(z) = z - i z_R; this folds width, curvature, and Gouy phase into
    // one expression with no flat-wavefront special case.
    const double zp = s * p.z();
    const double rho2 = p.x() * p.x() + p.y() * p.y();
    const std::complex<double> q(zp, -rayleigh_range(d.waist));
    return (-kI * rayleigh_range(d.waist) / q) *
           std::exp(kI * kWavenumber * (zp + rho2 / (2.0 * q)));
}

void validate_drive(const DriveField& d) {
    if (d.direction != 1 && d.direction != -1) {
        throw InvalidArgument("drive direction must be +1 or -1 along z");
    }
    if (d.kind == DriveKind::GaussianBeam) {
        if (!(d.waist >= 0.5)) {
            throw InvalidArgument("gaussian waist must be >= lambda/2 (paraxial)");
        }
        if (d.k_perp != Eigen::Vector2d::Zero()) {
            throw InvalidArgument("gaussian drive is normal-incidence only");
        }
    } else if (!(d.k_perp.squaredNorm() < 1.0)) {
        throw InvalidArgument("plane-wave k_perp must lie inside the light cone");
    }
}

}  // namespace

DriveField plane_wave(double detuning, const Eigen::Vector2d& k_perp) {
    DriveField d;
    d.kind = DriveKind::PlaneWave;
    d.detuning = detuning;
    d.k_perp = k_perp;
    return d;
}

DriveField gaussian_beam(double waist, double detuning) {
    DriveField d;
    d.kind = DriveKind::GaussianBeam;
    d.waist = waist;
    d.detuning = detuning;
    return d;
}

Eigen::VectorXcd incident_field(const DriveField& drive,
                                const Eigen::Matrix3Xd& points) {
    validate_drive(drive);
    Eigen::VectorXcd out(points.cols());
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        out[i] = drive.amplitude * mode_value(drive, points.col(i));
    }
    return out;
}

DipoleSolver::DipoleSolver(const LatticeGeometry& geom,
                           const Eigen::VectorXcd& per_atom_alpha)
    : positions_(geom.active_positions()), alphas_(per_atom_alpha) {
    const Eigen::Index n = positions_.cols();
    if (alphas_.size() != n) {
        throw InvalidArgument(
            "solve_polarizability: one polarizability per active atom required");
    }
    Eigen::MatrixXcd m;
    {
        const GreenMatrix gm = green_matrix(geom);
        m = (-kCouplingConstant) * (alphas_.asDiagonal() * gm.entries);
    }
    m.diagonal().array() += 1.0;
    lu_.compute(m);
    rcond_ = lu_.rcond();
    if (!(rcond_ > 1.0 / kMaxConditionNumber)) {
        throw NumericalFailure("dipole system is numerically singular",
                               rcond_ > 0.0 ? 1.0 / rcond_ : 0.0);
    }
}

Eigen::VectorXcd DipoleSolver::solve_rhs(
    const Eigen::VectorXcd& incident_at_atoms) const {
    if (incident_at_atoms.size() != positions_.cols()) {
        throw InvalidArgument("incident field length must match atom count");
    }
    return lu_.solve(alphas_.cwiseProduct(incident_at_atoms));
}

PolarizationVector DipoleSolver::solve(const DriveField& drive) const {
    PolarizationVector out;
    out.drive = drive;
    out.alphas = alphas_;
    out.rcond = rcond_;
    out.p = solve_rhs(incident_field(drive, positions_));
    return out;
}

PolarizationVector solve_polarizability(const LatticeGeometry& geom,
                                        const Eigen::VectorXcd& per_atom_alpha,
                                        const DriveField& drive) {
    return DipoleSolver(geom, per_atom_alpha).solve(drive);
}

Eigen::VectorXcd uniform_alpha(const LatticeGeometry& geom, double detuning) {
    return Eigen::VectorXcd::Constant(geom.active_count(),
                                      two_level_polarizability(detuning));
}

namespace detail {

Eigen::VectorXcd radiated_field(const LatticeGeometry& geom,
                                const PolarizationVector& P,
                                const Eigen::Matrix3Xd& points) {
    const Eigen::Matrix3Xd pos = geom.active_positions();
    if (P.p.size() != pos.cols()) {
        throw InvalidArgument("polarization length must match active atoms");
    }
    Eigen::VectorXcd out(points.cols());
    const Eigen::Index np = points.cols();
    const Eigen::Index na = pos.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < np; ++i) {
        std::complex<double> acc(0.0, 0.0);
        for (Eigen::Index j = 0; j < na; ++j) {
            acc += green_scalar(points.col(i), pos.col(j), geom.dipole_axis) * P.p[j];
        }
        out[i] = kCouplingConstant * acc;
    }
    return out;
}

}  // namespace detail

Eigen::VectorXcd scattered_field(const LatticeGeometry& geom,
                                 const PolarizationVector& P,
                                 const Eigen::Matrix3Xd& points) {
    return incident_field(P.drive, points) + detail::radiated_field(geom, P, points);
}

FieldPlane sample_plane(const LatticeGeometry& geom, const PolarizationVector& P,
                        double z, double half_width, int samples_per_side,
                        bool include_incident) {
    if (!(half_width > 0.0) || samples_per_side < 2) {
        throw InvalidArgument("sample_plane: window must be positive with >= 2 samples");
    }
    FieldPlane plane;
    plane.z = z;
    plane.half_width = half_width;
    plane.samples_per_side = samples_per_side;
    const int n = samples_per_side;
    plane.points.resize(3, static_cast<Eigen::Index>(n) * n);
    const double step = 2.0 * half_width / (n - 1);
    Eigen::Index c = 0;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            plane.points.col(c++) =
                Eigen::Vector3d(-half_width + ix * step, -half_width + iy * step, z);
        }
    }
    plane.values = include_incident ? scattered_field(geom, P, plane.points)
                                    : detail::radiated_field(geom, P, plane.points);
    return plane;
}

ModeFit fit_gaussian_mode(const FieldPlane& plane, const DriveField& mode) {
    validate_drive(mode);
    if (mode.kind != DriveKind::GaussianBeam) {
        throw InvalidArgument("fit_gaussian_mode: mode must be a gaussian beam");
    }
    if (!(2.0 * plane.half_width >= 6.0 * mode.waist - 1e-12)) {
        throw InvalidArgument("fit_gaussian_mode: window narrower than 6 waists");
    }
    const double per_lambda =
        (plane.samples_per_side - 1) / (2.0 * plane.half_width);
    if (!(per_lambda >= 8.0 - 1e-12)) {
        throw InvalidArgument("fit_gaussian_mode: need >= 8 samples per lambda");
    }
    const Eigen::VectorXcd m = incident_field(mode, plane.points);
    const std::complex<double> overlap = m.dot(plane.values);  // conj on m
    const double norm = m.squaredNorm();
    ModeFit fit;
    fit.amplitude = overlap / norm;
    const double power = plane.values.squaredNorm();
    if (power > 0.0) {
        fit.residual = (plane.values - fit.amplitude * m).squaredNorm() / power;
    }
    return fit;
}

namespace detail {

ModeFit windowed_plane_average(const FieldPlane& plane, const DriveField& mode) {
    const Eigen::VectorXcd m = incident_field(mode, plane.points);
    const Eigen::Index n = plane.points.cols();
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double cx =
            std::cos(0.5 * kPi * plane.points(0, i) / plane.half_width);
        const double cy =
            std::cos(0.5 * kPi * plane.points(1, i) / plane.half_width);
        w[i] = cx * cx * cy * cy;
    }
    std::complex<double> num(0.0, 0.0);
    double den = 0.0;
    double power = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        num += w[i] * std::conj(m[i]) * plane.values[i];
        den += w[i] * std::norm(m[i]);
        power += w[i] * std::norm(plane.values[i]);
    }
    ModeFit fit;
    fit.amplitude = num / den;
    if (power > 0.0) {
        double off = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            off += w[i] * std::norm(plane.values[i] - fit.amplitude * m[i]);
        }
        fit.residual = off / power;
    }
    return fit;
}

}  // namespace detail

namespace {

struct PlaneSpec {
    double z_eval;
    double half_width;
    int samples;
};

PlaneSpec resolve_plane_spec(const LatticeGeometry& geom, const DriveField& drive,
                             const ResponseOptions& opts) {
    PlaneSpec spec{};
    const bool gaussian = drive.kind == DriveKind::GaussianBeam;
    spec.z_eval = opts.z_eval > 0.0 ? opts.z_eval : (gaussian ? 10.0 : 0.25);
    if (opts.window_half_width > 0.0) {
        spec.half_width = opts.window_half_width;
    } else if (gaussian) {
        // Cover 6 w0 and keep the mode's tail at the window edge negligible.
        spec.half_width = std::max(3.0 * drive.waist,
                                   2.2 * beam_width(drive.waist, spec.z_eval));
    } else {
        // Stay inside the array's geometric shadow; the raised-cosine weight
        // de-emphasizes the rim where edge diffraction lives.
        const double side =
            std::min(geom.nx - 1, geom.ny - 1) * geom.spacing;
        spec.half_width = std::max(1.0, 0.35 * side);
    }
    spec.samples = opts.samples_per_side > 0
                       ? opts.samples_per_side
                       : static_cast<int>(std::ceil(16.0 * spec.half_width)) + 1;
    return spec;
}

}  // namespace

OpticalResponse reflection_transmission(const LatticeGeometry& geom,
                                        const Eigen::VectorXcd& per_atom_alpha,
                                        const DriveField& drive,
                                        const ResponseOptions& opts) {
    return response_from_polarization(
        geom, solve_polarizability(geom, per_atom_alpha, drive), opts);
}

OpticalResponse reflection_transmission(const LatticeGeometry& geom,
                                        const DipoleSolver& solver,
                                        const DriveField& drive,
                                        const ResponseOptions& opts) {
    if (solver.positions().cols() != geom.active_count()) {
        throw InvalidArgument(
            "reflection_transmission: solver was built for a different geometry");
    }
    return response_from_polarization(geom, solver.solve(drive), opts);
}

OpticalResponse response_from_polarization(const LatticeGeometry& geom,
                                           const PolarizationVector& P,
                                           const ResponseOptions& opts) {
    const DriveField& drive = P.drive;
    validate_drive(drive);
    if (opts.z_eval < 0.0) {
        throw InvalidArgument("reflection_transmission: z_eval must be positive");
    }
    const PlaneSpec spec = resolve_plane_spec(geom, drive, opts);
    const double s = static_cast<double>(drive.direction);

    // Transmission carries the incident wave; reflection is radiated only.
    const FieldPlane out_plane = sample_plane(geom, P, s * spec.z_eval,
                                              spec.half_width, spec.samples, true);
    const FieldPlane back_plane = sample_plane(geom, P, -s * spec.z_eval,
                                               spec.half_width, spec.samples, false);
    DriveField fwd = drive;
    fwd.amplitude = 1.0;
    DriveField bwd = fwd;
    bwd.direction = -drive.direction;

    OpticalResponse resp;
    resp.detuning = drive.detuning;
    const bool gaussian = drive.kind == DriveKind::GaussianBeam;
    if (gaussian) {
        const ModeFit ft = fit_gaussian_mode(out_plane, fwd);
        const ModeFit fr = fit_gaussian_mode(back_plane, bwd);
        resp.t = ft.amplitude / drive.amplitude;
        resp.r = fr.amplitude / drive.amplitude;
        // The transmitted-plane residual ratio degenerates behind a good
        // mirror (the denominator is the leftover power), so only the
        // reflected-plane fit quality is reported.
        resp.fit_residual = fr.residual;
    } else {
        const ModeFit ft = detail::windowed_plane_average(out_plane, fwd);
        const ModeFit fr = detail::windowed_plane_average(back_plane, bwd);
        resp.t = ft.amplitude / drive.amplitude;
        resp.r = fr.amplitude / drive.amplitude;
        resp.fit_residual = fr.residual;
    }

    // Small negative deficits are window artifacts (aperture ripple for
    // plane waves, grid truncation for fits); anything large signals a
    // mis-calibrated coupling constant and must not pass silently.
    const double floor = -1e-2;
    const double deficit = 1.0 - std::norm(resp.r) - std::norm(resp.t);
    if (deficit < 0.0) {
        if (deficit < floor) {
            throw NumericalFailure(
                "reflection_transmission: energy bookkeeping violated", -deficit);
        }
        resp.scattered_weight = 0.0;
        resp.deficit_clamped = true;
    } else {
        resp.scattered_weight = deficit;
    }
    return resp;
}

namespace {

// Search objective: -Re r. At an isolated resonance this peaks exactly where
// |r| does (the phase passes through pi there), but unlike |r| it stays
// single-peaked when small arrays develop a flat-topped |r(delta)|, where the
// amplitude alone is degenerate to within the fit accuracy.
double resonance_metric(const LatticeGeometry& geom, const DriveField& proto,
                        double delta, const ResponseOptions& opts,
                        OpticalResponse& out, int& evals) {
    DriveField d = proto;
    d.detuning = delta;
    out = reflection_transmission(geom, uniform_alpha(geom, delta), d, opts);
    ++evals;
    return -out.r.real();
}

}  // namespace

ResonanceResult find_collective_resonance(const LatticeGeometry& geom,
                                          const DriveField& drive,
                                          const ResponseOptions& opts) {
    const double center = detail::resonance_detuning_estimate(geom.spacing);
    const double lw = detail::resonance_linewidth_estimate(geom.spacing);

    ResonanceResult result;
    int evals = 0;

    // Large systems: pin the peak on a reduced lattice first, every
    // evaluation on the full system costs a dense factorization.
    const bool two_stage = geom.active_count() > 1200;
    LatticeGeometry coarse =
        two_stage ? build_square_lattice(std::min(geom.nx, 31), std::min(geom.ny, 31),
                                         geom.spacing)
                  : geom;

    OpticalResponse scratch;
    double best_delta = center;
    double best_val = -1.0;
    const double span = 0.75 * lw;
    const int coarse_points = 9;
    for (int i = 0; i < coarse_points; ++i) {
        const double d =
            center - span + 2.0 * span * i / (coarse_points - 1);
        const double v = resonance_metric(coarse, drive, d, opts, scratch, evals);
        if (v > best_val) {
            best_val = v;
            best_delta = d;
        }
    }
    // Golden-section refinement on the bracketing interval.
    {
        const double step = 2.0 * span / (coarse_points - 1);
        double lo = best_delta - step;
        double hi = best_delta + step;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo);
        double x2 = lo + gr * (hi - lo);
        double f1 = resonance_metric(coarse, drive, x1, opts, scratch, evals);
        double f2 = resonance_metric(coarse, drive, x2, opts, scratch, evals);
        for (int it = 0; it < 10; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = resonance_metric(coarse, drive, x2, opts, scratch, evals);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = resonance_metric(coarse, drive, x1, opts, scratch, evals);
            }
        }
        best_delta = 0.5 * (lo + hi);
    }

    if (!two_stage) {
        result.delta_star = best_delta;
        result.evaluations = evals + 1;
        DriveField d = drive;
        d.detuning = best_delta;
        result.response =
            reflection_transmission(geom, uniform_alpha(geom, best_delta), d, opts);
        return result;
    }

    // Full-size stage: three points around the coarse peak, parabolic vertex.
    const double h = 0.05 * lw;
    OpticalResponse r_lo, r_mid, r_hi;
    const double f_lo = resonance_metric(geom, drive, best_delta - h, opts, r_lo, evals);
    const double f_mid = resonance_metric(geom, drive, best_delta, opts, r_mid, evals);
    const double f_hi = resonance_metric(geom, drive, best_delta + h, opts, r_hi, evals);
    double vertex = best_delta;
    const double denom = f_lo - 2.0 * f_mid + f_hi;
    if (denom < 0.0) {
        vertex = best_delta + 0.5 * h * (f_lo - f_hi) / denom;
        vertex = std::clamp(vertex, best_delta - h, best_delta + h);
    }
    OpticalResponse r_vx;
    const double f_vx = resonance_metric(geom, drive, vertex, opts, r_vx, evals);

    result.evaluations = evals;
    if (f_vx >= f_mid && f_vx >= f_lo && f_vx >= f_hi) {
        result.delta_star = vertex;
        result.response = r_vx;
    } else if (f_mid >= f_lo && f_mid >= f_hi) {
        result.delta_star = best_delta;
        result.response = r_mid;
    } else if (f_lo >= f_hi) {
        result.delta_star = best_delta - h;
        result.response = r_lo;
    } else {
        result.delta_star = best_delta + h;
        result.response = r_hi;
    }
    return result;
}

}  // namespace qms
