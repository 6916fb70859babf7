#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qms/geometry.hpp"

namespace qms {

enum class DriveKind { PlaneWave, GaussianBeam };

// Drive modes are normal-incidence by default; plane waves may carry a
// transverse wavevector (units of k0) for oblique spectra. Detuning rides
// along so response scans stay self-describing.
struct DriveField {
    DriveKind kind = DriveKind::GaussianBeam;
    double waist = 1.56;                             // w0 in lambda
    int direction = +1;                              // +1: toward +z, -1: toward -z
    double detuning = 0.0;                           // gamma units
    std::complex<double> amplitude{1.0, 0.0};
    Eigen::Vector2d k_perp = Eigen::Vector2d::Zero();  // k0 units, plane wave only
};

DriveField plane_wave(double detuning,
                      const Eigen::Vector2d& k_perp = Eigen::Vector2d::Zero());
DriveField gaussian_beam(double waist, double detuning);

// Field of the drive mode at the given points. Gaussian beams are the
// fundamental paraxial mode focused on the array plane (z = 0); the waist
// must stay paraxial (>= lambda/2).
Eigen::VectorXcd incident_field(const DriveField& drive,
                                const Eigen::Matrix3Xd& points);

struct PolarizationVector {
    Eigen::VectorXcd p;       // induced dipole per active atom
    Eigen::VectorXcd alphas;  // polarizability used per atom
    DriveField drive;
    double rcond = 0.0;       // reciprocal condition estimate of the solve
};

// Factors (I - C diag(alpha) G) once so many right-hand sides (detunings do
// not qualify, drives at fixed alpha do) reuse the same decomposition.
class DipoleSolver {
  public:
    DipoleSolver(const LatticeGeometry& geom, const Eigen::VectorXcd& per_atom_alpha);

    PolarizationVector solve(const DriveField& drive) const;
    Eigen::VectorXcd solve_rhs(const Eigen::VectorXcd& incident_at_atoms) const;

    const Eigen::Matrix3Xd& positions() const { return positions_; }
    double rcond() const { return rcond_; }

  private:
    Eigen::Matrix3Xd positions_;
    Eigen::VectorXcd alphas_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    double rcond_ = 0.0;
};

PolarizationVector solve_polarizability(const LatticeGeometry& geom,
                                        const Eigen::VectorXcd& per_atom_alpha,
                                        const DriveField& drive);

// Uniform two-level polarizability at the drive detuning, one entry per
// active atom.
Eigen::VectorXcd uniform_alpha(const LatticeGeometry& geom, double detuning);

// Total field: incident plus the coherent sum radiated by the dipoles.
Eigen::VectorXcd scattered_field(const LatticeGeometry& geom,
                                 const PolarizationVector& P,
                                 const Eigen::Matrix3Xd& points);

struct FieldPlane {
    double z = 0.0;
    double half_width = 0.0;
    int samples_per_side = 0;
    Eigen::Matrix3Xd points;   // square grid at fixed z, x fastest
    Eigen::VectorXcd values;
};

// Samples the field on a square window centered on the beam axis.
// include_incident = false gives the radiated part alone, which is the
// reflected wave on the input side of the array.
FieldPlane sample_plane(const LatticeGeometry& geom, const PolarizationVector& P,
                        double z, double half_width, int samples_per_side,
                        bool include_incident = true);

struct ModeFit {
    std::complex<double> amplitude{0.0, 0.0};
    double residual = 0.0;
};

// Projects the sampled field onto the drive's mode at the plane's z:
// amplitude = <mode|field> / <mode|mode>, residual = relative power left
// over. The window must span 6 w0 and resolve 8 samples per lambda.
ModeFit fit_gaussian_mode(const FieldPlane& plane, const DriveField& mode);

struct OpticalResponse {
    std::complex<double> r{0.0, 0.0};
    std::complex<double> t{0.0, 0.0};
    double scattered_weight = 0.0;  // power deficit 1 - |r|^2 - |t|^2
    double fit_residual = 0.0;      // off-mode power fraction on the reflected plane
    double detuning = 0.0;
    bool deficit_clamped = false;   // small negative deficit clamped to zero
};

struct ResponseOptions {
    // Evaluation planes sit at z = +-z_eval. 0 picks the default per drive:
    // 10 for gaussian fits, 0.25 for plane waves. The near plane keeps the
    // estimate inside the aperture's geometric shadow even at steep
    // incidence, where walk-off across a distant window biases the average;
    // the lattice's evanescent diffraction orders are already dead there
    // (their decay constants start at k0 * sqrt((lambda/a)^2 - 1)).
    double z_eval = 0.0;
    double window_half_width = 0;  // 0: sized from the mode at z_eval
    int samples_per_side = 0;      // 0: >= 8 samples per lambda
};

OpticalResponse reflection_transmission(const LatticeGeometry& geom,
                                        const Eigen::VectorXcd& per_atom_alpha,
                                        const DriveField& drive,
                                        const ResponseOptions& opts = {});

// Same response from a prefactored solver; use this when scanning many
// drives against one polarizability profile.
OpticalResponse reflection_transmission(const LatticeGeometry& geom,
                                        const DipoleSolver& solver,
                                        const DriveField& drive,
                                        const ResponseOptions& opts = {});

// Projection stage alone: mode amplitudes on both sides of the array for an
// already-computed polarization (P.drive supplies the mode pair).
OpticalResponse response_from_polarization(const LatticeGeometry& geom,
                                           const PolarizationVector& P,
                                           const ResponseOptions& opts = {});

struct ResonanceResult {
    double delta_star = 0.0;
    OpticalResponse response;
    int evaluations = 0;
};

// Locates the collective resonance numerically, scanning around the
// infinite-array estimate and maximizing -Re r. That coincides with the |r|
// peak for a clean resonance and stays well defined when finite-size arrays
// flatten the top of |r(delta)|. The drive's own detuning is ignored.
ResonanceResult find_collective_resonance(const LatticeGeometry& geom,
                                          const DriveField& drive,
                                          const ResponseOptions& opts = {});

namespace detail {

// Radiated field only (no incident term).
Eigen::VectorXcd radiated_field(const LatticeGeometry& geom,
                                const PolarizationVector& P,
                                const Eigen::Matrix3Xd& points);

// Plane-wave response projection uses a raised-cosine weighted average so
// aperture-edge ripple integrates out; exposed for tests. The residual is
// the weighted off-mode power fraction.
ModeFit windowed_plane_average(const FieldPlane& plane, const DriveField& mode);

}  // namespace detail

}  // namespace qms
