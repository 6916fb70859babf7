#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qms/geometry.hpp"

namespace qms {

// Per-atom polarizability pattern written onto the array. The periodic
// variant modulates the bare value as alpha0 * (1 + cos(2 K_a . r_i)) / 2,
// which carves a stop band for transverse momenta near K_a.
struct PermittivityProfile {
    Eigen::VectorXcd alpha_i;                        // one entry per active atom
    std::string label;                               // "uniform" or "periodic"
    Eigen::Vector2d K_a = Eigen::Vector2d::Zero();   // k0 units
    std::complex<double> alpha0{0.0, 0.0};
};

PermittivityProfile uniform_profile(const LatticeGeometry& geom,
                                    std::complex<double> alpha0);

// Requires |K_a| < 1 (inside the light cone). K_a = 0 degenerates to the
// uniform profile.
PermittivityProfile periodic_profile(const LatticeGeometry& geom,
                                     const Eigen::Vector2d& K_a,
                                     std::complex<double> alpha0);

enum class SpectrumMethod { RealSpace, Eigenmode };

// |r|^2 against transverse momentum, all grid points strictly inside the
// light cone. The eigenmode method also reports how much polarizability
// weight its diagonal approximation discarded (Frobenius ratio of the
// off-diagonal block), so the quality of the shortcut is visible next to
// the numbers it produced.
struct ReflectivitySpectrum {
    std::vector<Eigen::Vector2d> k_perp_grid;   // k0 units
    std::vector<double> r2;
    SpectrumMethod method = SpectrumMethod::RealSpace;
    double offdiag_discarded = 0.0;             // eigenmode only
};

// Drives the array with a plane wave per grid point and projects the
// radiated field onto the specular reflected mode. One matrix
// factorization per profile; grid points only change the right-hand side.
// Periodic profiles require the array to span >= 4 modulation periods.
ReflectivitySpectrum reflectivity_spectrum_realspace(
    const LatticeGeometry& geom, const PermittivityProfile& profile,
    const std::vector<Eigen::Vector2d>& k_grid);

// Cross-check via the collective-mode basis: diagonalizes the bare
// interaction, keeps only the diagonal of the profile in that basis, and
// feeds the resulting polarization through the same mode projection as the
// real-space method. Exact for uniform profiles.
ReflectivitySpectrum reflectivity_spectrum_eigenmode(
    const LatticeGeometry& geom, const PermittivityProfile& profile,
    const std::vector<Eigen::Vector2d>& k_grid);

// CSV with a units comment; columns kx,ky,r2,method.
std::string spectrum_csv(const ReflectivitySpectrum& spectrum);

}  // namespace qms
