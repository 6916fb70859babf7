#ifndef QMS_GEOMETRY_HPP
#define QMS_GEOMETRY_HPP

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace qms {

// A finite rectangular lattice of scatterers in the z = 0 plane, centered at
// the origin. Sites stay in `positions` after defects are applied; `active`
// marks which atoms are present. All dipoles share one in-plane axis.
struct LatticeGeometry {
    Eigen::Matrix3Xd positions;       // all sites, columns are (x, y, 0) in lambda
    std::vector<bool> active;         // per-site presence mask
    double spacing = 0.0;             // lattice constant in lambda, in (0, 1)
    int nx = 0;
    int ny = 0;
    Eigen::Vector3d dipole_axis = Eigen::Vector3d::UnitX();

    // Defect bookkeeping, recorded by apply_defects.
    double defect_fraction = 0.0;
    std::uint64_t defect_seed = 0;

    int total_sites() const { return static_cast<int>(positions.cols()); }
    int active_count() const;
    Eigen::Matrix3Xd active_positions() const;
    std::vector<int> active_indices() const;
};

LatticeGeometry build_square_lattice(int nx, int ny, double spacing);

// Deactivates exactly round_half_even(fraction * N_active) atoms, chosen
// uniformly over all active sites (center included) by a deterministic
// seeded stream. fraction = 0 returns the input unchanged.
LatticeGeometry apply_defects(const LatticeGeometry& geom, double fraction,
                              std::uint64_t seed);

// Round to nearest with ties to even, after snapping to 1e-9 to absorb
// decimal parse error in fractions like 0.1 (0.1 * 625 must count as 62.5).
long long round_half_even(double x);

namespace detail {
// Deterministic bounded draw in [0, n): masked rejection on the engine's raw
// 64-bit output, so results do not depend on the standard library's
// distribution implementation.
std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t n);
}  // namespace detail

}  // namespace qms

#endif
