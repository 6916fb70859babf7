#include "qms/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qms/errors.hpp"

namespace qms {

int LatticeGeometry::active_count() const {
    return static_cast<int>(std::count(active.begin(), active.end(), true));
}

Eigen::Matrix3Xd LatticeGeometry::active_positions() const {
    Eigen::Matrix3Xd out(3, active_count());
    int k = 0;
    for (int i = 0; i < total_sites(); ++i) {
        if (active[i]) out.col(k++) = positions.col(i);
    }
    return out;
}

std::vector<int> LatticeGeometry::active_indices() const {
    std::vector<int> idx;
    idx.reserve(active.size());
    for (int i = 0; i < total_sites(); ++i) {
        if (active[i]) idx.push_back(i);
    }
    return idx;
}

LatticeGeometry build_square_lattice(int nx, int ny, double spacing) {
    if (nx < 1 || ny < 1) {
        throw InvalidArgument("build_square_lattice: site counts must be >= 1");
    }
    if (!(spacing > 0.0) || !(spacing < 1.0)) {
        throw InvalidArgument(
            "build_square_lattice: spacing must lie in (0, 1) lambda");
    }
    LatticeGeometry g;
    g.nx = nx;
    g.ny = ny;
    g.spacing = spacing;
    g.positions.resize(3, static_cast<Eigen::Index>(nx) * ny);
    const double x0 = 0.5 * (nx - 1);
    const double y0 = 0.5 * (ny - 1);
    Eigen::Index c = 0;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            g.positions.col(c++) =
                Eigen::Vector3d((ix - x0) * spacing, (iy - y0) * spacing, 0.0);
        }
    }
    g.active.assign(static_cast<std::size_t>(nx) * ny, true);
    return g;
}

long long round_half_even(double x) {
    const double snapped = std::round(x * 1e9) / 1e9;
    const double floor_v = std::floor(snapped);
    const double frac = snapped - floor_v;
    if (frac > 0.5) return static_cast<long long>(floor_v) + 1;
    if (frac < 0.5) return static_cast<long long>(floor_v);
    const long long lo = static_cast<long long>(floor_v);
    return (lo % 2 == 0) ? lo : lo + 1;
}

namespace detail {

std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw InvalidArgument("bounded_uniform: empty range");
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
        const std::uint64_t v = rng() & mask;
        if (v < n) return v;
    }
}

}  // namespace detail

LatticeGeometry apply_defects(const LatticeGeometry& geom, double fraction,
                              std::uint64_t seed) {
    if (!(fraction >= 0.0) || !(fraction <= 1.0)) {
        throw InvalidArgument("apply_defects: fraction must lie in [0, 1]");
    }
    if (fraction == 0.0) return geom;

    std::vector<int> idx = geom.active_indices();
    const std::uint64_t n = idx.size();
    const long long remove = round_half_even(fraction * static_cast<double>(n));

    LatticeGeometry out = geom;
    out.defect_fraction = fraction;
    out.defect_seed = seed;

    // Partial Fisher-Yates over the active sites; the first `remove` slots
    // are the defect set. Fully determined by (active set, fraction, seed).
    std::mt19937_64 rng(seed);
    for (long long i = 0; i < remove; ++i) {
        const std::uint64_t j =
            static_cast<std::uint64_t>(i) + detail::bounded_uniform(rng, n - i);
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
        out.active[static_cast<std::size_t>(idx[i])] = false;
    }
    return out;
}

}  // namespace qms
