#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "qms/errors.hpp"
#include "qms/geometry.hpp"

using namespace qms;

TEST_CASE("square lattice layout") {
    const auto g = build_square_lattice(3, 4, 0.2);
    CHECK(g.total_sites() == 12);
    CHECK(g.active_count() == 12);
    CHECK(g.nx == 3);
    CHECK(g.ny == 4);

    // x runs fastest; site (ix, iy) sits at column iy * nx + ix.
    CHECK(g.positions.col(1 * 3 + 2).x() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(g.positions.col(1 * 3 + 2).y() == doctest::Approx(-0.1).epsilon(1e-15));

    // Centered on the origin, all in the z = 0 plane.
    CHECK(std::abs(g.positions.row(0).sum()) <= 1e-13);
    CHECK(std::abs(g.positions.row(1).sum()) <= 1e-13);
    CHECK((g.positions.row(2).array() == 0.0).all());

    // Neighbor spacing along both axes.
    CHECK((g.positions.col(1) - g.positions.col(0)).norm() ==
          doctest::Approx(0.2).epsilon(1e-14));
    CHECK((g.positions.col(3) - g.positions.col(0)).norm() ==
          doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("lattice preconditions") {
    CHECK_THROWS_AS(build_square_lattice(0, 3, 0.2), InvalidArgument);
    CHECK_THROWS_AS(build_square_lattice(3, -1, 0.2), InvalidArgument);
    CHECK_THROWS_AS(build_square_lattice(3, 3, 0.0), InvalidArgument);
    CHECK_THROWS_AS(build_square_lattice(3, 3, 1.0), InvalidArgument);
    CHECK_THROWS_AS(build_square_lattice(3, 3, -0.2), InvalidArgument);
}

TEST_CASE("round half even") {
    CHECK(round_half_even(0.0) == 0);
    CHECK(round_half_even(10.42) == 10);
    CHECK(round_half_even(10.58) == 11);
    CHECK(round_half_even(0.5) == 0);
    CHECK(round_half_even(1.5) == 2);
    CHECK(round_half_even(2.5) == 2);
    CHECK(round_half_even(3.5) == 4);
    CHECK(round_half_even(62.5) == 62);
    CHECK(round_half_even(63.5) == 64);

    // 0.1 * 625 lands a hair above 62.5 in binary; the nano-snap must pull
    // it back onto the tie before the even rule applies.
    CHECK(round_half_even(0.1 * 625.0) == 62);
    CHECK(round_half_even(0.02 * 529.0) == 11);
    CHECK(round_half_even(62.4999999996) == 62);
}

TEST_CASE("bounded uniform draws stay in range") {
    std::mt19937_64 rng(12345);
    for (std::uint64_t n : {1ull, 2ull, 3ull, 7ull, 529ull}) {
        for (int i = 0; i < 2000; ++i) {
            CHECK(detail::bounded_uniform(rng, n) < n);
        }
    }
    std::mt19937_64 one(9);
    CHECK(detail::bounded_uniform(one, 1) == 0);
    CHECK_THROWS_AS(detail::bounded_uniform(one, 0), InvalidArgument);
}

TEST_CASE("defect counts are exact") {
    const auto g23 = build_square_lattice(23, 23, 0.2);
    CHECK(apply_defects(g23, 0.02, 7).active_count() == 529 - 11);

    const auto g25 = build_square_lattice(25, 25, 0.2);
    CHECK(apply_defects(g25, 0.1, 7).active_count() == 625 - 62);

    CHECK(apply_defects(g25, 1.0, 3).active_count() == 0);
}

TEST_CASE("defects are deterministic in the seed") {
    const auto g = build_square_lattice(10, 10, 0.3);
    const auto a = apply_defects(g, 0.25, 42);
    const auto b = apply_defects(g, 0.25, 42);
    const auto c = apply_defects(g, 0.25, 43);
    CHECK(a.active == b.active);
    CHECK(a.active != c.active);
    CHECK(a.defect_fraction == 0.25);
    CHECK(a.defect_seed == 42);
    // Positions are never touched, only the active mask.
    CHECK(a.positions == g.positions);
}

TEST_CASE("zero fraction is the identity") {
    const auto g = build_square_lattice(5, 5, 0.2);
    const auto out = apply_defects(g, 0.0, 99);
    CHECK(out.active == g.active);
    CHECK(out.active_count() == 25);
}

TEST_CASE("defects stack on the remaining active set") {
    const auto g = build_square_lattice(10, 10, 0.3);
    const auto once = apply_defects(g, 0.1, 1);
    CHECK(once.active_count() == 90);
    const auto twice = apply_defects(once, 0.1, 2);
    CHECK(twice.active_count() == 81);
    // Nothing that was already inactive comes back.
    for (int i = 0; i < g.total_sites(); ++i) {
        if (!once.active[i]) CHECK(!twice.active[i]);
    }
}

TEST_CASE("defect fraction is validated") {
    const auto g = build_square_lattice(4, 4, 0.2);
    CHECK_THROWS_AS(apply_defects(g, -0.1, 0), InvalidArgument);
    CHECK_THROWS_AS(apply_defects(g, 1.0001, 0), InvalidArgument);
}

TEST_CASE("active views agree with the mask") {
    const auto g = apply_defects(build_square_lattice(7, 7, 0.25), 0.2, 5);
    const auto idx = g.active_indices();
    const auto pos = g.active_positions();
    REQUIRE(static_cast<int>(idx.size()) == g.active_count());
    REQUIRE(static_cast<int>(pos.cols()) == g.active_count());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        CHECK(g.active[idx[k]]);
        CHECK(pos.col(k) == g.positions.col(idx[k]));
    }
    CHECK(std::is_sorted(idx.begin(), idx.end()));
}

TEST_CASE("defect draw is unbiased across sites") {
    // Each site should be removed in roughly fraction of many seeded runs.
    const auto g = build_square_lattice(6, 6, 0.2);
    const int runs = 4000;
    std::vector<int> removed(36, 0);
    for (int s = 0; s < runs; ++s) {
        const auto d = apply_defects(g, 0.25, 1000 + s);
        for (int i = 0; i < 36; ++i) {
            if (!d.active[i]) ++removed[i];
        }
    }
    for (int i = 0; i < 36; ++i) {
        const double rate = static_cast<double>(removed[i]) / runs;
        CHECK(rate > 0.25 - 0.035);
        CHECK(rate < 0.25 + 0.035);
    }
}
