#include <catch2/catch_amalgamated.hpp>

#include <extremal_rays/grid_solver.hpp>
#include <extremal_rays/modulus_analytic.hpp>

#include <numbers>

using namespace extremal_rays;
using Catch::Approx;

TEST_CASE("standard box has modulus one and Liouville log 2") {
    GeodesicBox box = standard_box();
    CHECK(box.liouville() == Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(disk_box_modulus(box) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerating boxes have vanishing modulus") {
    // b -> a: cross ratio -> 1, modulus -> 0
    double a = 0;
    for (double b : {0.5, 0.1, 0.01, 0.001}) {
        GeodesicBox box(a, b, std::numbers::pi, 3 * std::numbers::pi / 2);
        double m = disk_box_modulus(box);
        CHECK(m > 0);
        CHECK(m < disk_box_modulus(GeodesicBox(a, 2 * b, std::numbers::pi,
                                               3 * std::numbers::pi / 2)));
    }
    CHECK(disk_box_modulus(GeodesicBox(0, 1e-5, std::numbers::pi, 3 * std::numbers::pi / 2)) <
          0.25);
}

TEST_CASE("box modulus round trips through the inversion") {
    for (double m : {0.3, 1.0, 2.0, 5.0}) {
        double cr = detail::cr_from_box_modulus(m);
        CHECK(detail::box_modulus_from_cr(cr) == Approx(m).epsilon(1e-12));
    }
}

TEST_CASE("box modulus agrees with rectangle capacities") {
    // a rectangle [0,1] x [0,M] with the vertical sides marked is the
    // canonical quadrilateral of modulus M; its boundary cross ratio is the
    // elliptic one
    SlitDomain r = build_rectangle(Dyadic(1), Dyadic(2));
    BoundarySet left(&r, {BoundaryPiece{FeatureKind::outer_edge, 3, Side::pos, 0, Dyadic(0), Dyadic(2)}});
    BoundarySet right(&r, {BoundaryPiece{FeatureKind::outer_edge, 1, Side::neg, 0, Dyadic(0), Dyadic(2)}});
    ModulusResult grid = grid_modulus(r, left, right, Dyadic(1, 5));
    double cr = detail::cr_from_box_modulus(2.0);
    CHECK(grid.extrapolated == Approx(detail::box_modulus_from_cr(cr)).margin(1e-6));
}

TEST_CASE("cross-ratio-4 box against the half-strip grid oracle") {
    // Under w = sin(pi(z - 1/2)), the half-strip [0,1] x [0,inf) maps to the
    // upper half plane with the segments {0} x [0, y0] and {1} x [0, y0],
    // y0 = arccosh(s)/pi, landing on [-s,-1] and [1,s]. The quadruple
    // (-s,-1,1,s) has cross ratio (1+k)^2/(4k) with k = 1/s; s solves cr = 4.
    // Truncating the strip at height 4 changes the modulus by O(e^{-2 pi 3}).
    double cr = 4.0;
    double k = 1.0 / (2.0 * cr - 1.0 + 2.0 * std::sqrt(cr * (cr - 1.0)));
    double s = 1.0 / k;
    double y0 = std::acosh(s) / std::numbers::pi;
    // snap y0 to the grid h = 1/256
    Dyadic h(1, 8);
    Dyadic y0g(std::llround(y0 * 256), 8);
    SlitDomain strip = build_rectangle(Dyadic(1), Dyadic(4));
    BoundarySet e(&strip, {BoundaryPiece{FeatureKind::outer_edge, 3, Side::pos, 0, Dyadic(0), y0g}});
    BoundarySet f(&strip, {BoundaryPiece{FeatureKind::outer_edge, 1, Side::neg, 0, Dyadic(0), y0g}});
    GridOptions opt;
    opt.conjugate = false;
    ModulusResult grid = grid_modulus(strip, e, f, h, opt);
    double analytic = detail::box_modulus_from_cr(cr);
    INFO("grid " << grid.extrapolated << " +- " << grid.error_bar << " analytic " << analytic);
    CHECK(grid.extrapolated == Approx(analytic).epsilon(0.01));
}

TEST_CASE("reldist bound values") {
    CHECK(reldist_bound_from_delta(1.0) == Approx(9 * std::numbers::pi / 4).epsilon(1e-14));
    CHECK(reldist_bound_from_delta(0.125) == Approx(25 * std::numbers::pi).epsilon(1e-14));
    CHECK(reldist_bound_from_delta(1e9) == Approx(std::numbers::pi).epsilon(1e-6));
    CHECK_THROWS_AS(reldist_bound(0.5, 0.0, 1.0), invalid_parameter);
    CHECK_THROWS_AS(reldist_bound(0.0, 1.0, 1.0), invalid_parameter);
}

TEST_CASE("slit bounds") {
    auto [lo, hi] = slit_bounds(1, 1, 0.5, 4);
    CHECK(lo == Approx(0.5));
    CHECK(hi == Approx(0.625));
    auto [lo2, hi2] = slit_bounds(1, 1, 0.5, 1 << 20);
    CHECK(hi2 - lo2 == Approx(0.0).margin(1e-6));
    // the squeezed comb window instance: c/a = 2, N = 2^k
    auto [lo3, hi3] = slit_bounds(0.5, 1.5, 1.0, 16);
    CHECK(lo3 == Approx(2.0));
    CHECK(hi3 == Approx(2.0 + 1.0 / 32));
    CHECK_THROWS_AS(slit_bounds(1, 1, 2, 4), invalid_parameter);
}

TEST_CASE("mod-Liouville gap at the standard box") {
    double gap = mod_liouville_gap(standard_box());
    double expect = 1.0 - std::log(2.0) / std::numbers::pi -
                    (2.0 / std::numbers::pi) * std::log(4.0);
    CHECK(gap == Approx(expect).epsilon(1e-12));
}

TEST_CASE("mod-Liouville gap is Moebius invariant") {
    GeodesicBox box(0.3, 1.1, 2.9, 4.4);
    MoebiusDisk g{0.7, {0.31, -0.2}};
    GeodesicBox moved = g.transport(box);
    CHECK(mod_liouville_gap(moved) == Approx(mod_liouville_gap(box)).margin(1e-10));
}

TEST_CASE("mod-Liouville gap decays through the degenerating family") {
    double prev = std::numeric_limits<double>::infinity();
    for (int m = 2; m <= 8; ++m) {
        double cr = detail::cr_from_box_modulus((double)m);
        double gap = std::abs(mod_liouville_gap_from_cr(cr));
        CHECK(gap < prev);
        prev = gap;
        CHECK(gap < 0.01);
    }
    CHECK(prev < 1e-9);
}
