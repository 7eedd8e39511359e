#include <catch2/catch_amalgamated.hpp>

#include <extremal_rays/comb.hpp>
#include <extremal_rays/grid_solver.hpp>
#include <extremal_rays/modulus_analytic.hpp>

using namespace extremal_rays;
using Catch::Approx;

namespace {

BoundarySet edge_set(const SlitDomain& dom, int edge) {
    DyPoint a = dom.edge_start(edge), b = dom.edge_end(edge);
    bool horizontal = dom.edge_horizontal(edge);
    Dyadic lo = horizontal ? std::min(a.x, b.x) : std::min(a.y, b.y);
    Dyadic hi = horizontal ? std::max(a.x, b.x) : std::max(a.y, b.y);
    return BoundarySet(&dom, {BoundaryPiece{FeatureKind::outer_edge, edge,
                                            dom.edge_interior_side(edge), 0, lo, hi}});
}

}  // namespace

TEST_CASE("unit square left-right modulus is exactly one") {
    SlitDomain sq = build_rectangle(Dyadic(1), Dyadic(1));
    ModulusResult m = grid_modulus(sq, edge_set(sq, 3), edge_set(sq, 1), Dyadic(1, 5));
    CHECK(m.value == Approx(1.0).margin(1e-8));
    CHECK(m.extrapolated == Approx(1.0).margin(1e-7));
    REQUIRE(m.reciprocity_gap.has_value());
    CHECK(*m.reciprocity_gap < 1e-7);
}

TEST_CASE("2x1 rectangle left-right modulus is 1/2") {
    SlitDomain r = build_rectangle(Dyadic(2), Dyadic(1));
    ModulusResult m = grid_modulus(r, edge_set(r, 3), edge_set(r, 1), Dyadic(1, 4));
    CHECK(m.value == Approx(0.5).margin(1e-8));
    ModulusResult mt = grid_modulus(r, edge_set(r, 0), edge_set(r, 2), Dyadic(1, 4));
    CHECK(mt.value == Approx(2.0).margin(1e-7));
}

TEST_CASE("grid rejects off-grid and too-coarse geometry") {
    SlitDomain dn = build_slit_rectangle(Dyadic(1), Dyadic(1), Dyadic(1, 1), 4);
    CHECK_THROWS_AS(grid_modulus(dn, edge_set(dn, 3), edge_set(dn, 1), Dyadic(1, 2)),
                    resolution_error);
    CHECK_THROWS_AS(grid_modulus(dn, edge_set(dn, 3), edge_set(dn, 1), Dyadic(3, 4)),
                    resolution_error);
}

TEST_CASE("empty or overlapping electrode sets are rejected") {
    SlitDomain sq = build_rectangle(Dyadic(1), Dyadic(1));
    BoundarySet left = edge_set(sq, 3);
    CHECK_THROWS_AS(grid_modulus(sq, left, left, Dyadic(1, 4)), invalid_parameter);
    BoundarySet empty(&sq, {});
    CHECK_THROWS_AS(grid_modulus(sq, empty, left, Dyadic(1, 4)), invalid_parameter);
}

TEST_CASE("slit rectangle modulus obeys the two-sided bounds") {
    for (auto [cnum, cden, N] : {std::tuple{1, 1, 2}, {1, 1, 4}, {1, 2, 4}}) {
        Dyadic c(cnum, cden);
        SlitDomain dn = build_slit_rectangle(Dyadic(1), Dyadic(1), c, N);
        BoundarySet e(&dn, {BoundaryPiece{FeatureKind::outer_edge, 3, Side::pos, 0, Dyadic(0), c}});
        BoundarySet f(&dn, {BoundaryPiece{FeatureKind::outer_edge, 1, Side::neg, 0, Dyadic(0), c}});
        ModulusResult m = grid_modulus(dn, e, f, Dyadic(1, 7));
        auto [lo, hi] = slit_bounds(1, 1, c.value(), N);
        INFO("c=" << c.value() << " N=" << N << " mod=" << m.extrapolated << " +-" << m.error_bar);
        CHECK(m.extrapolated >= lo - m.error_bar);
        CHECK(m.extrapolated <= hi + m.error_bar);
    }
}

TEST_CASE("discrete energy is exactly scale invariant") {
    SlitDomain dn1 = build_slit_rectangle(Dyadic(1), Dyadic(1), Dyadic(1, 1), 2);
    SlitDomain dn2 = build_slit_rectangle(Dyadic(2), Dyadic(2), Dyadic(1), 2);
    auto low_edges = [](const SlitDomain& d, Dyadic c) {
        return std::pair{
            BoundarySet(&d, {BoundaryPiece{FeatureKind::outer_edge, 3, Side::pos, 0, Dyadic(0), c}}),
            BoundarySet(&d, {BoundaryPiece{FeatureKind::outer_edge, 1, Side::neg, 0, Dyadic(0), c}})};
    };
    auto [e1, f1] = low_edges(dn1, Dyadic(1, 1));
    auto [e2, f2] = low_edges(dn2, Dyadic(1));
    GridOptions opt;
    opt.conjugate = false;
    ModulusResult m1 = grid_modulus(dn1, e1, f1, Dyadic(1, 6), opt);
    ModulusResult m2 = grid_modulus(dn2, e2, f2, Dyadic(1, 5), opt);
    CHECK(m1.value == m2.value);  // bitwise: identical cell graphs
}

TEST_CASE("interior slits can carry electrodes") {
    // two parallel interior slits as plates: capacity close to length/gap
    std::vector<Slit> slits = {
        Slit{{Dyadic(1, 2), Dyadic(3, 3)}, {Dyadic(3, 2), Dyadic(3, 3)}, false, false},
        Slit{{Dyadic(1, 2), Dyadic(5, 3)}, {Dyadic(3, 2), Dyadic(5, 3)}, false, false}};
    SlitDomain box({{Dyadic(0), Dyadic(0)}, {Dyadic(1), Dyadic(0)}, {Dyadic(1), Dyadic(1)},
                    {Dyadic(0), Dyadic(1)}},
                   std::move(slits));
    BoundarySet e(&box, {BoundaryPiece{FeatureKind::slit_side, 0, Side::neg, 0, Dyadic(1, 2), Dyadic(3, 2)},
                         BoundaryPiece{FeatureKind::slit_side, 0, Side::pos, 0, Dyadic(1, 2), Dyadic(3, 2)}});
    BoundarySet f(&box, {BoundaryPiece{FeatureKind::slit_side, 1, Side::neg, 0, Dyadic(1, 2), Dyadic(3, 2)},
                         BoundaryPiece{FeatureKind::slit_side, 1, Side::pos, 0, Dyadic(1, 2), Dyadic(3, 2)}});
    ModulusResult m = grid_modulus(box, e, f, Dyadic(1, 7));
    // plates of length 1/2 at gap 1/4: parallel-plate part 2 plus fringing
    CHECK(m.extrapolated > 2.0);
    CHECK(m.extrapolated < 4.0);
    // no prime-end cycle for free slits: reciprocity unavailable
    CHECK(!m.reciprocity_gap.has_value());
}

TEST_CASE("monotonicity, subadditivity, overflowing on seeded instances") {
    std::uint64_t seed = 20260810;
    int checked = 0;
    for (int inst = 0; inst < 50; ++inst) {
        std::uint64_t s = splitmix64(seed + inst);
        auto pick = [&](int lo, int hi) {
            s = splitmix64(s);
            return lo + int(s % (hi - lo + 1));
        };
        int W = pick(8, 16), H = pick(8, 16);  // sixteenths
        SlitDomain dom = build_rectangle(Dyadic(W, 4), Dyadic(H, 4));
        int a0 = pick(0, W - 2);
        int a1 = pick(a0 + 1, W - 1);
        int b0 = pick(0, a0);
        int b1 = pick(a1, W);
        int f0 = pick(0, W - 1), f1 = pick(f0 + 1, W);
        auto bottom_piece = [&](int u, int v) {
            return BoundaryPiece{FeatureKind::outer_edge, 0, Side::pos, 0, Dyadic(u, 4), Dyadic(v, 4)};
        };
        auto top_piece = [&](int u, int v) {
            return BoundaryPiece{FeatureKind::outer_edge, 2, Side::neg, 0, Dyadic(u, 4), Dyadic(v, 4)};
        };
        BoundarySet e(&dom, {bottom_piece(a0, a1)});
        BoundarySet e2(&dom, {bottom_piece(b0, b1)});
        BoundarySet f(&dom, {top_piece(f0, f1)});
        GridOptions opt;
        opt.conjugate = false;
        Dyadic h(1, 6);
        ModulusResult small = grid_modulus(dom, e, f, h, opt);
        ModulusResult large = grid_modulus(dom, e2, f, h, opt);
        // monotonicity: enlarging e never decreases the modulus
        CHECK(large.extrapolated >=
              small.extrapolated - 2 * (small.error_bar + large.error_bar) - 1e-9);

        // subadditivity: split f at an interior grid point
        if (f1 - f0 >= 2) {
            int fm = pick(f0 + 1, f1 - 1);
            BoundarySet fa(&dom, {top_piece(f0, fm)});
            BoundarySet fb(&dom, {top_piece(fm, f1)});
            ModulusResult ma = grid_modulus(dom, e, fa, h, opt);
            ModulusResult mb = grid_modulus(dom, e, fb, h, opt);
            CHECK(small.extrapolated <=
                  ma.extrapolated + mb.extrapolated +
                      2 * (small.error_bar + ma.error_bar + mb.error_bar) + 1e-9);
            ++checked;
        }

        // overflowing: extending the rectangle sideways only lengthens the
        // left-right curves, so the side-to-side modulus cannot increase
        if (inst % 5 == 0) {
            SlitDomain wide = build_rectangle(Dyadic(W + 8, 4), Dyadic(H, 4));
            BoundarySet L1(&dom, {BoundaryPiece{FeatureKind::outer_edge, 3, Side::pos, 0,
                                                Dyadic(0), Dyadic(H, 4)}});
            BoundarySet R1(&dom, {BoundaryPiece{FeatureKind::outer_edge, 1, Side::neg, 0,
                                                Dyadic(0), Dyadic(H, 4)}});
            BoundarySet L2(&wide, {BoundaryPiece{FeatureKind::outer_edge, 3, Side::pos, 0,
                                                 Dyadic(0), Dyadic(H, 4)}});
            BoundarySet R2(&wide, {BoundaryPiece{FeatureKind::outer_edge, 1, Side::neg, 0,
                                                 Dyadic(0), Dyadic(H, 4)}});
            ModulusResult orig = grid_modulus(dom, L1, R1, h, opt);
            ModulusResult ext = grid_modulus(wide, L2, R2, h, opt);
            CHECK(ext.extrapolated <=
                  orig.extrapolated + 2 * (orig.error_bar + ext.error_bar) + 1e-9);
        }
    }
    CHECK(checked > 20);
}

TEST_CASE("reciprocity on convex quadrilaterals") {
    SlitDomain r = build_rectangle(Dyadic(3, 1), Dyadic(1));
    BoundarySet e(&r, {BoundaryPiece{FeatureKind::outer_edge, 0, Side::pos, 0, Dyadic(1, 2), Dyadic(5, 2)}});
    BoundarySet f(&r, {BoundaryPiece{FeatureKind::outer_edge, 2, Side::neg, 0, Dyadic(1, 1), Dyadic(1)}});
    ModulusResult m = grid_modulus(r, e, f, Dyadic(1, 8));
    REQUIRE(m.reciprocity_gap.has_value());
    CHECK(*m.reciprocity_gap < 0.02);
}

TEST_CASE("comb family (E_k, F_k) modulus stays under the reldist bound") {
    SlitDomain comb = build_comb(2);
    GridOptions opt;
    opt.conjugate = false;
    for (int k = 1; k <= 2; ++k) {
        CombSets s = comb_sets(comb, k);
        ModulusResult m = grid_modulus(comb, s.E, s.F, Dyadic(1, 7), opt);
        INFO("k=" << k << " mod=" << m.extrapolated << " +- " << m.error_bar);
        CHECK(m.extrapolated + m.error_bar < reldist_bound_from_delta(1.0));
        CHECK(m.extrapolated > 0.1);
    }
}
