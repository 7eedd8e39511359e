#include <catch2/catch_amalgamated.hpp>

#include <extremal_rays/comb.hpp>
#include <extremal_rays/slit_domain.hpp>

using namespace extremal_rays;

TEST_CASE("build_rectangle") {
    SlitDomain sq = build_rectangle(Dyadic(1), Dyadic(1));
    CHECK(sq.area() == 1.0);
    SlitDomain r = build_rectangle(Dyadic(2), Dyadic(1));
    CHECK(r.area() == 2.0);
    CHECK_THROWS_AS(build_rectangle(Dyadic(1), Dyadic(0)), invalid_parameter);
}

TEST_CASE("build_slit_rectangle geometry") {
    SlitDomain dn = build_slit_rectangle(Dyadic(1), Dyadic(1), Dyadic(1, 1), 4);
    CHECK(dn.slits().size() == 5);
    CHECK(dn.area() == 1.0);
    int edge_resident = 0;
    for (const auto& s : dn.slits())
        if (s.edge_resident) ++edge_resident;
    CHECK(edge_resident == 2);

    SlitDomain d1 = build_slit_rectangle(Dyadic(1), Dyadic(1), Dyadic(1, 1), 1);
    CHECK(d1.slits().size() == 2);
    for (const auto& s : d1.slits()) CHECK(s.edge_resident);

    CHECK_THROWS_AS(build_slit_rectangle(Dyadic(1), Dyadic(1), Dyadic(2), 4), invalid_parameter);
}

TEST_CASE("contains") {
    SlitDomain sq = build_rectangle(Dyadic(1), Dyadic(1));
    CHECK(contains(sq, {0.5, 0.5}));
    CHECK(!contains(sq, {1.5, 0.5}));
    CHECK(!contains(sq, {0.5, -0.1}));

    SlitDomain dn = build_slit_rectangle(Dyadic(1), Dyadic(1), Dyadic(1, 1), 4);
    // (0.25, 0.75) lies on the slit at x_1 = 1/4
    CHECK(!contains(dn, {0.25, 0.75}));
    CHECK(contains(dn, {0.25, 0.25}));
    CHECK(contains(dn, {0.3, 0.75}));
}

TEST_CASE("polycurve rejects transversal slit crossings") {
    SlitDomain dn = build_slit_rectangle(Dyadic(1), Dyadic(1), Dyadic(1, 1), 4);
    CHECK_THROWS_AS(PolyCurve(dn, {{0.2, 0.75}, {0.3, 0.75}}), invalid_parameter);
    CHECK_NOTHROW(PolyCurve(dn, {{0.2, 0.25}, {0.3, 0.25}}));
    // touching the slit foot (endpoint) is allowed
    CHECK_NOTHROW(PolyCurve(dn, {{0.2, 0.5}, {0.25, 0.5}}));
    CHECK_THROWS_AS(PolyCurve(dn, {{0.2, 0.2}, {0.2, 0.2}}), invalid_parameter);
}

TEST_CASE("prime-end cycle of the unit square") {
    SlitDomain sq = build_rectangle(Dyadic(1), Dyadic(1));
    const PrimeEndCycle& cyc = sq.cycle();
    CHECK(cyc.total_length() == Catch::Approx(4.0));
    CHECK(cyc.segs().size() == 4);
}

TEST_CASE("prime-end cycle walks comb teeth") {
    SlitDomain comb = build_comb(1);
    const PrimeEndCycle& cyc = comb.cycle();
    // perimeter 4 plus both flanks of the interior teeth at 1/2 and 3/4
    // (the x=1 tooth is edge-resident)
    CHECK(cyc.total_length() == Catch::Approx(4.0 + 2 * (0.5 + 0.5)));
    // tips present
    int tips = 0;
    for (const auto& s : cyc.segs())
        if (s.kind == FeatureKind::slit_tip) ++tips;
    CHECK(tips == 2);
}

TEST_CASE("boundary_complement on the unit square") {
    SlitDomain sq = build_rectangle(Dyadic(1), Dyadic(1));
    BoundarySet bottom(&sq, {BoundaryPiece{FeatureKind::outer_edge, 0, Side::pos, 0, Dyadic(0), Dyadic(1)}});
    BoundarySet top(&sq, {BoundaryPiece{FeatureKind::outer_edge, 2, Side::neg, 0, Dyadic(0), Dyadic(1)}});
    auto comps = boundary_complement(sq, bottom, top);
    REQUIRE(comps.size() == 2);
    // counterclockwise starting after e: right edge first, then left edge
    REQUIRE(comps[0].pieces().size() == 1);
    CHECK(comps[0].pieces()[0].index == 1);
    REQUIRE(comps[1].pieces().size() == 1);
    CHECK(comps[1].pieces()[0].index == 3);

    CHECK_THROWS_AS(boundary_complement(sq, bottom, bottom), invalid_parameter);
}

TEST_CASE("boundary_complement splits the comb window boundary into E'' and F''") {
    // rectangle F_k x (0,1) for k = 2 with the level-2 teeth: the complement
    // of (F_k, E_k) must be the two low vertical edge pieces
    Dyadic f_lo(1, 2), f_hi(1, 1), foot(1, 2);
    std::vector<DyPoint> outer = {{f_lo, Dyadic(0)}, {f_hi, Dyadic(0)}, {f_hi, Dyadic(1)}, {f_lo, Dyadic(1)}};
    std::vector<Slit> slits;
    for (int j = 0; j <= 4; ++j) {
        Dyadic x = f_lo + Dyadic(j, 4);
        slits.push_back(Slit{{x, foot}, {x, Dyadic(1)}, true, false});
    }
    SlitDomain rect(std::move(outer), std::move(slits));
    std::vector<BoundaryPiece> epieces;
    for (int i = 0; i < (int)rect.slits().size(); ++i) {
        const Slit& s = rect.slits()[i];
        if (s.edge_resident) {
            for (int e2 = 0; e2 < rect.edge_count(); ++e2)
                if (!rect.edge_horizontal(e2) && rect.edge_start(e2).x == s.line())
                    epieces.push_back(BoundaryPiece{FeatureKind::outer_edge, e2,
                                                    rect.edge_interior_side(e2), 0, foot, Dyadic(1)});
            continue;
        }
        epieces.push_back(BoundaryPiece{FeatureKind::slit_side, i, Side::neg, 0, foot, Dyadic(1)});
        epieces.push_back(BoundaryPiece{FeatureKind::slit_side, i, Side::pos, 0, foot, Dyadic(1)});
        epieces.push_back(BoundaryPiece{FeatureKind::slit_tip, i, Side::neg, 0, foot, foot});
    }
    epieces.push_back(BoundaryPiece{FeatureKind::outer_edge, 2, Side::neg, 0, f_lo, f_hi});
    BoundarySet E(&rect, std::move(epieces));
    BoundarySet F(&rect, {BoundaryPiece{FeatureKind::outer_edge, 0, Side::pos, 0, f_lo, f_hi}});
    auto comps = boundary_complement(rect, F, E);
    std::vector<BoundarySet> live;
    for (auto& c : comps)
        if (!c.empty()) live.push_back(c);
    REQUIRE(live.size() == 2);
    for (const auto& comp : live) {
        double len = 0;
        for (const auto& p : comp.pieces()) len += p.length().value();
        CHECK(len == Catch::Approx(foot.value()));
    }
}

TEST_CASE("squeeze scales y and composes exactly") {
    SlitDomain comb = build_comb(2);
    SlitDomain half = squeeze(comb, Dyadic(1, 1));
    CHECK(half.max_y() == Dyadic(1, 1));
    CHECK(half.area() == Catch::Approx(0.5));
    SlitDomain q1 = squeeze(half, Dyadic(1, 1));
    SlitDomain q2 = squeeze(comb, Dyadic(1, 2));
    REQUIRE(q1.slits().size() == q2.slits().size());
    for (size_t i = 0; i < q1.slits().size(); ++i) {
        CHECK(q1.slits()[i].a == q2.slits()[i].a);
        CHECK(q1.slits()[i].b == q2.slits()[i].b);
    }
    CHECK_THROWS_AS(squeeze(comb, Dyadic(0)), invalid_parameter);
}
