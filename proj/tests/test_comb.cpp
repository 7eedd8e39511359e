#include <catch2/catch_amalgamated.hpp>

#include <extremal_rays/comb.hpp>

using namespace extremal_rays;

TEST_CASE("comb spec raw tooth counts") {
    CHECK(CombSpec(1).raw_count() == 3);
    CHECK(CombSpec(3).raw_count() == 3 + 5 + 9);
}

TEST_CASE("build_comb k_max=1") {
    SlitDomain comb = build_comb(1);
    CHECK(comb.slits().size() == 3);  // x = 1/2, 3/4, 1 with feet at 1/2
    CHECK(comb.area() == 1.0);
    for (const auto& s : comb.slits()) {
        CHECK(s.vertical);
        CHECK(s.hi() == Dyadic(1));
    }
    CHECK_THROWS_AS(build_comb(0), invalid_parameter);
}

TEST_CASE("build_comb merges shared abscissae across levels") {
    SlitDomain comb = build_comb(3);
    // raw 17 teeth, but x=1/2 (levels 1,2) and x=1/4 (levels 2,3) merge
    CHECK(comb.slits().size() == 15);
    CHECK(comb.area() == 1.0);
    // the merged slit at 1/2 runs from the deeper foot 1/4
    bool found = false;
    for (const auto& s : comb.slits())
        if (s.line() == Dyadic(1, 1)) {
            found = true;
            CHECK(s.lo() == Dyadic(1, 2));
        }
    CHECK(found);
}

TEST_CASE("comb point membership matches tooth positions") {
    SlitDomain comb = build_comb(2);
    CHECK(!contains(comb, {0.25, 0.5}));    // on the level-2 tooth at 1/4
    CHECK(contains(comb, {0.25, 0.2}));     // below its foot
    CHECK(!contains(comb, {0.3125, 0.9}));  // tooth at 5/16
    CHECK(contains(comb, {0.3, 0.9}));
}

TEST_CASE("comb_sets intervals") {
    SlitDomain comb = build_comb(3);
    CombSets s3 = comb_sets(comb, 3);
    CHECK(s3.f_lo == Dyadic(1, 3));
    CHECK(s3.f_hi == Dyadic(1, 2));
    CHECK(s3.fp_lo == Dyadic(5, 5));  // 5/32
    CHECK(s3.fp_hi == Dyadic(7, 5));  // 7/32

    CombSets s2 = comb_sets(comb, 2);
    CHECK(s2.fp_lo == Dyadic(5, 4));  // F_2^1 = (1/4, 5/16)
    CHECK_THROWS_AS(comb_sets(comb, 9), invalid_parameter);
}

TEST_CASE("comb E_k piece structure") {
    SlitDomain comb = build_comb(2);
    CombSets s = comb_sets(comb, 2);
    // E_2: 5 teeth (both flanks) + top edge piece; the merged tooth at 1/2
    // has foot 1/4 so every level-2 flank piece starts at 1/4
    int sides = 0, tips = 0, edges = 0;
    for (const auto& p : s.E.pieces()) {
        if (p.kind == FeatureKind::slit_side) {
            ++sides;
            CHECK(p.t0 == Dyadic(1, 2));
            CHECK(p.t1 == Dyadic(1));
        } else if (p.kind == FeatureKind::slit_tip) {
            ++tips;
        } else {
            ++edges;
        }
    }
    CHECK(sides == 10);
    CHECK(tips == 5);
    CHECK(edges == 1);
}

TEST_CASE("relative distance of (E_k, F_k) is exactly one") {
    SlitDomain comb = build_comb(3);
    for (int k = 1; k <= 3; ++k) {
        CombSets s = comb_sets(comb, k);
        double dist = s.E.distance_to(s.F);
        double mindiam = std::min(s.E.diameter(), s.F.diameter());
        CHECK(dist == std::ldexp(1.0, -k));
        CHECK(mindiam == std::ldexp(1.0, -k));
        CHECK(dist / mindiam == 1.0);
    }
}

TEST_CASE("F_k pairwise disjoint and accumulating at 0") {
    SlitDomain comb = build_comb(4);
    for (int k = 1; k < 4; ++k) {
        CombSets a = comb_sets(comb, k);
        CombSets b = comb_sets(comb, k + 1);
        CHECK(b.f_hi == a.f_lo);  // touch at endpoints only
        CHECK(!a.F.overlaps(b.F));
    }
}

TEST_CASE("every level-k tooth foots on 1/2^k and reaches the top") {
    for (int kmax = 1; kmax <= 4; ++kmax) {
        CombSpec spec(kmax);
        for (const auto& t : spec.teeth) {
            CHECK(t.foot == Dyadic(1, t.k));
            CHECK(t.x >= Dyadic(1, t.k));
            CHECK(t.x <= Dyadic(1, t.k - 1));
        }
    }
}
