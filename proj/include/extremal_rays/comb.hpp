#pragma once

#include <vector>

#include "slit_domain.hpp"

namespace extremal_rays {

// The comb: the unit square minus, for each level k <= k_max, the 2^k + 1
// vertical teeth {1/2^k + j/2^{2k}} x [1/2^k, 1]. Teeth of adjacent levels
// share the abscissae 1/2^k; the SlitDomain stores those merged, CombSpec
// keeps the raw per-(k, j) list.
struct CombSpec {
    int k_max;
    struct Tooth {
        int k, j;
        Dyadic x, foot;  // tooth at {x} x [foot, 1]
    };
    std::vector<Tooth> teeth;

    explicit CombSpec(int k_max_) : k_max(k_max_) {
        if (k_max < 1) throw invalid_parameter("CombSpec: k_max >= 1 required");
        for (int k = 1; k <= k_max; ++k)
            for (int j = 0; j <= (1 << k); ++j)
                teeth.push_back(Tooth{k, j, Dyadic(1, k) + Dyadic(j, 2 * k), Dyadic(1, k)});
    }

    int raw_count() const { return (int)teeth.size(); }
};

inline SlitDomain build_comb(int k_max) {
    CombSpec spec(k_max);
    std::vector<DyPoint> outer = {
        {Dyadic(0), Dyadic(0)}, {Dyadic(1), Dyadic(0)}, {Dyadic(1), Dyadic(1)}, {Dyadic(0), Dyadic(1)}};
    std::vector<Slit> slits;
    for (const auto& t : spec.teeth)
        slits.push_back(Slit{{t.x, t.foot}, {t.x, Dyadic(1)}, true, false});
    return SlitDomain(std::move(outer), std::move(slits));
}

// The boundary families of one comb level. F_k is the bottom-edge interval
// [1/2^k, 2/2^k]; E_k is the level-k teeth (both flanks, from the level's
// foot height up) plus the top edge over F_k; primed sets are the middle
// halves, F_k^1/F_k^2 and E_k^1/E_k^2 the outer quarters.
struct CombSets {
    BoundarySet E, F, Ep, Fp, E1, E2, F1, F2;
    Dyadic f_lo, f_hi, fp_lo, fp_hi;  // F_k and F_k' interval endpoints
};

namespace detail {
// pieces of "teeth of level k with abscissa in [x0, x1] plus top edge over
// [x0, x1]" for the merged comb domain; endpoint teeth optionally excluded
// (the E_k^i quarters do not own the teeth they share with E_k')
inline std::vector<BoundaryPiece> comb_e_pieces(const SlitDomain& dom, int k, Dyadic x0, Dyadic x1,
                                                bool incl_lo = true, bool incl_hi = true) {
    std::vector<BoundaryPiece> pieces;
    Dyadic foot(1, k), top(1);
    auto in_range = [&](Dyadic x) {
        if (x < x0 || x > x1) return false;
        if (!incl_lo && x == x0) return false;
        if (!incl_hi && x == x1) return false;
        return true;
    };
    for (int i = 0; i < (int)dom.slits().size(); ++i) {
        const Slit& s = dom.slits()[i];
        if (!s.vertical || !in_range(s.line())) continue;
        // level-k teeth live on the 2^{-2k} grid inside [1/2^k, 2/2^k]
        if (!divides(Dyadic(1, 2 * k), s.line() - Dyadic(1, k))) continue;
        if (s.line() < Dyadic(1, k) || s.line() > Dyadic(1, k - 1)) continue;
        if (s.edge_resident) {
            // the k=1 tooth at x=1 lies on the right outer edge: expose it as
            // the edge piece y in [foot, 1]
            for (int e = 0; e < dom.edge_count(); ++e) {
                if (dom.edge_horizontal(e)) continue;
                if (dom.edge_start(e).x == s.line())
                    pieces.push_back(BoundaryPiece{FeatureKind::outer_edge, e,
                                                   dom.edge_interior_side(e), 0, foot, top});
            }
            continue;
        }
        pieces.push_back(BoundaryPiece{FeatureKind::slit_side, i, Side::neg, 0, foot, top});
        pieces.push_back(BoundaryPiece{FeatureKind::slit_side, i, Side::pos, 0, foot, top});
        if (s.lo() == foot)
            pieces.push_back(BoundaryPiece{FeatureKind::slit_tip, i, Side::neg, 0, foot, foot});
    }
    // top edge of the unit square is edge index 2 ((1,1) -> (0,1))
    pieces.push_back(BoundaryPiece{FeatureKind::outer_edge, 2, Side::neg, 0, x0, x1});
    return pieces;
}
}  // namespace detail

inline CombSets comb_sets(const SlitDomain& comb, int k) {
    if (k < 1) throw invalid_parameter("comb_sets: k >= 1 required");
    Dyadic f_lo(1, k), f_hi(1, k - 1);
    // the j=1 tooth abscissa 1/2^k + 1/2^{2k} exists only for levels the comb
    // actually carries
    bool level_present = false;
    for (const auto& s : comb.slits())
        if (s.vertical && s.line() == f_lo + Dyadic(1, 2 * k)) level_present = true;
    if (!level_present) throw invalid_parameter("comb_sets: k out of range for this comb");
    Dyadic quarter(1, k + 2);  // |F_k|/4
    Dyadic fp_lo = f_lo + quarter, fp_hi = f_hi - quarter;
    CombSets out;
    out.f_lo = f_lo;
    out.f_hi = f_hi;
    out.fp_lo = fp_lo;
    out.fp_hi = fp_hi;
    auto bottom = [&](Dyadic a, Dyadic b) {
        return BoundarySet(&comb, {BoundaryPiece{FeatureKind::outer_edge, 0, Side::pos, 0, a, b}});
    };
    out.F = bottom(f_lo, f_hi);
    out.Fp = bottom(fp_lo, fp_hi);
    out.F1 = bottom(f_lo, fp_lo);
    out.F2 = bottom(fp_hi, f_hi);
    out.E = BoundarySet(&comb, detail::comb_e_pieces(comb, k, f_lo, f_hi));
    out.Ep = BoundarySet(&comb, detail::comb_e_pieces(comb, k, fp_lo, fp_hi));
    out.E1 = BoundarySet(&comb, detail::comb_e_pieces(comb, k, f_lo, fp_lo, true, false));
    out.E2 = BoundarySet(&comb, detail::comb_e_pieces(comb, k, fp_hi, f_hi, false, true));
    return out;
}

}  // namespace extremal_rays
