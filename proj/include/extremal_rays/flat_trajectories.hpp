#pragma once

#include <algorithm>
#include <vector>

#include "slit_domain.hpp"

namespace extremal_rays {

// Reference to the boundary feature an endpoint of a vertical leaf lies on.
struct BoundaryPointRef {
    FeatureKind kind = FeatureKind::outer_edge;
    int index = 0;
    Side side = Side::neg;  // for horizontal slits: which flank the leaf touches
};

// One maximal open vertical segment of a line Re = x inside the domain; the
// flat realization of a vertical trajectory.
struct FlatLeaf {
    double x = 0;
    double y_lo = 0, y_hi = 0;
    BoundaryPointRef bottom, top;
    double length() const { return y_hi - y_lo; }
};

// Vertical strip of the flat strip decomposition: over the abscissa interval
// (x_lo, x_hi) the leaf bounds and endpoint features are constant.
struct FlatStrip {
    Dyadic x_lo, x_hi;
    Dyadic y_lo, y_hi;
    BoundaryPointRef bottom, top;
    double width() const { return (x_hi - x_lo).value(); }
    double leaf_length() const { return (y_hi - y_lo).value(); }
};

namespace detail {

struct HorizontalFeature {
    Dyadic y;
    Dyadic x_lo, x_hi;
    bool is_slit;
    int index;  // edge or slit index
};

inline std::vector<HorizontalFeature> horizontal_features(const SlitDomain& dom) {
    std::vector<HorizontalFeature> out;
    for (int e = 0; e < dom.edge_count(); ++e) {
        if (!dom.edge_horizontal(e)) continue;
        DyPoint a = dom.edge_start(e), b = dom.edge_end(e);
        out.push_back({a.y, std::min(a.x, b.x), std::max(a.x, b.x), false, e});
    }
    for (int s = 0; s < (int)dom.slits().size(); ++s) {
        const Slit& sl = dom.slits()[s];
        if (sl.vertical || sl.edge_resident) continue;
        out.push_back({sl.line(), sl.lo(), sl.hi(), true, s});
    }
    return out;
}

// y-sorted crossings of the open vertical line Re = x (x not on any vertical
// feature) with the horizontal features; consecutive pairs bound the leaves
inline std::vector<FlatLeaf> leaves_at(const SlitDomain& dom, Dyadic x,
                                       const std::vector<HorizontalFeature>& feats) {
    struct Hit {
        Dyadic y;
        bool is_slit;
        int index;
    };
    std::vector<Hit> hits;
    for (const auto& f : feats)
        if (x > f.x_lo && x < f.x_hi) hits.push_back({f.y, f.is_slit, f.index});
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.y < b.y; });
    std::vector<FlatLeaf> out;
    double xd = x.value();
    for (size_t i = 0; i + 1 < hits.size(); ++i) {
        Point mid{xd, 0.5 * (hits[i].y.value() + hits[i + 1].y.value())};
        // polygon-only test: a vertical slit through this abscissa is handled
        // by the splitting pass in vertical_through
        if (!dom.contains_ignoring_slits(mid)) continue;
        FlatLeaf leaf;
        leaf.x = xd;
        leaf.y_lo = hits[i].y.value();
        leaf.y_hi = hits[i + 1].y.value();
        leaf.bottom = {hits[i].is_slit ? FeatureKind::slit_side : FeatureKind::outer_edge,
                       hits[i].index, Side::pos};  // leaf sits above: the slit's upper flank
        leaf.top = {hits[i + 1].is_slit ? FeatureKind::slit_side : FeatureKind::outer_edge,
                    hits[i + 1].index, Side::neg};
        out.push_back(leaf);
    }
    return out;
}

inline std::vector<Dyadic> event_abscissae(const SlitDomain& dom) {
    std::vector<Dyadic> xs;
    for (const auto& p : dom.outer()) xs.push_back(p.x);
    for (const auto& s : dom.slits()) {
        if (s.edge_resident) continue;
        if (s.vertical) xs.push_back(s.line());
        else {
            xs.push_back(s.lo());
            xs.push_back(s.hi());
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

}  // namespace detail

// Maximal open vertical segments of the line Re = x inside the domain, with
// Euclidean lengths; vertical slits on the line split segments.
inline std::vector<FlatLeaf> vertical_through(const SlitDomain& dom, Dyadic x) {
    auto feats = detail::horizontal_features(dom);
    // vertical slits at this exact abscissa act as extra horizontal cuts at
    // their endpoints... they remove their closed y-interval entirely.
    std::vector<FlatLeaf> base = detail::leaves_at(dom, x, feats);
    for (int si = 0; si < (int)dom.slits().size(); ++si) {
        const Slit& s = dom.slits()[si];
        if (!s.vertical || s.edge_resident || !(s.line() == x)) continue;
        std::vector<FlatLeaf> next;
        for (const auto& leaf : base) {
            double lo = s.lo().value(), hi = s.hi().value();
            if (hi <= leaf.y_lo || lo >= leaf.y_hi) {
                next.push_back(leaf);
                continue;
            }
            if (lo > leaf.y_lo) {
                FlatLeaf below = leaf;
                below.y_hi = lo;
                below.top = {FeatureKind::slit_tip, si, Side::neg};
                next.push_back(below);
            }
            if (hi < leaf.y_hi) {
                FlatLeaf above = leaf;
                above.y_lo = hi;
                above.bottom = {FeatureKind::slit_tip, si, Side::neg};
                next.push_back(above);
            }
        }
        base = std::move(next);
    }
    return base;
}

// Full strip decomposition of a flat domain: between consecutive event
// abscissae the leaf structure is constant.
inline std::vector<FlatStrip> flat_strips(const SlitDomain& dom) {
    auto xs = detail::event_abscissae(dom);
    auto feats = detail::horizontal_features(dom);
    std::vector<FlatStrip> out;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        Dyadic mid = (xs[i] + xs[i + 1]) * Dyadic(1, 1);
        auto leaves = detail::leaves_at(dom, mid, feats);
        for (const auto& leaf : leaves) {
            FlatStrip s;
            s.x_lo = xs[i];
            s.x_hi = xs[i + 1];
            // leaf bounds at the midpoint are dyadic feature lines
            for (const auto& f : feats) {
                if (f.y.value() == leaf.y_lo) s.y_lo = f.y;
                if (f.y.value() == leaf.y_hi) s.y_hi = f.y;
            }
            s.bottom = leaf.bottom;
            s.top = leaf.top;
            out.push_back(s);
        }
    }
    return out;
}

// Width of a curve: per strip, the Lebesgue measure of the abscissa
// projection of the curve's intersection with the strip, summed over strips.
inline double width(const SlitDomain& dom, const PolyCurve& curve) {
    auto strips = flat_strips(dom);
    double total = 0;
    for (const auto& s : strips) {
        double X0 = s.x_lo.value(), X1 = s.x_hi.value();
        double Y0 = s.y_lo.value(), Y1 = s.y_hi.value();
        std::vector<std::pair<double, double>> intervals;
        const auto& v = curve.vertices();
        for (size_t i = 0; i + 1 < v.size(); ++i) {
            // Liang-Barsky clip of the segment to the strip rectangle
            double x0 = v[i].x, y0 = v[i].y, dx = v[i + 1].x - x0, dy = v[i + 1].y - y0;
            double t0 = 0, t1 = 1;
            auto clip = [&](double p, double q) {
                if (p == 0) return q >= 0;
                double r = q / p;
                if (p < 0) {
                    if (r > t1) return false;
                    if (r > t0) t0 = r;
                } else {
                    if (r < t0) return false;
                    if (r < t1) t1 = r;
                }
                return true;
            };
            if (!clip(-dx, x0 - X0) || !clip(dx, X1 - x0) || !clip(-dy, y0 - Y0) ||
                !clip(dy, Y1 - y0))
                continue;
            if (t1 <= t0) continue;
            double xa = x0 + t0 * dx, xb = x0 + t1 * dx;
            intervals.push_back({std::min(xa, xb), std::max(xa, xb)});
        }
        if (intervals.empty()) continue;
        std::sort(intervals.begin(), intervals.end());
        double cur_lo = intervals[0].first, cur_hi = intervals[0].second;
        for (size_t i = 1; i < intervals.size(); ++i) {
            if (intervals[i].first > cur_hi) {
                total += cur_hi - cur_lo;
                cur_lo = intervals[i].first;
                cur_hi = intervals[i].second;
            } else {
                cur_hi = std::max(cur_hi, intervals[i].second);
            }
        }
        total += cur_hi - cur_lo;
    }
    return total;
}

namespace detail {
// Does `set` contain the horizontal-feature point (ref, x-interval)? Returns
// the sub-intervals of [x_lo, x_hi] covered by the set on that feature.
inline std::vector<std::pair<Dyadic, Dyadic>> covered_subintervals(const BoundarySet& set,
                                                                   const BoundaryPointRef& ref,
                                                                   Dyadic x_lo, Dyadic x_hi) {
    std::vector<std::pair<Dyadic, Dyadic>> out;
    for (const auto& p : set.pieces()) {
        if (p.kind != ref.kind || p.index != ref.index) continue;
        if (p.kind == FeatureKind::slit_side && p.side != ref.side) continue;
        Dyadic a = std::max(p.t0, x_lo), b = std::min(p.t1, x_hi);
        if (a < b) out.push_back({a, b});
    }
    return out;
}
}  // namespace detail

// Modulus of the family of vertical trajectories with one endpoint in e and
// the other in f: the exact piecewise integral of dx / l(x) over the
// qualifying abscissae (l is piecewise constant on a slit domain).
inline double vertical_family_modulus(const SlitDomain& dom, const BoundarySet& e,
                                      const BoundarySet& f) {
    if (e.overlaps(f)) throw invalid_parameter("vertical_family_modulus: sets overlap");
    auto strips = flat_strips(dom);
    double total = 0;
    for (const auto& s : strips) {
        double l = s.leaf_length();
        if (l <= 0) continue;
        for (int orient = 0; orient < 2; ++orient) {
            const BoundarySet& bot = orient == 0 ? e : f;
            const BoundarySet& top = orient == 0 ? f : e;
            auto lo_cov = detail::covered_subintervals(bot, s.bottom, s.x_lo, s.x_hi);
            auto hi_cov = detail::covered_subintervals(top, s.top, s.x_lo, s.x_hi);
            for (const auto& [a1, b1] : lo_cov)
                for (const auto& [a2, b2] : hi_cov) {
                    Dyadic a = std::max(a1, a2), b = std::min(b1, b2);
                    if (a < b) total += (b - a).value() / l;
                }
        }
    }
    return total;
}

}  // namespace extremal_rays
