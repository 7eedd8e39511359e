#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <utility>
#include <vector>

#include "dyadic.hpp"
#include "errors.hpp"

namespace extremal_rays {

struct DyPoint {
    Dyadic x, y;
    friend bool operator==(const DyPoint&, const DyPoint&) = default;
};

struct Point {
    double x = 0, y = 0;
};

inline Point shadow(const DyPoint& p) { return {p.x.value(), p.y.value()}; }

// Axis-aligned closed slit segment. Endpoints ordered so that a <= b along
// the segment axis. Slits collinear with an outer edge are flagged
// edge_resident: they refine the boundary labeling but remove nothing.
struct Slit {
    DyPoint a, b;
    bool vertical = true;
    bool edge_resident = false;

    Dyadic line() const { return vertical ? a.x : a.y; }    // fixed coordinate
    Dyadic lo() const { return vertical ? a.y : a.x; }
    Dyadic hi() const { return vertical ? b.y : b.x; }
};

enum class Side { neg, pos };  // neg: smaller fixed-coordinate side (west / south)

enum class FeatureKind { outer_edge, slit_side, slit_tip };

// One sub-segment of the prime-end boundary. For outer edges and slit sides
// [t0, t1] is the parameter interval along the feature axis (x on horizontal
// features, y on vertical ones). Tips have t0 == t1.
struct BoundaryPiece {
    FeatureKind kind = FeatureKind::outer_edge;
    int index = 0;   // outer edge index or slit index
    Side side = Side::neg;
    int tip_end = 0;  // for slit_tip: 0 = lo endpoint, 1 = hi endpoint
    Dyadic t0, t1;

    Dyadic length() const { return t1 - t0; }
};

class BoundarySet;

// Rectilinear simple polygon minus finitely many axis-aligned slits: the flat
// natural-coordinate world where the quadratic differential is dz^2.
// Immutable after construction.
class SlitDomain {
  public:
    SlitDomain(std::vector<DyPoint> outer, std::vector<Slit> slits)
        : outer_(std::move(outer)), slits_(std::move(slits)) {
        validate_polygon();
        normalize_slits();
        validate_slits();
        compute_area();
    }

    const std::vector<DyPoint>& outer() const { return outer_; }
    const std::vector<Slit>& slits() const { return slits_; }
    double area() const { return area_; }
    Dyadic area_exact() const { return area2_ * Dyadic(1, 1); }

    int edge_count() const { return (int)outer_.size(); }
    DyPoint edge_start(int i) const { return outer_[i]; }
    DyPoint edge_end(int i) const { return outer_[(i + 1) % outer_.size()]; }
    bool edge_horizontal(int i) const { return edge_start(i).y == edge_end(i).y; }
    // Interior side of an outer edge (ccw polygon: interior on the left).
    Side edge_interior_side(int i) const {
        DyPoint s = edge_start(i), e = edge_end(i);
        if (edge_horizontal(i)) return e.x > s.x ? Side::pos : Side::neg;  // +x: interior above
        return e.y > s.y ? Side::neg : Side::pos;                          // +y: interior west
    }

    Dyadic min_x() const { return bbox_[0]; }
    Dyadic max_x() const { return bbox_[1]; }
    Dyadic min_y() const { return bbox_[2]; }
    Dyadic max_y() const { return bbox_[3]; }

    bool contains(Point p) const;
    bool contains_ignoring_slits(Point p) const { return point_in_polygon(p); }

    // Prime-end boundary cycle; see PrimeEndCycle below. Throws
    // invalid_parameter if a slit is neither edge-resident nor attached to an
    // outer edge (the cycle of such a domain is not a single circle).
    const class PrimeEndCycle& cycle() const;

    friend SlitDomain squeeze(const SlitDomain& dom, Dyadic eps);

  private:
    void validate_polygon();
    void normalize_slits();
    void validate_slits();
    void compute_area();
    bool point_in_polygon(Point p) const;

    std::vector<DyPoint> outer_;
    std::vector<Slit> slits_;
    Dyadic area2_;  // twice the polygon area, exact
    double area_ = 0;
    Dyadic bbox_[4];
    mutable std::shared_ptr<const class PrimeEndCycle> cycle_;
};

// ---------------------------------------------------------------------------
// Prime-end cycle

// Directed traversal element of the prime-end circle. from/to are parameters
// along the feature axis; from > to happens on backward traversals.
struct CycleSeg {
    FeatureKind kind;
    int index;
    Side side;
    int tip_end;
    Dyadic from, to;
    double s0, s1;  // cumulative arc length along the cycle
};

class PrimeEndCycle {
  public:
    explicit PrimeEndCycle(const SlitDomain& dom);

    const std::vector<CycleSeg>& segs() const { return segs_; }
    double total_length() const { return total_; }

    // Position (arc length in [0, total)) of a boundary point.
    double position(FeatureKind kind, int index, Side side, Dyadic t) const;
    double angle(FeatureKind kind, int index, Side side, Dyadic t) const {
        return 2.0 * std::numbers::pi * position(kind, index, side, t) / total_;
    }

    // Circular intervals [s0, s1) covered by a set's pieces.
    std::vector<std::pair<double, double>> intervals(const BoundarySet& set) const;

  private:
    const SlitDomain* dom_;
    std::vector<CycleSeg> segs_;
    double total_ = 0;
};

// ---------------------------------------------------------------------------
// Boundary sets

// Finite union of prime-end boundary pieces (outer-edge intervals, slit-side
// intervals, slit tips). Pieces of one set must not overlap.
class BoundarySet {
  public:
    BoundarySet() = default;
    BoundarySet(const SlitDomain* dom, std::vector<BoundaryPiece> pieces)
        : dom_(dom), pieces_(std::move(pieces)) {
        validate();
    }

    const SlitDomain& domain() const { return *dom_; }
    const std::vector<BoundaryPiece>& pieces() const { return pieces_; }
    bool empty() const {
        for (const auto& p : pieces_)
            if (p.t1 > p.t0 || p.kind == FeatureKind::slit_tip) return false;
        return true;
    }

    double diameter() const;
    // Euclidean distance to another set (pieces are axis-aligned segments).
    double distance_to(const BoundarySet& other) const;

    bool overlaps(const BoundarySet& other) const;

    // The two endpoints of a piece in the plane.
    static std::pair<Point, Point> piece_endpoints(const SlitDomain& dom, const BoundaryPiece& p);

  private:
    void validate();

    const SlitDomain* dom_ = nullptr;
    std::vector<BoundaryPiece> pieces_;
};

// ---------------------------------------------------------------------------
// Polyline curve in the closed domain. Rejects transversal slit crossings.

class PolyCurve {
  public:
    PolyCurve(const SlitDomain& dom, std::vector<Point> vertices) : vertices_(std::move(vertices)) {
        if (vertices_.size() < 2) throw invalid_parameter("PolyCurve: need at least two vertices");
        for (size_t i = 0; i + 1 < vertices_.size(); ++i) {
            if (vertices_[i].x == vertices_[i + 1].x && vertices_[i].y == vertices_[i + 1].y)
                throw invalid_parameter("PolyCurve: consecutive vertices coincide");
            for (size_t s = 0; s < dom.slits().size(); ++s)
                if (segment_crosses_slit(vertices_[i], vertices_[i + 1], dom.slits()[s]))
                    throw invalid_parameter("PolyCurve: curve crosses a slit interior");
        }
        length_ = 0;
        for (size_t i = 0; i + 1 < vertices_.size(); ++i)
            length_ += std::hypot(vertices_[i + 1].x - vertices_[i].x, vertices_[i + 1].y - vertices_[i].y);
    }

    const std::vector<Point>& vertices() const { return vertices_; }
    double length() const { return length_; }

    static bool segment_crosses_slit(Point a, Point b, const Slit& s);

  private:
    std::vector<Point> vertices_;
    double length_ = 0;
};

// ---------------------------------------------------------------------------
// Builders

inline SlitDomain build_rectangle(Dyadic width, Dyadic height) {
    if (!(width > Dyadic(0)) || !(height > Dyadic(0)))
        throw invalid_parameter("build_rectangle: non-positive dimension");
    std::vector<DyPoint> outer = {
        {Dyadic(0), Dyadic(0)}, {width, Dyadic(0)}, {width, height}, {Dyadic(0), height}};
    return SlitDomain(std::move(outer), {});
}

// D_N of the slit lemma: (0,a)x(0,b) minus vertical slits {a i/N} x [c,b],
// i = 0..N. The i=0 and i=N slits lie on the boundary edges.
inline SlitDomain build_slit_rectangle(Dyadic a, Dyadic b, Dyadic c, int N) {
    if (!(a > Dyadic(0)) || !(b > Dyadic(0)) || !(c > Dyadic(0)) || !(c < b) || N < 1)
        throw invalid_parameter("build_slit_rectangle: need 0 < c < b, a > 0, N >= 1");
    std::vector<DyPoint> outer = {
        {Dyadic(0), Dyadic(0)}, {a, Dyadic(0)}, {a, b}, {Dyadic(0), b}};
    std::vector<Slit> slits;
    for (int i = 0; i <= N; ++i) {
        Dyadic x = div_int(a * Dyadic(i), N);
        slits.push_back(Slit{{x, c}, {x, b}, true, false});
    }
    return SlitDomain(std::move(outer), std::move(slits));
}

inline bool contains(const SlitDomain& dom, Point p) { return dom.contains(p); }

std::vector<BoundarySet> boundary_complement(const SlitDomain& dom, const BoundarySet& e,
                                             const BoundarySet& f);

// ---------------------------------------------------------------------------
// Implementation

inline void SlitDomain::validate_polygon() {
    size_t n = outer_.size();
    if (n < 4) throw invalid_parameter("SlitDomain: outer polygon needs at least 4 vertices");
    Dyadic a2(0);
    for (size_t i = 0; i < n; ++i) {
        const DyPoint& p = outer_[i];
        const DyPoint& q = outer_[(i + 1) % n];
        bool h = p.y == q.y, v = p.x == q.x;
        if (h == v) throw invalid_parameter("SlitDomain: edges must be axis-aligned and nonzero");
        a2 = a2 + (p.x * q.y - q.x * p.y);
    }
    if (!(a2 > Dyadic(0)))
        throw invalid_parameter("SlitDomain: outer polygon must be counterclockwise with positive area");
    area2_ = a2;
    // simplicity: no two non-adjacent edges may intersect
    auto as_seg = [&](size_t i) {
        DyPoint p = outer_[i], q = outer_[(i + 1) % n];
        return std::pair<DyPoint, DyPoint>{p, q};
    };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            auto [p1, q1] = as_seg(i);
            auto [p2, q2] = as_seg(j);
            auto lo = [](Dyadic u, Dyadic v) { return u < v ? u : v; };
            auto hi = [](Dyadic u, Dyadic v) { return u < v ? v : u; };
            bool sep = hi(p1.x, q1.x) < lo(p2.x, q2.x) || hi(p2.x, q2.x) < lo(p1.x, q1.x) ||
                       hi(p1.y, q1.y) < lo(p2.y, q2.y) || hi(p2.y, q2.y) < lo(p1.y, q1.y);
            if (!sep) throw invalid_parameter("SlitDomain: outer polygon is not simple");
        }
    bbox_[0] = bbox_[1] = outer_[0].x;
    bbox_[2] = bbox_[3] = outer_[0].y;
    for (const auto& p : outer_) {
        bbox_[0] = std::min(bbox_[0], p.x);
        bbox_[1] = std::max(bbox_[1], p.x);
        bbox_[2] = std::min(bbox_[2], p.y);
        bbox_[3] = std::max(bbox_[3], p.y);
    }
}

inline void SlitDomain::normalize_slits() {
    for (auto& s : slits_) {
        if (s.a.x == s.b.x && s.a.y == s.b.y) throw invalid_parameter("SlitDomain: degenerate slit");
        if (s.a.x == s.b.x) {
            s.vertical = true;
            if (s.a.y > s.b.y) std::swap(s.a, s.b);
        } else if (s.a.y == s.b.y) {
            s.vertical = false;
            if (s.a.x > s.b.x) std::swap(s.a, s.b);
        } else {
            throw invalid_parameter("SlitDomain: slits must be axis-aligned");
        }
    }
    // merge collinear overlapping slits into maximal segments
    std::sort(slits_.begin(), slits_.end(), [](const Slit& u, const Slit& v) {
        if (u.vertical != v.vertical) return u.vertical < v.vertical;
        if (!(u.line() == v.line())) return u.line() < v.line();
        return u.lo() < v.lo();
    });
    std::vector<Slit> merged;
    for (const auto& s : slits_) {
        if (!merged.empty()) {
            Slit& m = merged.back();
            if (m.vertical == s.vertical && m.line() == s.line() && !(s.lo() > m.hi())) {
                if (s.hi() > m.hi()) (m.vertical ? m.b.y : m.b.x) = s.hi();
                continue;
            }
        }
        merged.push_back(s);
    }
    slits_ = std::move(merged);
    // flag slits lying along an outer edge
    for (auto& s : slits_) {
        for (int i = 0; i < edge_count(); ++i) {
            DyPoint p = edge_start(i), q = edge_end(i);
            if (s.vertical && p.x == q.x && p.x == s.line()) {
                Dyadic lo = std::min(p.y, q.y), hi = std::max(p.y, q.y);
                if (!(s.lo() < lo) && !(s.hi() > hi)) s.edge_resident = true;
            } else if (!s.vertical && p.y == q.y && p.y == s.line()) {
                Dyadic lo = std::min(p.x, q.x), hi = std::max(p.x, q.x);
                if (!(s.lo() < lo) && !(s.hi() > hi)) s.edge_resident = true;
            }
        }
    }
}

inline void SlitDomain::validate_slits() {
    for (size_t i = 0; i < slits_.size(); ++i)
        for (size_t j = i + 1; j < slits_.size(); ++j) {
            const Slit &u = slits_[i], &v = slits_[j];
            if (u.vertical == v.vertical) {
                if (u.vertical) {
                    if (u.line() == v.line() && u.lo() < v.hi() && v.lo() < u.hi())
                        throw invalid_parameter("SlitDomain: overlapping collinear slits");
                } else {
                    if (u.line() == v.line() && u.lo() < v.hi() && v.lo() < u.hi())
                        throw invalid_parameter("SlitDomain: overlapping collinear slits");
                }
            } else {
                const Slit& vert = u.vertical ? u : v;
                const Slit& hor = u.vertical ? v : u;
                bool x_inside = vert.line() > hor.lo() && vert.line() < hor.hi();
                bool y_inside = hor.line() > vert.lo() && hor.line() < vert.hi();
                if (x_inside && y_inside)
                    throw invalid_parameter("SlitDomain: slits cross transversally");
            }
        }
    for (const auto& s : slits_) {
        Point m = {(s.a.x.value() + s.b.x.value()) / 2, (s.a.y.value() + s.b.y.value()) / 2};
        Point a = shadow(s.a), b = shadow(s.b);
        auto inside_closed = [&](Point p) {
            // closed polygon membership: interior or on an edge
            if (point_in_polygon(p)) return true;
            for (int i = 0; i < edge_count(); ++i) {
                Point e0 = shadow(edge_start(i)), e1 = shadow(edge_end(i));
                if (e0.x == e1.x) {
                    if (p.x == e0.x && p.y >= std::min(e0.y, e1.y) && p.y <= std::max(e0.y, e1.y))
                        return true;
                } else {
                    if (p.y == e0.y && p.x >= std::min(e0.x, e1.x) && p.x <= std::max(e0.x, e1.x))
                        return true;
                }
            }
            return false;
        };
        if (!inside_closed(a) || !inside_closed(b) || !inside_closed(m))
            throw invalid_parameter("SlitDomain: slit leaves the closed polygon");
    }
}

inline void SlitDomain::compute_area() { area_ = area2_.value() / 2.0; }

inline bool SlitDomain::point_in_polygon(Point p) const {
    // crossing number against horizontal edges, half-open in x
    bool inside = false;
    size_t n = outer_.size();
    for (size_t i = 0; i < n; ++i) {
        Point a = shadow(outer_[i]), b = shadow(outer_[(i + 1) % n]);
        if (a.y == b.y) continue;  // vertical ray crossing uses non-horizontal edges
        double ylo = std::min(a.y, b.y), yhi = std::max(a.y, b.y);
        if (p.y >= ylo && p.y < yhi) {
            double ex = a.x;  // vertical edge
            if (ex > p.x) inside = !inside;
        }
    }
    return inside;
}

inline bool SlitDomain::contains(Point p) const {
    if (!point_in_polygon(p)) return false;
    for (const auto& s : slits_) {
        if (s.edge_resident) continue;
        if (s.vertical) {
            if (p.x == s.line().value() && p.y >= s.lo().value() && p.y <= s.hi().value()) return false;
        } else {
            if (p.y == s.line().value() && p.x >= s.lo().value() && p.x <= s.hi().value()) return false;
        }
    }
    return true;
}

inline PrimeEndCycle::PrimeEndCycle(const SlitDomain& dom) : dom_(&dom) {
    struct Attach {
        int slit;
        Dyadic at;    // position along the edge axis
        int far_end;  // 0: slit's lo endpoint is the far (interior) end
    };
    const auto& slits = dom.slits();
    std::vector<bool> used(slits.size(), false);
    double s = 0;
    auto emit = [&](FeatureKind k, int idx, Side side, int tip, Dyadic from, Dyadic to) {
        double len = std::abs((to - from).value());
        segs_.push_back(CycleSeg{k, idx, side, tip, from, to, s, s + len});
        s += len;
    };
    for (int e = 0; e < dom.edge_count(); ++e) {
        DyPoint p = dom.edge_start(e), q = dom.edge_end(e);
        bool horizontal = dom.edge_horizontal(e);
        Dyadic line = horizontal ? p.y : p.x;
        Dyadic from = horizontal ? p.x : p.y;
        Dyadic to = horizontal ? q.x : q.y;
        bool fwd = to > from;
        // collect slits attached to the interior of this edge
        std::vector<Attach> att;
        for (size_t i = 0; i < slits.size(); ++i) {
            const Slit& sl = slits[i];
            if (sl.edge_resident || sl.vertical == horizontal) continue;
            // perpendicular slit: attached if one endpoint lies on this edge
            Dyadic at = sl.line();
            Dyadic lo = std::min(from, to), hi = std::max(from, to);
            if (!(at > lo) || !(at < hi)) continue;
            if (sl.lo() == line) {
                att.push_back({(int)i, at, 1});  // extends toward hi(): far end = hi endpoint
                used[i] = true;
            } else if (sl.hi() == line) {
                att.push_back({(int)i, at, 0});
                used[i] = true;
            }
        }
        std::sort(att.begin(), att.end(), [&](const Attach& a, const Attach& b) {
            return fwd ? a.at < b.at : a.at > b.at;
        });
        Dyadic cur = from;
        for (const auto& a : att) {
            if (!(a.at == cur)) emit(FeatureKind::outer_edge, e, dom.edge_interior_side(e), 0, cur, a.at);
            const Slit& sl = slits[a.slit];
            Dyadic near = a.far_end == 1 ? sl.lo() : sl.hi();
            Dyadic far = a.far_end == 1 ? sl.hi() : sl.lo();
            // First flank: walking the edge with interior on the left, the slit is
            // entered on the side facing the approach direction.
            Side first, second;
            if (horizontal)
                first = fwd ? Side::neg : Side::pos;
            else
                first = (to > from) ? Side::pos : Side::neg;
            second = first == Side::neg ? Side::pos : Side::neg;
            emit(FeatureKind::slit_side, a.slit, first, 0, near, far);
            emit(FeatureKind::slit_tip, a.slit, first, a.far_end, far, far);
            emit(FeatureKind::slit_side, a.slit, second, 0, far, near);
            cur = a.at;
        }
        if (!(cur == to)) emit(FeatureKind::outer_edge, e, dom.edge_interior_side(e), 0, cur, to);
    }
    for (size_t i = 0; i < slits.size(); ++i)
        if (!slits[i].edge_resident && !used[i])
            throw invalid_parameter(
                "PrimeEndCycle: slit is not attached to an outer edge; prime-end cycle unsupported");
    total_ = s;
}

inline const PrimeEndCycle& SlitDomain::cycle() const {
    if (!cycle_) cycle_ = std::make_shared<PrimeEndCycle>(*this);
    return *cycle_;
}

inline double PrimeEndCycle::position(FeatureKind kind, int index, Side side, Dyadic t) const {
    for (const auto& seg : segs_) {
        if (seg.kind != kind || seg.index != index) continue;
        if (kind == FeatureKind::slit_side && seg.side != side) continue;
        Dyadic lo = std::min(seg.from, seg.to), hi = std::max(seg.from, seg.to);
        if (t < lo || t > hi) continue;
        if (kind == FeatureKind::slit_tip) return seg.s0;
        double off = std::abs((t - seg.from).value());
        return seg.s0 + off;
    }
    throw invalid_parameter("PrimeEndCycle::position: point not on the cycle");
}

inline std::pair<Point, Point> BoundarySet::piece_endpoints(const SlitDomain& dom,
                                                            const BoundaryPiece& p) {
    if (p.kind == FeatureKind::outer_edge) {
        DyPoint s = dom.edge_start(p.index);
        bool horizontal = dom.edge_horizontal(p.index);
        if (horizontal) return {{p.t0.value(), s.y.value()}, {p.t1.value(), s.y.value()}};
        return {{s.x.value(), p.t0.value()}, {s.x.value(), p.t1.value()}};
    }
    const Slit& sl = dom.slits()[p.index];
    if (sl.vertical) return {{sl.line().value(), p.t0.value()}, {sl.line().value(), p.t1.value()}};
    return {{p.t0.value(), sl.line().value()}, {p.t1.value(), sl.line().value()}};
}

inline void BoundarySet::validate() {
    if (!dom_) throw invalid_parameter("BoundarySet: null domain");
    for (const auto& p : pieces_) {
        if (p.t0 > p.t1) throw invalid_parameter("BoundarySet: piece interval reversed");
        if (p.kind == FeatureKind::outer_edge) {
            if (p.index < 0 || p.index >= dom_->edge_count())
                throw invalid_parameter("BoundarySet: bad edge index");
            DyPoint s = dom_->edge_start(p.index), e = dom_->edge_end(p.index);
            bool horizontal = dom_->edge_horizontal(p.index);
            Dyadic lo = horizontal ? std::min(s.x, e.x) : std::min(s.y, e.y);
            Dyadic hi = horizontal ? std::max(s.x, e.x) : std::max(s.y, e.y);
            if (p.t0 < lo || p.t1 > hi)
                throw invalid_parameter("BoundarySet: piece leaves its edge");
        } else {
            if (p.index < 0 || p.index >= (int)dom_->slits().size())
                throw invalid_parameter("BoundarySet: bad slit index");
            const Slit& sl = dom_->slits()[p.index];
            if (p.t0 < sl.lo() || p.t1 > sl.hi())
                throw invalid_parameter("BoundarySet: piece leaves its slit");
        }
    }
    for (size_t i = 0; i < pieces_.size(); ++i)
        for (size_t j = i + 1; j < pieces_.size(); ++j) {
            const auto &a = pieces_[i], &b = pieces_[j];
            if (a.kind != b.kind || a.index != b.index) continue;
            if (a.kind == FeatureKind::slit_side && a.side != b.side) continue;
            if (a.kind == FeatureKind::slit_tip) {
                if (a.tip_end == b.tip_end) throw invalid_parameter("BoundarySet: duplicate tip");
                continue;
            }
            if (a.t0 < b.t1 && b.t0 < a.t1)
                throw invalid_parameter("BoundarySet: overlapping pieces");
        }
}

inline double BoundarySet::diameter() const {
    std::vector<Point> pts;
    for (const auto& p : pieces_) {
        auto [a, b] = piece_endpoints(*dom_, p);
        pts.push_back(a);
        pts.push_back(b);
    }
    double d = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
    return d;
}

namespace detail {
inline double seg_seg_distance(Point a, Point b, Point c, Point d) {
    auto clamp01 = [](double t) { return t < 0 ? 0.0 : (t > 1 ? 1.0 : t); };
    auto point_seg = [&](Point p, Point u, Point v) {
        double vx = v.x - u.x, vy = v.y - u.y;
        double L2 = vx * vx + vy * vy;
        double t = L2 == 0 ? 0 : clamp01(((p.x - u.x) * vx + (p.y - u.y) * vy) / L2);
        return std::hypot(p.x - (u.x + t * vx), p.y - (u.y + t * vy));
    };
    auto orient = [](Point p, Point q, Point r) {
        return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    };
    double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0))) return 0.0;
    return std::min(std::min(point_seg(a, c, d), point_seg(b, c, d)),
                    std::min(point_seg(c, a, b), point_seg(d, a, b)));
}
}  // namespace detail

inline double BoundarySet::distance_to(const BoundarySet& other) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces_) {
        auto [a, b] = piece_endpoints(*dom_, p);
        for (const auto& q : other.pieces_) {
            auto [c, d] = piece_endpoints(*dom_, q);
            best = std::min(best, detail::seg_seg_distance(a, b, c, d));
        }
    }
    return best;
}

inline bool BoundarySet::overlaps(const BoundarySet& other) const {
    for (const auto& a : pieces_)
        for (const auto& b : other.pieces_) {
            if (a.kind != b.kind || a.index != b.index) continue;
            if (a.kind == FeatureKind::slit_side && a.side != b.side) continue;
            if (a.kind == FeatureKind::slit_tip) {
                if (a.tip_end == b.tip_end) return true;
                continue;
            }
            if (a.t0 < b.t1 && b.t0 < a.t1) return true;
        }
    return false;
}

inline std::vector<std::pair<double, double>> PrimeEndCycle::intervals(const BoundarySet& set) const {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : set.pieces()) {
        if (p.kind == FeatureKind::slit_tip) continue;  // zero length
        // a piece may span several cycle segs only if it covers a slit attachment
        // point on an outer edge; emit the overlap with every matching seg
        for (const auto& seg : segs_) {
            if (seg.kind != p.kind || seg.index != p.index) continue;
            if (p.kind == FeatureKind::slit_side && seg.side != p.side) continue;
            Dyadic lo = std::min(seg.from, seg.to), hi = std::max(seg.from, seg.to);
            Dyadic a = std::max(p.t0, lo), b = std::min(p.t1, hi);
            if (!(a < b)) continue;
            bool fwd = seg.to > seg.from;
            double sa = fwd ? seg.s0 + (a - seg.from).value() : seg.s0 + (seg.from - b).value();
            double sb = sa + (b - a).value();
            out.push_back({sa, sb});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<BoundarySet> boundary_complement(const SlitDomain& dom, const BoundarySet& e,
                                                    const BoundarySet& f) {
    if (e.overlaps(f)) throw invalid_parameter("boundary_complement: overlapping sets");
    const PrimeEndCycle& cyc = dom.cycle();
    auto ie = cyc.intervals(e);
    auto iff = cyc.intervals(f);
    std::vector<std::pair<double, double>> covered = ie;
    covered.insert(covered.end(), iff.begin(), iff.end());
    std::sort(covered.begin(), covered.end());
    for (size_t i = 0; i + 1 < covered.size(); ++i)
        if (covered[i + 1].first < covered[i].second - 1e-12)
            throw invalid_parameter("boundary_complement: overlapping sets");
    const double S = cyc.total_length();
    // complement arcs in ccw order starting after the e-interval that is
    // immediately followed by a gap
    std::vector<std::pair<double, double>> gaps;
    for (size_t i = 0; i < covered.size(); ++i) {
        double a = covered[i].second;
        double b = (i + 1 < covered.size()) ? covered[i + 1].first : covered[0].first + S;
        if (b - a > 1e-12) gaps.push_back({a, b});
    }
    if (covered.empty()) gaps.push_back({0, S});
    // rotate so the first gap starts at the end of an e-interval
    size_t first = 0;
    for (size_t g = 0; g < gaps.size(); ++g) {
        for (const auto& iv : ie)
            if (std::abs(gaps[g].first - iv.second) < 1e-12) { first = g; goto found; }
    }
found:
    std::rotate(gaps.begin(), gaps.begin() + first, gaps.end());
    // materialize each gap as a BoundarySet by cutting cycle segs
    std::vector<BoundarySet> comps;
    for (auto [ga, gb] : gaps) {
        std::vector<BoundaryPiece> pieces;
        for (int wrap = 0; wrap < 2; ++wrap) {
            double off = wrap * S;
            for (const auto& seg : cyc.segs()) {
                double s0 = seg.s0 + off, s1 = seg.s1 + off;
                if (seg.kind == FeatureKind::slit_tip) {
                    if (s0 > ga - 1e-12 && s0 < gb + 1e-12)
                        pieces.push_back(BoundaryPiece{seg.kind, seg.index, seg.side, seg.tip_end,
                                                       seg.from, seg.to});
                    continue;
                }
                double a = std::max(s0, ga), b = std::min(s1, gb);
                if (b - a < 1e-12) continue;
                bool fwd = seg.to > seg.from;
                // convert [a,b] back to feature parameters (exact at dyadic cuts)
                auto param_at = [&](double s) {
                    double off_in = s - s0;
                    double t = fwd ? seg.from.value() + off_in : seg.from.value() - off_in;
                    return t;
                };
                double ta = param_at(a), tb = param_at(b);
                double lo = std::min(ta, tb), hi = std::max(ta, tb);
                // snap to the dyadic endpoints of the covering sets when close
                auto snap = [&](double v) {
                    if (std::abs(v - seg.from.value()) < 1e-12) return seg.from;
                    if (std::abs(v - seg.to.value()) < 1e-12) return seg.to;
                    return Dyadic(std::llround(std::ldexp(v, 40)), 40);
                };
                pieces.push_back(BoundaryPiece{seg.kind, seg.index, seg.side, 0, snap(lo), snap(hi)});
            }
        }
        comps.push_back(BoundarySet(&dom, std::move(pieces)));
    }
    return comps;
}

inline bool PolyCurve::segment_crosses_slit(Point a, Point b, const Slit& s) {
    if (s.edge_resident) return false;
    // strict transversal crossing of the open slit interior
    double X0, X1, Y0, Y1;
    if (s.vertical) {
        X0 = X1 = s.line().value();
        Y0 = s.lo().value();
        Y1 = s.hi().value();
        if ((a.x - X0) * (b.x - X0) >= 0) return false;  // both on one side or touching
        double t = (X0 - a.x) / (b.x - a.x);
        double y = a.y + t * (b.y - a.y);
        return y > Y0 && y < Y1;
    }
    Y0 = Y1 = s.line().value();
    X0 = s.lo().value();
    X1 = s.hi().value();
    if ((a.y - Y0) * (b.y - Y0) >= 0) return false;
    double t = (Y0 - a.y) / (b.y - a.y);
    double x = a.x + t * (b.x - a.x);
    return x > X0 && x < X1;
}

inline SlitDomain squeeze(const SlitDomain& dom, Dyadic eps) {
    if (!(eps > Dyadic(0)) || eps > Dyadic(1))
        throw invalid_parameter("squeeze: need 0 < eps <= 1");
    std::vector<DyPoint> outer;
    outer.reserve(dom.outer().size());
    for (const auto& p : dom.outer()) outer.push_back({p.x, p.y * eps});
    std::vector<Slit> slits;
    slits.reserve(dom.slits().size());
    for (const auto& s : dom.slits())
        slits.push_back(Slit{{s.a.x, s.a.y * eps}, {s.b.x, s.b.y * eps}, s.vertical, false});
    return SlitDomain(std::move(outer), std::move(slits));
}

// Transports a boundary set onto the squeezed copy of its domain. Valid
// because squeeze preserves the feature lists and their order.
inline BoundarySet squeeze_set(const BoundarySet& set, Dyadic eps, const SlitDomain& squeezed) {
    std::vector<BoundaryPiece> pieces;
    for (auto p : set.pieces()) {
        bool vertical_feature;
        if (p.kind == FeatureKind::outer_edge)
            vertical_feature = !set.domain().edge_horizontal(p.index);
        else
            vertical_feature = set.domain().slits()[p.index].vertical;
        if (vertical_feature) {
            p.t0 = p.t0 * eps;
            p.t1 = p.t1 * eps;
        }
        pieces.push_back(p);
    }
    return BoundarySet(&squeezed, std::move(pieces));
}

}  // namespace extremal_rays
