#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "flat_trajectories.hpp"
#include "geodesics.hpp"
#include "modulus_analytic.hpp"
#include "qd.hpp"
#include "trace.hpp"

namespace extremal_rays {

enum class LaminationKind { mu, nu, generic };

struct LaminationAtom {
    double a = 0, b = 0;   // endpoint angles, normalized with a <= b in [0, 2pi)
    double weight = 0;     // mu: dx/l (0 for infinite-length leaves); nu: dx
    double dx = 0;         // transversal natural width behind this atom
    double length = 0;     // phi-length of the leaf (lower bound if truncated)
    bool truncated = false;
};

// Finite weighted ensemble of geodesic endpoint pairs approximating a
// measured lamination. Atoms with identical endpoint pairs are merged at
// construction; an orientation-doubled index sorted by first angle backs the
// box queries.
class SampledLamination {
  public:
    SampledLamination() = default;
    SampledLamination(LaminationKind kind, std::string source, std::vector<LaminationAtom> atoms)
        : kind_(kind), source_(std::move(source)), atoms_(std::move(atoms)) {
        for (auto& at : atoms_) {
            at.a = wrap_angle(at.a);
            at.b = wrap_angle(at.b);
            if (at.a > at.b) std::swap(at.a, at.b);
            if (at.weight < 0 || !std::isfinite(at.weight))
                throw invalid_parameter("SampledLamination: weights must be finite and >= 0");
        }
        std::sort(atoms_.begin(), atoms_.end(), [](const LaminationAtom& x, const LaminationAtom& y) {
            if (x.a != y.a) return x.a < y.a;
            return x.b < y.b;
        });
        std::vector<LaminationAtom> merged;
        for (const auto& at : atoms_) {
            if (!merged.empty() && merged.back().a == at.a && merged.back().b == at.b) {
                merged.back().weight += at.weight;
                merged.back().dx += at.dx;
                merged.back().truncated = merged.back().truncated || at.truncated;
            } else {
                merged.push_back(at);
            }
        }
        atoms_ = std::move(merged);
        index_.reserve(atoms_.size() * 2);
        for (std::uint32_t i = 0; i < atoms_.size(); ++i) {
            index_.push_back({atoms_[i].a, atoms_[i].b, i});
            index_.push_back({atoms_[i].b, atoms_[i].a, i});
        }
        std::sort(index_.begin(), index_.end(),
                  [](const IndexEntry& x, const IndexEntry& y) { return x.first < y.first; });
    }

    LaminationKind kind() const { return kind_; }
    const std::string& source() const { return source_; }
    const std::vector<LaminationAtom>& atoms() const { return atoms_; }

    double total_mass() const {
        double m = 0;
        for (const auto& at : atoms_) m += at.weight;
        return m;
    }

    // Sum of weights of atoms inside the box (half-open arcs).
    double box_mass(const GeodesicBox& box) const {
        double m = 0;
        auto scan_range = [&](double lo, double hi) {
            auto cmp = [](const IndexEntry& e2, double v) { return e2.first < v; };
            auto it = std::lower_bound(index_.begin(), index_.end(), lo, cmp);
            for (; it != index_.end() && it->first < hi; ++it) {
                if (in_arc(box.c(), box.d(), it->second)) m += atoms_[it->atom].weight;
            }
        };
        // [a, b) may wrap
        double a = wrap_angle(box.a());
        double span = box.b() - box.a();
        double b = a + span;
        if (b <= 2 * std::numbers::pi) {
            scan_range(a, b);
        } else {
            scan_range(a, 2 * std::numbers::pi);
            scan_range(0, b - 2 * std::numbers::pi);
        }
        return m;
    }

  private:
    static bool in_arc(double lo, double hi, double t) {
        double x = wrap_angle(t);
        double base = wrap_angle(lo);
        double off = x - base;
        if (off < 0) off += 2 * std::numbers::pi;
        return off < hi - lo;
    }

    struct IndexEntry {
        double first, second;
        std::uint32_t atom;
    };

    LaminationKind kind_ = LaminationKind::generic;
    std::string source_;
    std::vector<LaminationAtom> atoms_;
    std::vector<IndexEntry> index_;
};

inline double box_mass(const SampledLamination& lam, const GeodesicBox& box) {
    return lam.box_mass(box);
}

// ---------------------------------------------------------------------------
// Sampling measured laminations

// Transversal system for a polynomial differential: horizontal arcs that each
// vertical trajectory of interest crosses exactly once.
struct TransversalSpec {
    std::vector<std::vector<Complex>> arcs;
};

namespace detail {
// cumulative natural-parameter length table along a polyline
struct NaturalTable {
    std::vector<Complex> pts;   // fine subdivision of the polyline
    std::vector<double> cum;    // cumulative |sqrt(phi)| arc length
    double total() const { return cum.back(); }

    Complex point_at_width(double target) const {
        auto it = std::upper_bound(cum.begin(), cum.end(), target);
        size_t i = std::min((size_t)(it - cum.begin()), cum.size() - 1);
        if (i == 0) return pts[0];
        double seg = cum[i] - cum[i - 1];
        double t = seg > 0 ? (target - cum[i - 1]) / seg : 0.5;
        return pts[i - 1] + t * (pts[i] - pts[i - 1]);
    }
};

inline NaturalTable natural_table(const PolynomialQD& qd, const std::vector<Complex>& arc,
                                  int oversample) {
    NaturalTable table;
    table.pts.push_back(arc.front());
    table.cum.push_back(0);
    for (size_t v = 0; v + 1 < arc.size(); ++v) {
        Complex z0 = arc[v], z1 = arc[v + 1];
        int m = std::max(4, oversample);
        for (int i = 1; i <= m; ++i) {
            Complex a = z0 + (double(i - 1) / m) * (z1 - z0);
            Complex b = z0 + (double(i) / m) * (z1 - z0);
            double w = phi_length(qd, std::vector<Complex>{a, b});
            table.pts.push_back(b);
            table.cum.push_back(table.cum.back() + w);
        }
    }
    return table;
}

inline void check_horizontal(const PolynomialQD& qd, const std::vector<Complex>& arc) {
    for (size_t v = 0; v + 1 < arc.size(); ++v) {
        Complex t = arc[v + 1] - arc[v];
        for (double s : {0.25, 0.5, 0.75}) {
            Complex z = arc[v] + s * t;
            Complex q = qd.eval(z) * t * t;
            if (q == Complex(0, 0)) continue;  // through a zero: borderline, allow
            if (std::abs(std::arg(q)) > 0.2)
                throw invalid_parameter("transversal arc is not horizontal for this differential");
        }
    }
}

struct DiskSamplePlan {
    LaminationKind kind;
    double budget;
};

inline std::vector<LaminationAtom> sample_disk(const PolynomialQD& qd, const TransversalSpec& spec,
                                               int n, const DiskSamplePlan& plan) {
    if (n < 1) throw invalid_parameter("sample: n >= 1 required");
    if (spec.arcs.empty()) throw invalid_parameter("sample: empty transversal spec");
    std::vector<NaturalTable> tables;
    double W = 0;
    for (const auto& arc : spec.arcs) {
        check_horizontal(qd, arc);
        tables.push_back(natural_table(qd, arc, std::max(16, 4 * n / (int)spec.arcs.size() / 4)));
        W += tables.back().total();
    }
    std::vector<LaminationAtom> atoms;
    TraceOptions topt;
    topt.budget = plan.budget;
    topt.record_path = false;
    for (const auto& table : tables) {
        double w_arc = table.total();
        int n_arc = std::max(1, (int)std::llround(double(n) * (w_arc / W)));
        double dx = w_arc / n_arc;
        for (int i = 0; i < n_arc; ++i) {
            double target = (i + 0.5) * dx;
            Complex z0 = table.point_at_width(target);
            if (std::abs(z0) >= 1.0) continue;
            if (qd.eval(z0) == Complex(0, 0)) continue;
            Trajectory traj;
            try {
                traj = trace_vertical(qd, z0, topt);
            } catch (const invalid_parameter&) {
                continue;
            }
            bool critical = traj.end_a.kind == TrajectoryEnd::Kind::zero ||
                            traj.end_b.kind == TrajectoryEnd::Kind::zero;
            if (critical) continue;  // countable family, measure zero
            LaminationAtom at;
            at.dx = dx;
            at.length = traj.phi_length;
            at.truncated = traj.truncated();
            at.a = traj.end_a.angle;
            at.b = traj.end_b.angle;
            if (plan.kind == LaminationKind::mu)
                at.weight = at.truncated ? 0.0 : dx / traj.phi_length;
            else
                at.weight = dx;
            atoms.push_back(at);
        }
    }
    return atoms;
}
}  // namespace detail

inline SampledLamination sample_mu(const PolynomialQD& qd, const TransversalSpec& spec, int n,
                                   double budget = 1e3) {
    auto atoms = detail::sample_disk(qd, spec, n, {LaminationKind::mu, budget});
    return SampledLamination(LaminationKind::mu, "qd", std::move(atoms));
}

inline SampledLamination sample_nu(const PolynomialQD& qd, const TransversalSpec& spec, int n,
                                   double budget = 1e3) {
    auto atoms = detail::sample_disk(qd, spec, n, {LaminationKind::nu, budget});
    return SampledLamination(LaminationKind::nu, "qd", std::move(atoms));
}

namespace detail {
// flat sampling: the canonical transversal system is one horizontal cut per
// strip; every leaf is hit exactly once and the piecewise-constant integrand
// makes midpoint sampling exact
inline std::vector<LaminationAtom> sample_flat(const SlitDomain& dom, int n, LaminationKind kind) {
    if (n < 1) throw invalid_parameter("sample: n >= 1 required");
    auto strips = flat_strips(dom);
    const PrimeEndCycle& cyc = dom.cycle();
    double W = 0;
    for (const auto& s : strips) W += s.width();
    std::vector<LaminationAtom> atoms;
    for (const auto& s : strips) {
        double w = s.width();
        if (w <= 0) continue;
        int n_strip = std::max(1, (int)std::llround(double(n) * (w / W)));
        double dx = w / n_strip;
        double l = s.leaf_length();
        for (int i = 0; i < n_strip; ++i) {
            double x = s.x_lo.value() + (i + 0.5) * dx;
            LaminationAtom at;
            at.dx = dx;
            at.length = l;
            at.truncated = false;
            at.a = cyc.angle(s.bottom.kind, s.bottom.index, s.bottom.side,
                             Dyadic(std::llround(std::ldexp(x, 40)), 40));
            at.b = cyc.angle(s.top.kind, s.top.index, s.top.side,
                             Dyadic(std::llround(std::ldexp(x, 40)), 40));
            at.weight = kind == LaminationKind::mu ? dx / l : dx;
            atoms.push_back(at);
        }
    }
    return atoms;
}
}  // namespace detail

inline SampledLamination sample_mu(const SlitDomain& dom, int n) {
    return SampledLamination(LaminationKind::mu, "flat",
                             detail::sample_flat(dom, n, LaminationKind::mu));
}

inline SampledLamination sample_nu(const SlitDomain& dom, int n) {
    return SampledLamination(LaminationKind::nu, "flat",
                             detail::sample_flat(dom, n, LaminationKind::nu));
}

// Box generated by a pair of flat boundary sets under the prime-end angle
// parameterization: the (E, F) mass is the sum over the arc-product boxes.
inline double box_mass(const SampledLamination& lam, const SlitDomain& dom, const BoundarySet& e,
                       const BoundarySet& f) {
    const PrimeEndCycle& cyc = dom.cycle();
    double total = 0;
    const double tau = 2 * std::numbers::pi;
    auto arcs_e = cyc.intervals(e);
    auto arcs_f = cyc.intervals(f);
    double S = cyc.total_length();
    for (const auto& [ea, eb] : arcs_e)
        for (const auto& [fa, fb] : arcs_f) {
            for (const auto& at : lam.atoms()) {
                auto in = [&](double angle, double lo, double hi) {
                    double s = angle / tau * S;
                    double off = s - lo;
                    off -= std::floor(off / S) * S;
                    return off < hi - lo;
                };
                bool hit = (in(at.a, ea, eb) && in(at.b, fa, fb)) ||
                           (in(at.b, ea, eb) && in(at.a, fa, fb));
                if (hit) total += at.weight;
            }
        }
    return total;
}

// ---------------------------------------------------------------------------
// Thurston norm estimate: max box mass over deterministically sampled boxes
// of Liouville measure exactly log 2 (Moebius transports of the standard
// box). A lower bound for the true norm.

struct ThurstonSample {
    double value = 0;
    std::vector<MoebiusDisk> transports;  // the uniform transports, for replay
    std::vector<std::array<double, 4>> boxes;  // every sampled box's angles
    std::vector<double> masses;
};

// Alternates uniform Moebius transports of the standard box with log-2 boxes
// anchored on atoms of the lamination: the anchored half searches near the
// support (without it, a support squeezed into a short arc would be missed
// by every moderate transport), the uniform half keeps the estimate honest
// on spread-out currents. Deterministic per (seed, index).
inline ThurstonSample thurston_norm_detailed(const SampledLamination& lam, int samples,
                                             std::uint64_t seed) {
    if (samples < 1) throw invalid_parameter("thurston_norm: samples >= 1 required");
    ThurstonSample out;
    GeodesicBox base = standard_box();
    const auto& atoms = lam.atoms();
    for (int i = 0; i < samples; ++i) {
        std::optional<GeodesicBox> box;
        if (i % 2 == 1 && !atoms.empty()) {
            std::uint64_t pick = splitmix64(seed ^ (0xd1342543de82ef95ULL * (i + 1)));
            const LaminationAtom& at = atoms[pick % atoms.size()];
            box = anchored_log2_box(at.a, at.b);
        }
        if (!box) {
            MoebiusDisk g = sampled_transport(seed, (std::uint64_t)i);
            out.transports.push_back(g);
            box = g.transport(base);
        }
        double m = lam.box_mass(*box);
        out.boxes.push_back({box->a(), box->b(), box->c(), box->d()});
        out.masses.push_back(m);
        out.value = std::max(out.value, m);
    }
    return out;
}

inline double thurston_norm(const SampledLamination& lam, int samples, std::uint64_t seed) {
    return thurston_norm_detailed(lam, samples, seed).value;
}

// ---------------------------------------------------------------------------
// Atom test: masses of the nested boxes [a - delta_j, a + delta_j] x [c, d]
// with delta halving. For laminations of integrable differentials the
// sequence decreases to zero; a genuine atom pins it.

inline std::vector<double> atom_test(const SampledLamination& lam, double a, double c, double d,
                                     int shrink_levels) {
    a = wrap_angle(a);
    double cw = wrap_angle(c);
    double span_cd = wrap_angle(d) - cw;
    if (span_cd <= 0) span_cd += 2 * std::numbers::pi;
    // a must be outside [c, d]
    double off = a - cw;
    if (off < 0) off += 2 * std::numbers::pi;
    if (off < span_cd) throw invalid_parameter("atom_test: a lies inside the arc [c, d]");
    double gap_after = off - span_cd;           // ccw gap from d to a
    double gap_before = 2 * std::numbers::pi - off;  // ccw gap from a to c
    double delta0 = 0.45 * std::min(gap_after, gap_before);
    std::vector<double> masses;
    double delta = delta0;
    for (int j = 0; j < shrink_levels; ++j) {
        GeodesicBox box(a - delta, a + delta, cw, cw + span_cd);
        masses.push_back(lam.box_mass(box));
        delta *= 0.5;
    }
    return masses;
}

// ---------------------------------------------------------------------------
// L^1 reconstruction: sum over shared atoms of (nu/mu) nu = l(x) dx. Atoms
// with mu-weight zero (infinite-length candidates) contribute via the
// recorded leaf length when it is finite.

inline double reconstruct_l1(const SampledLamination& mu, const SampledLamination& nu) {
    const auto& ma = mu.atoms();
    const auto& na = nu.atoms();
    if (ma.size() != na.size())
        throw invalid_parameter("reconstruct_l1: mu and nu must share transversal samples");
    double total = 0;
    for (size_t i = 0; i < ma.size(); ++i) {
        if (ma[i].a != na[i].a || ma[i].b != na[i].b)
            throw invalid_parameter("reconstruct_l1: mismatched atom supports");
        if (ma[i].weight > 0)
            total += (na[i].weight / ma[i].weight) * na[i].weight;
        else if (std::isfinite(na[i].length) && !na[i].truncated)
            total += na[i].length * na[i].dx;
        // truncated leaves with vanishing mu-weight: no finite record, skipped
    }
    return total;
}

// ---------------------------------------------------------------------------
// Discretized Liouville current: one atom per unordered pair of angular grid
// cells (the exact box formula per cell pair), diagonal-adjacent pairs
// excluded (their mass diverges; test boxes keep their arcs far from the
// diagonal).

inline SampledLamination discretize_liouville(int n_angular) {
    if (n_angular < 8) throw invalid_parameter("discretize_liouville: grid too small");
    const double tau = 2 * std::numbers::pi;
    std::vector<LaminationAtom> atoms;
    atoms.reserve((size_t)n_angular * (n_angular - 3) / 2);
    for (int i = 0; i < n_angular; ++i) {
        double a0 = tau * i / n_angular, a1 = tau * (i + 1) / n_angular;
        for (int j = i + 2; j < n_angular; ++j) {
            if (i == 0 && j == n_angular - 1) continue;  // cyclically adjacent
            double b0 = tau * j / n_angular, b1 = tau * (j + 1) / n_angular;
            LaminationAtom at;
            at.a = 0.5 * (a0 + a1);
            at.b = 0.5 * (b0 + b1);
            at.weight = liouville_mass(a0, a1, b0, b1);
            at.dx = 0;
            at.length = std::numeric_limits<double>::infinity();
            atoms.push_back(at);
        }
    }
    return SampledLamination(LaminationKind::generic, "liouville", std::move(atoms));
}

}  // namespace extremal_rays
