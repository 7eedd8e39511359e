#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "comb.hpp"
#include "currents.hpp"
#include "flat_trajectories.hpp"
#include "grid_solver.hpp"
#include "modulus_analytic.hpp"

namespace extremal_rays {

// ---------------------------------------------------------------------------
// Teichmueller ray in natural coordinates: squeeze(dom, eps) lives in
// slit_domain.hpp; here are the modulus experiments along the ray.

struct RayPoint {
    double eps = 0;
    double eps_mod = 0;     // eps * extrapolated modulus of the squeezed family
    double error_bar = 0;   // eps * modulus error bar
    double raw_value = 0;   // eps * finest-grid value
    double h = 0;
};

// eps * mod(T_eps(Gamma(e, f))) on the squeezed domain.
inline RayPoint ray_modulus(const SlitDomain& dom, const BoundarySet& e, const BoundarySet& f,
                            Dyadic eps, Dyadic h, GridOptions opt = {}) {
    SlitDomain sq = squeeze(dom, eps);
    BoundarySet se = squeeze_set(e, eps, sq);
    BoundarySet sf = squeeze_set(f, eps, sq);
    ModulusResult m = grid_modulus(sq, se, sf, h, opt);
    RayPoint p;
    p.eps = eps.value();
    p.eps_mod = p.eps * m.extrapolated;
    p.error_bar = p.eps * m.error_bar;
    p.raw_value = p.eps * m.value;
    p.h = m.h;
    return p;
}

// Largest power-of-two step that resolves the squeezed geometry: h divides
// every coordinate and h <= gap/4.
inline Dyadic auto_grid_step(const SlitDomain& dom, int extra_refine = 0) {
    double gap = detail::min_feature_gap(dom);
    int m = (int)std::ceil(std::log2(4.0 / gap));
    for (const auto& p : dom.outer()) {
        m = std::max({m, p.x.exp2(), p.y.exp2()});
    }
    for (const auto& s : dom.slits())
        m = std::max({m, s.a.x.exp2(), s.a.y.exp2(), s.b.x.exp2(), s.b.y.exp2()});
    return Dyadic(1, m + extra_refine);
}

struct SqueezeExperiment {
    const SlitDomain* domain = nullptr;
    BoundarySet e, f;
    std::vector<Dyadic> epsilons;  // strictly decreasing toward 0
    std::optional<Dyadic> grid_h;  // per-instance override; otherwise automatic
    GridOptions grid;

    double target() const { return vertical_family_modulus(*domain, e, f); }
};

struct ConvergenceReport {
    std::vector<RayPoint> points;
    double target = 0;
    bool monotone_band = true;   // non-increasing within error bars
    double final_gap = 0;        // |eps mod - target| at the smallest eps
    bool lower_bound_ok = true;  // eps mod >= target - bar at every eps
};

inline ConvergenceReport run_convergence(const SqueezeExperiment& exp) {
    if (exp.epsilons.empty()) throw invalid_parameter("run_convergence: empty schedule");
    for (size_t i = 0; i + 1 < exp.epsilons.size(); ++i)
        if (!(exp.epsilons[i + 1] < exp.epsilons[i]))
            throw invalid_parameter("run_convergence: epsilons must decrease strictly");
    ConvergenceReport rep;
    rep.target = exp.target();
    for (const Dyadic& eps : exp.epsilons) {
        Dyadic h = exp.grid_h ? *exp.grid_h : auto_grid_step(squeeze(*exp.domain, eps));
        rep.points.push_back(ray_modulus(*exp.domain, exp.e, exp.f, eps, h, exp.grid));
    }
    for (size_t i = 0; i + 1 < rep.points.size(); ++i) {
        const auto& p = rep.points[i];
        const auto& q = rep.points[i + 1];
        if (q.eps_mod > p.eps_mod + p.error_bar + q.error_bar + 1e-9) rep.monotone_band = false;
    }
    for (const auto& p : rep.points)
        if (p.eps_mod < rep.target - p.error_bar - 1e-9) rep.lower_bound_ok = false;
    rep.final_gap = std::abs(rep.points.back().eps_mod - rep.target);
    return rep;
}

// ---------------------------------------------------------------------------
// The uniform weak* counterexample certificate. Constants of the flat-side
// conditions (a')-(e'): C1' = 9 pi / 4, C2' = 1/3, delta' = 1/(25 pi),
// C3' = 1/3, and (d') the exact values 2^-k.

struct CombConditionRecord {
    double value = 0;      // measured (or certified-bound) quantity
    double bound = 0;      // the constant it is compared against
    double error_bar = 0;
    bool pass = false;     // inequality holds with margin exceeding the bar
    std::string route;     // how the value was computed
};

struct CombLevelRecord {
    int k = 0;
    CombConditionRecord a, b, c, d, e;
    double delta_witness = 0;   // exact relative distance of (E_k, F_k)
    double e_direct = 0;        // direct squeezed-comb value of (e')
    double e_direct_bar = 0;
    bool pass = false;
};

struct UniformWeakStarCertificate {
    int k_max = 0;
    double h = 0;
    std::vector<CombLevelRecord> levels;
    bool all_pass = false;

    static double C1p() { return 9.0 * std::numbers::pi / 4.0; }
    static double C2p() { return 1.0 / 3.0; }
    static double deltap() { return 1.0 / (25.0 * std::numbers::pi); }
    static double C3p() { return 1.0 / 3.0; }
};

namespace detail {

// window F-sub-interval x [0,1] of the comb: only level-k teeth live there
struct CombWindow {
    SlitDomain dom;
    BoundarySet E;       // teeth (+ window-edge teeth) + top edge over the E-range
    BoundarySet F;       // bottom edge piece
    BoundarySet G1, G2;  // low vertical edge pieces (the conjugate electrodes)
};

// Build the window [x0,x1] x [0,1] with level-k teeth; the E set covers teeth
// with abscissa in [e0,e1] (with inclusivity flags) plus the top edge over
// [e0,e1]; the F set is the bottom piece [f0,f1].
inline CombWindow comb_window(int k, Dyadic x0, Dyadic x1, Dyadic e0, Dyadic e1, bool incl_lo,
                              bool incl_hi, Dyadic f0, Dyadic f1) {
    Dyadic foot(1, k), top(1);
    std::vector<DyPoint> outer = {{x0, Dyadic(0)}, {x1, Dyadic(0)}, {x1, top}, {x0, top}};
    std::vector<Slit> slits;
    for (int j = 0; j <= (1 << k); ++j) {
        Dyadic x = Dyadic(1, k) + Dyadic(j, 2 * k);
        if (x < x0 || x > x1) continue;
        slits.push_back(Slit{{x, foot}, {x, top}, true, false});
    }
    SlitDomain dom(std::move(outer), std::move(slits));
    std::vector<BoundaryPiece> epieces;
    auto tooth_in_e = [&](Dyadic x) {
        if (x < e0 || x > e1) return false;
        if (!incl_lo && x == e0) return false;
        if (!incl_hi && x == e1) return false;
        return true;
    };
    for (int i = 0; i < (int)dom.slits().size(); ++i) {
        const Slit& s = dom.slits()[i];
        if (!tooth_in_e(s.line())) continue;
        if (s.edge_resident) {
            for (int e2 = 0; e2 < dom.edge_count(); ++e2)
                if (!dom.edge_horizontal(e2) && dom.edge_start(e2).x == s.line())
                    epieces.push_back(BoundaryPiece{FeatureKind::outer_edge, e2,
                                                    dom.edge_interior_side(e2), 0, foot, top});
            continue;
        }
        epieces.push_back(BoundaryPiece{FeatureKind::slit_side, i, Side::neg, 0, foot, top});
        epieces.push_back(BoundaryPiece{FeatureKind::slit_side, i, Side::pos, 0, foot, top});
        epieces.push_back(BoundaryPiece{FeatureKind::slit_tip, i, Side::neg, 0, foot, foot});
    }
    epieces.push_back(BoundaryPiece{FeatureKind::outer_edge, 2, Side::neg, 0,
                                    std::max(e0, x0), std::min(e1, x1)});
    CombWindow w{std::move(dom), BoundarySet(), BoundarySet(), BoundarySet(), BoundarySet()};
    w.E = BoundarySet(&w.dom, std::move(epieces));
    w.F = BoundarySet(&w.dom,
                      {BoundaryPiece{FeatureKind::outer_edge, 0, Side::pos, 0, f0, f1}});
    // Conjugate electrodes: whatever the window's vertical edges keep outside
    // E. With a tooth on the edge (k >= 2) that is the part below the foot;
    // at k = 1 the F'-window edges carry no tooth and the full edge is free.
    auto edge_free_top = [&](Dyadic xe) {
        bool tooth_on_edge = false;
        for (const auto& s : w.dom.slits())
            if (s.edge_resident && s.line() == xe && tooth_in_e(xe)) tooth_on_edge = true;
        return tooth_on_edge ? foot : top;
    };
    // left edge is index 3 ((x0,1)->(x0,0)), right edge index 1
    w.G1 = BoundarySet(&w.dom, {BoundaryPiece{FeatureKind::outer_edge, 3, Side::pos, 0, Dyadic(0),
                                              edge_free_top(x0)}});
    w.G2 = BoundarySet(&w.dom, {BoundaryPiece{FeatureKind::outer_edge, 1, Side::neg, 0, Dyadic(0),
                                              edge_free_top(x1)}});
    return w;
}

}  // namespace detail

// Certificate runner. (a') is solved on the full comb; (b'), (c') use the
// window sub-domain routes whose inequality directions are exact theorems
// (conjugate family + overflowing for (b'), domain monotonicity for (c'));
// (d') is the exact vertical-family integral; (e') runs both the squeezed
// conjugate window route and the direct squeezed-comb solve.
inline UniformWeakStarCertificate certify_counterexample(int k_max, Dyadic h,
                                                         GridOptions opt = {},
                                                         bool direct_b = false) {
    if (k_max < 1) throw invalid_parameter("certify_counterexample: k_max >= 1");
    SlitDomain comb = build_comb(k_max);
    {
        double gap = detail::min_feature_gap(comb);
        if (h.value() > gap / 2) throw resolution_error("certify: h too coarse for this k_max");
    }
    UniformWeakStarCertificate cert;
    cert.k_max = k_max;
    cert.h = h.value();
    GridOptions noconj = opt;
    noconj.conjugate = false;

    for (int k = 1; k <= k_max; ++k) {
        CombLevelRecord rec;
        rec.k = k;
        CombSets sets = comb_sets(comb, k);
        Dyadic foot(1, k);
        Dyadic eps_k(1, k);

        // (a'): mod(E_k, F_k; D) <= 9 pi / 4, witness Delta(E_k, F_k) = 1
        {
            double dist = sets.E.distance_to(sets.F);
            double mindiam = std::min(sets.E.diameter(), sets.F.diameter());
            rec.delta_witness = dist / mindiam;
            ModulusResult m = grid_modulus(comb, sets.E, sets.F, h, opt);
            rec.a.value = m.extrapolated;
            rec.a.bound = UniformWeakStarCertificate::C1p();
            rec.a.error_bar = m.error_bar;
            rec.a.pass = rec.a.value + rec.a.error_bar < rec.a.bound;
            rec.a.route = "direct full-comb";
        }

        // (b'): mod(E'_k, F'_k; D) >= 1/3 via 1 / mod(G_k) on the F'_k window
        {
            auto w = detail::comb_window(k, sets.fp_lo, sets.fp_hi, sets.fp_lo, sets.fp_hi, true,
                                         true, sets.fp_lo, sets.fp_hi);
            ModulusResult g = grid_modulus(w.dom, w.G1, w.G2, h, noconj);
            double lower = 1.0 / (g.extrapolated + g.error_bar);
            rec.b.value = 1.0 / g.extrapolated;
            rec.b.bound = UniformWeakStarCertificate::C2p();
            rec.b.error_bar = rec.b.value - lower;
            rec.b.pass = lower > rec.b.bound;
            rec.b.route = "1/mod(G_k), window conjugate";
            if (direct_b) {
                ModulusResult m = grid_modulus(comb, sets.Ep, sets.Fp, h, noconj);
                // the direct solve must dominate the certified lower bound
                if (m.extrapolated + m.error_bar < lower) rec.b.pass = false;
                rec.b.route += " + direct cross-check";
            }
        }

        // (c'): all four mixed moduli >= 1/(25 pi), via the F_k window
        {
            double worst = std::numeric_limits<double>::infinity();
            double worst_bar = 0;
            struct Pair {
                Dyadic e0, e1;
                bool il, ih;
                Dyadic f0, f1;
            };
            Pair pairs[4] = {
                {sets.f_lo, sets.fp_lo, true, false, sets.f_lo, sets.fp_lo},    // E1 F1
                {sets.fp_hi, sets.f_hi, false, true, sets.fp_hi, sets.f_hi},    // E2 F2
                {sets.f_lo, sets.fp_lo, true, false, sets.fp_hi, sets.f_hi},    // E1 F2
                {sets.fp_hi, sets.f_hi, false, true, sets.f_lo, sets.fp_lo},    // E2 F1
            };
            for (const auto& pr : pairs) {
                auto w = detail::comb_window(k, sets.f_lo, sets.f_hi, pr.e0, pr.e1, pr.il, pr.ih,
                                             pr.f0, pr.f1);
                ModulusResult m = grid_modulus(w.dom, w.E, w.F, h, noconj);
                double lower = m.extrapolated - m.error_bar;
                if (lower < worst) {
                    worst = lower;
                    worst_bar = m.error_bar;
                }
            }
            rec.c.value = worst + worst_bar;  // the smallest measured value
            rec.c.bound = UniformWeakStarCertificate::deltap();
            rec.c.error_bar = worst_bar;
            rec.c.pass = worst > rec.c.bound;
            rec.c.route = "window sub-domain lower bounds";
        }

        // (d'): mod Gamma_v(E_k, F_k; D) = 2^-k exactly
        {
            rec.d.value = vertical_family_modulus(comb, sets.E, sets.F);
            rec.d.bound = foot.value();
            rec.d.error_bar = 0;
            rec.d.pass = std::abs(rec.d.value - rec.d.bound) < 1e-14;
            rec.d.route = "exact piecewise integral";
        }

        // (e'): eps_k mod(T_eps_k(Gamma'_k)) >= 1/3
        {
            // conjugate route: squeezed window G_k
            auto w = detail::comb_window(k, sets.fp_lo, sets.fp_hi, sets.fp_lo, sets.fp_hi, true,
                                         true, sets.fp_lo, sets.fp_hi);
            SlitDomain sw = squeeze(w.dom, eps_k);
            BoundarySet g1 = squeeze_set(w.G1, eps_k, sw);
            BoundarySet g2 = squeeze_set(w.G2, eps_k, sw);
            ModulusResult tg = grid_modulus(sw, g1, g2, h, noconj);
            double lower = eps_k.value() / (tg.extrapolated + tg.error_bar);
            rec.e.value = eps_k.value() / tg.extrapolated;
            rec.e.bound = UniformWeakStarCertificate::C3p();
            rec.e.error_bar = rec.e.value - lower;
            rec.e.pass = lower > rec.e.bound;
            rec.e.route = "eps/mod(T_eps(G_k)) + direct cross-check";

            // direct route on the squeezed comb
            RayPoint direct = ray_modulus(comb, sets.Ep, sets.Fp, eps_k, h, noconj);
            rec.e_direct = direct.eps_mod;
            rec.e_direct_bar = direct.error_bar;
            // consistency: the direct value may not undercut the certified bound
            if (direct.eps_mod + direct.error_bar < lower) rec.e.pass = false;
            if (direct.eps_mod - direct.error_bar < rec.e.bound) rec.e.pass = false;
        }

        rec.pass = rec.a.pass && rec.b.pass && rec.c.pass && rec.d.pass && rec.e.pass;
        cert.levels.push_back(rec);
    }
    cert.all_pass = true;
    for (const auto& r : cert.levels) cert.all_pass = cert.all_pass && r.pass;
    return cert;
}

// ---------------------------------------------------------------------------
// The uniform weak* non-convergence criterion on geodesic currents: boxes
// Q_k with L(Q_k) <= C1, sub-boxes with L(Q'_k) >= C2 > 0, margins >= delta,
// alpha_{n_k}(Q'_k) >= C3 > 0, and alpha(Q_k) -> 0.

struct CriterionReport {
    bool satisfied = false;
    double C1 = 0, C2 = 0, C3 = 0;
    std::vector<double> margins;       // min margin Liouville measure per k
    std::vector<double> alpha_masses;  // alpha_{n_k}(Q'_k)
    std::vector<double> limit_masses;  // alpha(Q_k)
    std::string reason;
};

inline CriterionReport criterion_check(const std::vector<SampledLamination>& alpha_family,
                                       const SampledLamination& limit,
                                       const std::vector<GeodesicBox>& Q,
                                       const std::vector<GeodesicBox>& Qp, double delta) {
    CriterionReport rep;
    if (delta <= 0) {
        rep.reason = "margins must satisfy delta > 0";
        return rep;
    }
    size_t n = Q.size();
    if (n == 0 || Qp.size() != n || alpha_family.size() != n) {
        rep.reason = "mismatched index families";
        return rep;
    }
    rep.C1 = 0;
    rep.C2 = std::numeric_limits<double>::infinity();
    rep.C3 = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < n; ++k) {
        rep.C1 = std::max(rep.C1, Q[k].liouville());
        rep.C2 = std::min(rep.C2, Qp[k].liouville());
        // the four margin boxes between Q_k and Q'_k
        double m1, m2, m3, m4;
        try {
            m1 = GeodesicBox(Q[k].a(), Qp[k].a(), Q[k].c(), Q[k].d()).liouville();
            m2 = GeodesicBox(Qp[k].b(), Q[k].b(), Q[k].c(), Q[k].d()).liouville();
            m3 = GeodesicBox(Q[k].a(), Q[k].b(), Q[k].c(), Qp[k].c()).liouville();
            m4 = GeodesicBox(Q[k].a(), Q[k].b(), Qp[k].d(), Q[k].d()).liouville();
        } catch (const invalid_parameter&) {
            rep.reason = "Q'_k is not compactly contained in Q_k";
            return rep;
        }
        double margin = std::min(std::min(m1, m2), std::min(m3, m4));
        rep.margins.push_back(margin);
        rep.alpha_masses.push_back(alpha_family[k].box_mass(Qp[k]));
        rep.limit_masses.push_back(limit.box_mass(Q[k]));
        rep.C3 = std::min(rep.C3, rep.alpha_masses.back());
    }
    for (double m : rep.margins)
        if (m < delta) {
            rep.reason = "margin condition fails";
            return rep;
        }
    if (!(rep.C2 > 0)) {
        rep.reason = "L(Q'_k) not bounded below";
        return rep;
    }
    if (!(rep.C3 > 0)) {
        rep.reason = "alpha_{n_k}(Q'_k) not bounded below";
        return rep;
    }
    for (size_t k = 0; k + 1 < n; ++k)
        if (rep.limit_masses[k + 1] > rep.limit_masses[k] + 1e-12) {
            rep.reason = "alpha(Q_k) does not decrease";
            return rep;
        }
    if (!(rep.limit_masses.back() < rep.C3 / 2)) {
        rep.reason = "alpha(Q_k) does not fall below C3/2";
        return rep;
    }
    rep.satisfied = true;
    rep.reason = "all five conditions hold";
    return rep;
}

}  // namespace extremal_rays
