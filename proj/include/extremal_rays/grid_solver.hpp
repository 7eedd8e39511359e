#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slit_domain.hpp"

namespace extremal_rays {

struct ModulusResult {
    double value = 0;          // Dirichlet energy at the finest grid
    double h = 0;              // finest cell size
    std::optional<double> reciprocity_gap;  // |value * conjugate_value - 1|
    double extrapolated = 0;   // Richardson estimate over the solved levels
    double error_bar = 0;      // |extrapolated - value| padded by solver tolerance
    double observed_order = 0; // fitted convergence order (0 when assumed)
    long iterations = 0;       // CG iterations at the finest level
};

struct GridOptions {
    int levels = 3;            // finest + up to (levels-1) coarser solves
    bool conjugate = true;     // also solve the conjugate family for reciprocity
    double cg_tol = 1e-10;     // relative residual
    long max_iterations = 1000000;
};

namespace detail {

// Cell-centered finite-volume Laplace capacity problem. All geometry must sit
// on grid lines; slits blank the face between their two neighbor columns and
// Dirichlet pieces attach half-cell links (conductance 2) carrying the set's
// potential.
class GridProblem {
  public:
    GridProblem(const SlitDomain& dom, const BoundarySet& e, const BoundarySet& f, Dyadic h)
        : dom_(&dom), h_(h) {
        build(e, f);
    }

    // returns the Dirichlet energy = discrete modulus of the connecting family
    double solve(double cg_tol, long max_iter, long* iters_out,
                 const GridProblem* coarse = nullptr, const std::vector<double>* coarse_u = nullptr,
                 std::vector<double>* u_out = nullptr) const;

    int nx() const { return nx_; }
    int ny() const { return ny_; }

  private:
    void build(const BoundarySet& e, const BoundarySet& f);
    void add_dirichlet_faces(const BoundarySet& set, double value);

    const SlitDomain* dom_;
    Dyadic h_;
    int nx_ = 0, ny_ = 0;
    Dyadic x0_, y0_;
    std::vector<std::uint8_t> interior_;
    std::vector<std::uint8_t> wE_, wN_;  // open-face weights (0/1)
    std::vector<double> diag_;
    std::vector<double> b_;
    // per-cell Dirichlet data folded into diag_/b_; energy needs the raw list
    struct DirFace {
        int cell;
        double value;
    };
    std::vector<DirFace> dir_;
};

inline void GridProblem::build(const BoundarySet& e, const BoundarySet& f) {
    const SlitDomain& dom = *dom_;
    x0_ = dom.min_x();
    y0_ = dom.min_y();
    nx_ = (int)exact_div(dom.max_x() - x0_, h_);
    ny_ = (int)exact_div(dom.max_y() - y0_, h_);
    if (nx_ <= 0 || ny_ <= 0) throw resolution_error("grid: empty domain");
    if ((long)nx_ * ny_ > 80'000'000) throw resolution_error("grid: too many cells");
    interior_.assign((size_t)nx_ * ny_, 0);

    // feature separation: h must not exceed half the least gap between
    // parallel feature lines at the finest level (checked by the caller for
    // coarse levels)
    // cell centers against the open polygon; all vertices are on grid lines
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) {
            Point c{(x0_ + Dyadic(i) * h_).value() + 0.5 * h_.value(),
                    (y0_ + Dyadic(j) * h_).value() + 0.5 * h_.value()};
            // contains() also excludes slits, but cell centers never lie on a
            // slit line (slits are on grid lines, centers at half-offsets)
            interior_[(size_t)j * nx_ + i] = dom.contains(c) ? 1 : 0;
        }

    size_t n = interior_.size();
    wE_.assign(n, 0);
    wN_.assign(n, 0);
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) {
            size_t c = (size_t)j * nx_ + i;
            if (!interior_[c]) continue;
            if (i + 1 < nx_ && interior_[c + 1]) wE_[c] = 1;
            if (j + 1 < ny_ && interior_[c + nx_]) wN_[c] = 1;
        }
    // slits blank the faces they cover
    for (const auto& s : dom.slits()) {
        if (s.edge_resident) continue;
        if (s.vertical) {
            long col = exact_div(s.line() - x0_, h_);
            long jlo = exact_div(s.lo() - y0_, h_);
            long jhi = exact_div(s.hi() - y0_, h_);
            if (col <= 0 || col >= nx_) continue;
            for (long j = jlo; j < jhi; ++j) wE_[(size_t)j * nx_ + (col - 1)] = 0;
        } else {
            long row = exact_div(s.line() - y0_, h_);
            long ilo = exact_div(s.lo() - x0_, h_);
            long ihi = exact_div(s.hi() - x0_, h_);
            if (row <= 0 || row >= ny_) continue;
            for (long i = ilo; i < ihi; ++i) wN_[(size_t)(row - 1) * nx_ + i] = 0;
        }
    }

    diag_.assign(n, 0);
    b_.assign(n, 0);
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) {
            size_t c = (size_t)j * nx_ + i;
            if (!interior_[c]) { diag_[c] = 1.0; continue; }
            double d = 0;
            d += wE_[c];
            d += wN_[c];
            if (i > 0) d += wE_[c - 1];
            if (j > 0) d += wN_[c - nx_];
            diag_[c] = d;
        }
    add_dirichlet_faces(e, 0.0);
    add_dirichlet_faces(f, 1.0);
    for (size_t c = 0; c < n; ++c)
        if (interior_[c] && diag_[c] == 0) diag_[c] = 1.0;  // isolated pocket
}

inline void GridProblem::add_dirichlet_faces(const BoundarySet& set, double value) {
    const SlitDomain& dom = *dom_;
    for (const auto& p : set.pieces()) {
        if (p.kind == FeatureKind::slit_tip) continue;
        if (!(p.t1 > p.t0)) continue;
        long lo, hi;
        bool vertical_line;   // the feature line is vertical
        Dyadic line;
        Side side;
        if (p.kind == FeatureKind::outer_edge) {
            vertical_line = !dom.edge_horizontal(p.index);
            DyPoint s = dom.edge_start(p.index);
            line = vertical_line ? s.x : s.y;
            side = dom.edge_interior_side(p.index);
            // the domain lies on `side`; the half-cell link belongs to the
            // first cell on that side
        } else {
            const Slit& sl = dom.slits()[p.index];
            vertical_line = sl.vertical;
            line = sl.line();
            side = p.side;
            if (sl.edge_resident) {
                // boundary refinement: behave exactly like the outer edge
                for (int e2 = 0; e2 < dom.edge_count(); ++e2) {
                    bool v2 = !dom.edge_horizontal(e2);
                    if (v2 != vertical_line) continue;
                    DyPoint s2 = dom.edge_start(e2);
                    Dyadic l2 = vertical_line ? s2.x : s2.y;
                    if (l2 == line) side = dom.edge_interior_side(e2);
                }
            }
        }
        lo = exact_div(p.t0 - (vertical_line ? y0_ : x0_), h_);
        hi = exact_div(p.t1 - (vertical_line ? y0_ : x0_), h_);
        long linepos = exact_div(line - (vertical_line ? x0_ : y0_), h_);
        int faces = 0;
        for (long t = lo; t < hi; ++t) {
            long ci, cj;
            if (vertical_line) {
                cj = t;
                ci = side == Side::neg ? linepos - 1 : linepos;
            } else {
                ci = t;
                cj = side == Side::neg ? linepos - 1 : linepos;
            }
            if (ci < 0 || ci >= nx_ || cj < 0 || cj >= ny_) continue;
            size_t c = (size_t)cj * nx_ + ci;
            if (!interior_[c])
                throw invalid_parameter("grid: Dirichlet piece borders no interior cell");
            diag_[c] += 2.0;
            b_[c] += 2.0 * value;
            dir_.push_back({(int)c, value});
            ++faces;
        }
        if (faces == 0)
            throw resolution_error("grid: boundary piece maps to no grid face; grid too coarse");
    }
}

// One grid level of the multigrid preconditioner: a 5-point graph Laplacian
// with general face conductances (Galerkin coarsening of the fine 0/1 ones).
struct MgLevel {
    int nx = 0, ny = 0;
    std::vector<double> diag, cE, cN;

    size_t size() const { return (size_t)nx * ny; }

    void apply(const double* x, double* out) const {
        const double* dg = diag.data();
        const double* ce = cE.data();
        const double* cn = cN.data();
        for (int j = 0; j < ny; ++j) {
            size_t row = (size_t)j * nx;
            for (int i = 0; i < nx; ++i) {
                size_t c = row + i;
                double acc = dg[c] * x[c];
                if (i + 1 < nx) acc -= ce[c] * x[c + 1];
                if (i > 0) acc -= ce[c - 1] * x[c - 1];
                if (j + 1 < ny) acc -= cn[c] * x[c + nx];
                if (j > 0) acc -= cn[c - nx] * x[c - nx];
                out[c] = acc;
            }
        }
    }

    // one red-black Gauss-Seidel sweep, colors in the given order
    void rbgs(std::vector<double>& u, const std::vector<double>& b, int first_color) const {
        for (int pass = 0; pass < 2; ++pass) {
            int color = (first_color + pass) & 1;
            for (int j = 0; j < ny; ++j) {
                size_t row = (size_t)j * nx;
                int i0 = (color + j) & 1;
                for (int i = i0; i < nx; i += 2) {
                    size_t c = row + i;
                    double acc = b[c];
                    if (i + 1 < nx) acc += cE[c] * u[c + 1];
                    if (i > 0) acc += cE[c - 1] * u[c - 1];
                    if (j + 1 < ny) acc += cN[c] * u[c + nx];
                    if (j > 0) acc += cN[c - nx] * u[c - nx];
                    u[c] = acc / diag[c];
                }
            }
        }
    }

    MgLevel coarsen() const {
        MgLevel c;
        c.nx = (nx + 1) / 2;
        c.ny = (ny + 1) / 2;
        c.diag.assign(c.size(), 0.0);
        c.cE.assign(c.size(), 0.0);
        c.cN.assign(c.size(), 0.0);
        auto cidx = [&](int i, int j) { return (size_t)j * c.nx + i; };
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                size_t f = (size_t)j * nx + i;
                size_t C = cidx(i / 2, j / 2);
                c.diag[C] += diag[f];
                if (i + 1 < nx) {
                    if ((i + 1) / 2 == i / 2) {
                        c.diag[C] -= 2.0 * cE[f];  // internal coupling
                    } else {
                        c.cE[C] += cE[f];
                    }
                }
                if (j + 1 < ny) {
                    if ((j + 1) / 2 == j / 2) {
                        c.diag[C] -= 2.0 * cN[f];
                    } else {
                        c.cN[C] += cN[f];
                    }
                }
            }
        for (size_t k = 0; k < c.size(); ++k)
            if (c.diag[k] <= 0) c.diag[k] = 1.0;
        return c;
    }
};

// Deterministic V(1,1)-cycle preconditioner (symmetric smoothing) for CG.
class MgPreconditioner {
  public:
    MgPreconditioner(MgLevel fine) {
        levels_.push_back(std::move(fine));
        while (levels_.back().size() > 2048 && levels_.back().nx > 2 && levels_.back().ny > 2)
            levels_.push_back(levels_.back().coarsen());
        for (const auto& l : levels_) {
            us_.emplace_back(l.size());
            bs_.emplace_back(l.size());
            rs_.emplace_back(l.size());
        }
    }

    void apply(const std::vector<double>& r, std::vector<double>& z) {
        bs_[0] = r;
        vcycle(0);
        z = us_[0];
    }

  private:
    void vcycle(size_t l) {
        MgLevel& L = levels_[l];
        std::vector<double>& u = us_[l];
        std::vector<double>& b = bs_[l];
        std::fill(u.begin(), u.end(), 0.0);
        if (l + 1 == levels_.size()) {
            for (int s = 0; s < 24; ++s) L.rbgs(u, b, s & 1);
            return;
        }
        L.rbgs(u, b, 0);  // pre-smooth red->black
        std::vector<double>& r = rs_[l];
        L.apply(u.data(), r.data());
        for (size_t c = 0; c < L.size(); ++c) r[c] = b[c] - r[c];
        // restrict: sum over the 2x2 children
        MgLevel& C = levels_[l + 1];
        std::vector<double>& bc = bs_[l + 1];
        std::fill(bc.begin(), bc.end(), 0.0);
        for (int j = 0; j < L.ny; ++j)
            for (int i = 0; i < L.nx; ++i)
                bc[(size_t)(j / 2) * C.nx + (i / 2)] += r[(size_t)j * L.nx + i];
        vcycle(l + 1);
        // prolong and correct
        std::vector<double>& uc = us_[l + 1];
        for (int j = 0; j < L.ny; ++j)
            for (int i = 0; i < L.nx; ++i)
                u[(size_t)j * L.nx + i] += uc[(size_t)(j / 2) * C.nx + (i / 2)];
        L.rbgs(u, b, 1);  // post-smooth black->red (symmetric cycle)
    }

    std::vector<MgLevel> levels_;
    std::vector<std::vector<double>> us_, bs_, rs_;
};

inline double GridProblem::solve(double cg_tol, long max_iter, long* iters_out,
                                 const GridProblem* coarse, const std::vector<double>* coarse_u,
                                 std::vector<double>* u_out) const {
    size_t n = diag_.size();
    std::vector<double> u(n, 0.0), r(n), z(n), p(n), ap(n);
    if (coarse && coarse_u) {
        // piecewise-constant prolongation as the initial guess
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i) {
                int pi = std::min(i / 2, coarse->nx_ - 1);
                int pj = std::min(j / 2, coarse->ny_ - 1);
                u[(size_t)j * nx_ + i] = (*coarse_u)[(size_t)pj * coarse->nx_ + pi];
            }
        for (size_t c = 0; c < n; ++c)
            if (!interior_[c]) u[c] = 0.0;
    }

    MgLevel fine;
    fine.nx = nx_;
    fine.ny = ny_;
    fine.diag = diag_;
    fine.cE.assign(n, 0.0);
    fine.cN.assign(n, 0.0);
    for (size_t c = 0; c < n; ++c) {
        fine.cE[c] = wE_[c];
        fine.cN[c] = wN_[c];
    }
    bool use_mg = n > 32768;
    std::optional<MgPreconditioner> mg;
    if (use_mg) mg.emplace(std::move(fine));

    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
        const double* xp = x.data();
        double* op = out.data();
        const double* dg = diag_.data();
        const std::uint8_t* we = wE_.data();
        const std::uint8_t* wn = wN_.data();
        const int nx = nx_;
        for (int j = 0; j < ny_; ++j) {
            size_t row = (size_t)j * nx;
            for (int i = 0; i < nx; ++i) {
                size_t c = row + i;
                double acc = dg[c] * xp[c];
                if (i + 1 < nx) acc -= double(we[c]) * xp[c + 1];
                if (i > 0) acc -= double(we[c - 1]) * xp[c - 1];
                if (j + 1 < ny_) acc -= double(wn[c]) * xp[c + nx];
                if (j > 0) acc -= double(wn[c - nx]) * xp[c - nx];
                op[c] = acc;
            }
        }
    };
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b2) {
        double s = 0;
        for (size_t c = 0; c < n; ++c) s += a[c] * b2[c];
        return s;
    };
    auto precondition = [&](const std::vector<double>& rr, std::vector<double>& zz) {
        if (mg) {
            mg->apply(rr, zz);
        } else {
            for (size_t c = 0; c < n; ++c) zz[c] = rr[c] / diag_[c];
        }
    };

    apply(u, ap);
    double bnorm = 0;
    for (size_t c = 0; c < n; ++c) {
        r[c] = b_[c] - ap[c];
        bnorm += b_[c] * b_[c];
    }
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0) bnorm = 1;
    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    long it = 0;
    double rnorm = std::sqrt(dot(r, r));
    while (rnorm > cg_tol * bnorm) {
        if (++it > max_iter) throw solver_error("grid CG did not converge");
        apply(p, ap);
        double pap = dot(p, ap);
        if (pap <= 0) break;  // numerically singular direction; u is optimal
        double alpha = rz / pap;
        for (size_t c = 0; c < n; ++c) u[c] += alpha * p[c];
        for (size_t c = 0; c < n; ++c) r[c] -= alpha * ap[c];
        precondition(r, z);
        double rz2 = dot(r, z);
        double beta = rz2 / rz;
        rz = rz2;
        for (size_t c = 0; c < n; ++c) p[c] = z[c] + beta * p[c];
        rnorm = std::sqrt(dot(r, r));
    }
    if (iters_out) *iters_out = it;

    // energy by fixed-order face summation
    double energy = 0;
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) {
            size_t c = (size_t)j * nx_ + i;
            if (!interior_[c]) continue;
            if (wE_[c]) { double d = u[c + 1] - u[c]; energy += d * d; }
            if (wN_[c]) { double d = u[c + nx_] - u[c]; energy += d * d; }
        }
    for (const auto& df : dir_) {
        double d = u[df.cell] - df.value;
        energy += 2.0 * d * d;
    }
    if (u_out) *u_out = std::move(u);
    return energy;
}

inline double min_feature_gap(const SlitDomain& dom) {
    std::vector<Dyadic> xs, ys;
    for (const auto& p : dom.outer()) { xs.push_back(p.x); ys.push_back(p.y); }
    for (const auto& s : dom.slits()) {
        if (s.vertical) { xs.push_back(s.line()); ys.push_back(s.lo()); ys.push_back(s.hi()); }
        else { ys.push_back(s.line()); xs.push_back(s.lo()); xs.push_back(s.hi()); }
    }
    auto mingap = [](std::vector<Dyadic>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        Dyadic best(0);
        bool have = false;
        for (size_t i = 0; i + 1 < v.size(); ++i) {
            Dyadic g = v[i + 1] - v[i];
            if (!have || g < best) { best = g; have = true; }
        }
        return have ? best : Dyadic(1);
    };
    Dyadic gx = mingap(xs), gy = mingap(ys);
    return std::min(gx, gy).value();
}

}  // namespace detail

// Conformal modulus of the family of curves connecting e and f inside dom, as
// the Dirichlet energy of the mixed boundary value problem (u = 0 on e, 1 on
// f, insulated elsewhere). Solves a nested sequence of grids (4h, 2h, h),
// Richardson-extrapolates with the observed order, and solves the conjugate
// problem for the reciprocity check when the complement has two components.
inline ModulusResult grid_modulus(const SlitDomain& dom, const BoundarySet& e,
                                  const BoundarySet& f, Dyadic h, GridOptions opt = {});

namespace detail {
inline double solve_levels(const SlitDomain& dom, const BoundarySet& e, const BoundarySet& f,
                           Dyadic h, const GridOptions& opt, std::vector<double>& values,
                           std::vector<double>& hs, long* iters_fine) {
    // coarse-to-fine with prolongated initial guesses; a coarse level is
    // skipped when the geometry does not sit on its grid
    std::optional<GridProblem> prev;
    std::vector<double> prev_u;
    double finest = 0;
    for (int l = opt.levels - 1; l >= 0; --l) {
        Dyadic hl = h * Dyadic(std::int64_t(1) << l);
        std::optional<GridProblem> prob;
        try {
            prob.emplace(dom, e, f, hl);
        } catch (const resolution_error&) {
            if (l == 0) throw;
            continue;
        }
        long iters = 0;
        std::vector<double> u;
        double v = prob->solve(opt.cg_tol, opt.max_iterations, &iters,
                               prev ? &*prev : nullptr, prev ? &prev_u : nullptr, &u);
        values.push_back(v);
        hs.push_back(hl.value());
        prev = std::move(prob);
        prev_u = std::move(u);
        finest = v;
        if (l == 0 && iters_fine) *iters_fine = iters;
    }
    return finest;
}

inline void richardson(const std::vector<double>& values, ModulusResult& res) {
    size_t m = values.size();
    res.extrapolated = values.back();
    res.error_bar = 0;
    res.observed_order = 0;
    if (m < 2) { res.error_bar = 1e-8 * std::max(1.0, values.back()); return; }
    double d1 = values[m - 1] - values[m - 2];
    if (std::abs(d1) < 1e-9 * std::max(1.0, std::abs(values.back()))) {
        res.extrapolated = values.back();
        res.error_bar = 2e-9 * std::max(1.0, std::abs(values.back()));
        return;
    }
    double p = 1.0;
    if (m >= 3) {
        double d2 = values[m - 2] - values[m - 3];
        if (d1 * d2 > 0) {
            p = std::log2(d2 / d1);
            p = std::clamp(p, 0.5, 2.5);
            res.observed_order = p;
        }
    }
    double corr = d1 / (std::pow(2.0, p) - 1.0);
    res.extrapolated = values.back() + corr;
    res.error_bar = 1.5 * std::abs(corr) + 1e-9 * std::max(1.0, std::abs(values.back()));
}
}  // namespace detail

inline ModulusResult grid_modulus(const SlitDomain& dom, const BoundarySet& e,
                                  const BoundarySet& f, Dyadic h, GridOptions opt) {
    if (e.empty() || f.empty()) throw invalid_parameter("grid_modulus: empty boundary set");
    if (e.overlaps(f)) throw invalid_parameter("grid_modulus: boundary sets overlap");
    double gap = detail::min_feature_gap(dom);
    if (h.value() > gap / 2 + 1e-15)
        throw resolution_error("grid_modulus: h exceeds half the minimum feature separation");

    ModulusResult res;
    res.h = h.value();
    std::vector<double> values, hs;
    res.value = detail::solve_levels(dom, e, f, h, opt, values, hs, &res.iterations);
    detail::richardson(values, res);

    if (opt.conjugate) {
        try {
            auto comps = boundary_complement(dom, e, f);
            std::vector<const BoundarySet*> live;
            for (const auto& c : comps)
                if (!c.empty()) live.push_back(&c);
            if (live.size() == 2) {
                GridOptions copt = opt;
                copt.conjugate = false;
                std::vector<double> cv, ch;
                long it2 = 0;
                double conj = detail::solve_levels(dom, *live[0], *live[1], h, copt, cv, ch, &it2);
                ModulusResult cres;
                detail::richardson(cv, cres);
                res.reciprocity_gap = std::abs(res.extrapolated * cres.extrapolated - 1.0);
            }
        } catch (const invalid_parameter&) {
            // no prime-end cycle (free slits): reciprocity unavailable
        }
    }
    return res;
}

}  // namespace extremal_rays
