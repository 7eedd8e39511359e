#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "slit_domain.hpp"

namespace extremal_rays {

using Complex = std::complex<double>;

// Polynomial holomorphic quadratic differential phi(z) = sum c_k z^k on the
// unit disk. Immutable; zeros and the L^1 norm are cached on first use.
class PolynomialQD {
  public:
    explicit PolynomialQD(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
        while (!coeffs_.empty() && coeffs_.back() == Complex(0, 0)) coeffs_.pop_back();
        if (coeffs_.empty()) throw invalid_parameter("PolynomialQD: zero polynomial");
    }

    const std::vector<Complex>& coeffs() const { return coeffs_; }
    int degree() const { return (int)coeffs_.size() - 1; }

    Complex eval(Complex z) const {
        Complex acc = coeffs_.back();
        for (int k = (int)coeffs_.size() - 2; k >= 0; --k) acc = acc * z + coeffs_[k];
        return acc;
    }

    Complex derivative(Complex z) const {
        if (coeffs_.size() < 2) return {0, 0};
        Complex acc = coeffs_.back() * double(degree());
        for (int k = (int)coeffs_.size() - 2; k >= 1; --k) acc = acc * z + coeffs_[k] * double(k);
        return acc;
    }

    // Roots inside the open unit disk with multiplicities (|root| < 1).
    const std::vector<std::pair<Complex, int>>& zeros() const;

    double min_distance_to_zero(Complex z) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& [root, mult] : zeros()) d = std::min(d, std::abs(z - root));
        return d;
    }

    double l1_norm() const;

  private:
    std::vector<Complex> coeffs_;
    mutable std::optional<std::vector<std::pair<Complex, int>>> zeros_;
    mutable std::optional<double> l1_;
};

inline Complex eval(const PolynomialQD& qd, Complex z) { return qd.eval(z); }

// ---------------------------------------------------------------------------
// Root finding: Aberth-Ehrlich on the full root set, Newton polish, then the
// disk filter and multiplicity clustering.

namespace detail {
inline std::vector<Complex> aberth_roots(const std::vector<Complex>& coeffs) {
    int n = (int)coeffs.size() - 1;
    std::vector<Complex> r(n);
    if (n == 0) return r;
    // Cauchy bound for the initial circle
    double lead = std::abs(coeffs[n]);
    double radius = 0;
    for (int k = 0; k < n; ++k) radius = std::max(radius, std::pow(std::abs(coeffs[k]) / lead, 1.0 / (n - k)));
    radius = 2 * std::max(radius, 0.5);
    for (int i = 0; i < n; ++i) {
        double theta = 2 * std::numbers::pi * (i + 0.25) / n + 0.3;
        r[i] = std::polar(radius * (0.8 + 0.2 * ((i * 7) % 5) / 4.0), theta);
    }
    auto p = [&](Complex z) {
        Complex acc = coeffs[n];
        for (int k = n - 1; k >= 0; --k) acc = acc * z + coeffs[k];
        return acc;
    };
    auto dp = [&](Complex z) {
        Complex acc = coeffs[n] * double(n);
        for (int k = n - 1; k >= 1; --k) acc = acc * z + coeffs[k] * double(k);
        return acc;
    };
    for (int iter = 0; iter < 500; ++iter) {
        double moved = 0;
        for (int i = 0; i < n; ++i) {
            Complex pi = p(r[i]);
            if (pi == Complex(0, 0)) continue;
            Complex npd = pi / dp(r[i]);
            Complex sum(0, 0);
            for (int j = 0; j < n; ++j)
                if (j != i) sum += 1.0 / (r[i] - r[j]);
            Complex delta = npd / (1.0 - npd * sum);
            r[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14 * std::max(1.0, radius)) break;
    }
    // Newton polish
    for (int i = 0; i < n; ++i)
        for (int it = 0; it < 8; ++it) {
            Complex d = dp(r[i]);
            if (std::abs(d) < 1e-300) break;
            Complex step = p(r[i]) / d;
            r[i] -= step;
            if (std::abs(step) < 1e-15) break;
        }
    return r;
}
}  // namespace detail

inline const std::vector<std::pair<Complex, int>>& PolynomialQD::zeros() const {
    if (zeros_) return *zeros_;
    std::vector<std::pair<Complex, int>> out;
    if (degree() > 0) {
        auto roots = detail::aberth_roots(coeffs_);
        std::vector<bool> taken(roots.size(), false);
        for (size_t i = 0; i < roots.size(); ++i) {
            if (taken[i] || std::abs(roots[i]) >= 1.0) continue;
            Complex center = roots[i];
            int mult = 1;
            taken[i] = true;
            for (size_t j = i + 1; j < roots.size(); ++j) {
                if (taken[j]) continue;
                if (std::abs(roots[j] - center) < 1e-8) {
                    center = (center * double(mult) + roots[j]) / double(mult + 1);
                    ++mult;
                    taken[j] = true;
                }
            }
            out.push_back({center, mult});
        }
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
            return a.first.imag() < b.first.imag();
        });
    }
    zeros_ = std::move(out);
    return *zeros_;
}

inline std::vector<std::pair<Complex, int>> zeros(const PolynomialQD& qd) { return qd.zeros(); }

// ---------------------------------------------------------------------------
// Square-root branch cursor. Keeps (sqrt value)^2 = phi(point) as the point
// moves; each move must change arg(phi) by less than pi/4 or the caller has
// to subdivide.

class BranchState {
  public:
    BranchState(const PolynomialQD& qd, Complex start) : qd_(&qd), point_(start) {
        value_ = std::sqrt(qd.eval(start));  // principal determination at the base point
        steps_ = 1;
    }

    Complex point() const { return point_; }
    Complex value() const { return value_; }
    long steps() const { return steps_; }

    // Continues sqrt(phi) to z, taking the sign nearest the current value.
    Complex advance(Complex z) {
        Complex w = std::sqrt(qd_->eval(z));
        if (std::norm(w + value_) > std::norm(w - value_))
            value_ = w;
        else
            value_ = -w;
        point_ = z;
        ++steps_;
        return value_;
    }

  private:
    const PolynomialQD* qd_;
    Complex point_;
    Complex value_;
    long steps_;
};

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {
// 16-point Gauss-Legendre nodes/weights on [-1, 1]
inline const std::array<double, 8>& gl16_x() {
    static const std::array<double, 8> x = {0.0950125098376374, 0.2816035507792589,
                                            0.4580167776572274, 0.6178762444026438,
                                            0.7554044083550030, 0.8656312023878318,
                                            0.9445750230732326, 0.9894009349916499};
    return x;
}
inline const std::array<double, 8>& gl16_w() {
    static const std::array<double, 8> w = {0.1894506104550685, 0.1826034150449236,
                                            0.1691565193950025, 0.1495959888165767,
                                            0.1246289712555339, 0.0951585116824928,
                                            0.0622535239386479, 0.0271524594117541};
    return w;
}

template <typename F>
double gl16(F&& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0;
    for (int i = 0; i < 8; ++i) {
        acc += gl16_w()[i] * (f(c - h * gl16_x()[i]) + f(c + h * gl16_x()[i]));
    }
    return acc * h;
}

template <typename F>
double adaptive_gl(F&& f, double a, double b, double rel_tol, double abs_floor, int depth = 0) {
    double whole = gl16(f, a, b);
    double mid = 0.5 * (a + b);
    double split = gl16(f, a, mid) + gl16(f, mid, b);
    if (depth >= 36 || std::abs(split - whole) <= rel_tol * std::abs(split) + abs_floor)
        return split;
    return adaptive_gl(f, a, mid, rel_tol, abs_floor / 2, depth + 1) +
           adaptive_gl(f, mid, b, rel_tol, abs_floor / 2, depth + 1);
}
}  // namespace detail

// phi-length of a polyline curve: integral of |phi|^(1/2) |dz|. Zeros on the
// curve are integrable singularities; adaptive subdivision absorbs them.
inline double phi_length(const PolynomialQD& qd, const std::vector<Complex>& polyline) {
    double total = 0;
    for (size_t i = 0; i + 1 < polyline.size(); ++i) {
        Complex z0 = polyline[i], z1 = polyline[i + 1];
        double L = std::abs(z1 - z0);
        if (L == 0) continue;
        auto f = [&](double t) { return std::sqrt(std::abs(qd.eval(z0 + t * (z1 - z0)))) * L; };
        total += detail::adaptive_gl(f, 0.0, 1.0, 1e-12, 1e-14);
    }
    return total;
}

inline double phi_length(const PolynomialQD& qd, const PolyCurve& curve) {
    std::vector<Complex> pts;
    for (const auto& p : curve.vertices()) pts.push_back({p.x, p.y});
    return phi_length(qd, pts);
}

// Natural parameter w = int sqrt(phi) dz along a polyline starting at base,
// branch continued from the principal determination at base. Gauss-Legendre
// per segment with adaptive subdivision; refuses paths that pass within the
// near-singularity guard (1e-6) of a zero.
inline Complex natural_parameter(const PolynomialQD& qd, Complex base,
                                 const std::vector<Complex>& path,
                                 BranchState* branch_out = nullptr) {
    if (path.empty() || std::abs(path.front() - base) > 1e-12)
        throw invalid_parameter("natural_parameter: path must start at base");
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        // distance from the segment to every zero
        for (const auto& [root, mult] : qd.zeros()) {
            Complex a = path[i], b = path[i + 1];
            Complex ab = b - a;
            double L2 = std::norm(ab);
            double t = L2 == 0 ? 0.0 : std::clamp(((root - a) * std::conj(ab)).real() / L2, 0.0, 1.0);
            if (std::abs(a + t * ab - root) < 1e-6)
                throw near_singularity_error("natural_parameter: path within 1e-6 of a zero of phi");
        }
    }
    BranchState branch(qd, base);
    Complex total(0, 0);

    // integrates sqrt(phi) over [t0,t1] of one segment, continuing the branch
    // through the ordered GL nodes; recursion shares the branch cursor
    struct SegIntegrator {
        const PolynomialQD& qd;
        Complex z0, dz;
        BranchState& branch;

        Complex gl(double a, double b) {
            // nodes in increasing order for branch continuity
            std::array<double, 16> ts;
            double c = 0.5 * (a + b), h = 0.5 * (b - a);
            for (int i = 0; i < 8; ++i) {
                ts[i] = c - h * detail::gl16_x()[7 - i];
                ts[8 + i] = c + h * detail::gl16_x()[i];
            }
            Complex acc(0, 0);
            for (int i = 0; i < 16; ++i) {
                double w = detail::gl16_w()[i < 8 ? 7 - i : i - 8];
                acc += w * branch.advance(z0 + ts[i] * dz);
            }
            return acc * h * dz;
        }

        Complex integrate(double a, double b, int depth) {
            // pre-walk: require small arg(phi) change across the interval
            Complex pa = qd.eval(z0 + a * dz), pm = qd.eval(z0 + 0.5 * (a + b) * dz),
                    pb = qd.eval(z0 + b * dz);
            auto argdiff = [](Complex u, Complex v) {
                if (u == Complex(0, 0) || v == Complex(0, 0)) return std::numbers::pi;
                return std::abs(std::arg(v / u));
            };
            bool wild = argdiff(pa, pm) > std::numbers::pi / 4 || argdiff(pm, pb) > std::numbers::pi / 4;
            if (!wild) {
                Complex whole = gl(a, b);
                double mid = 0.5 * (a + b);
                Complex split = gl(a, mid) + gl(mid, b);
                if (depth >= 30 || std::abs(split - whole) <= 1e-10 * std::abs(split) + 1e-15)
                    return split;
            }
            if (depth >= 30) return gl(a, b);
            double mid = 0.5 * (a + b);
            Complex left = integrate(a, mid, depth + 1);
            return left + integrate(mid, b, depth + 1);
        }
    };

    for (size_t i = 0; i + 1 < path.size(); ++i) {
        if (path[i + 1] == path[i]) continue;
        SegIntegrator seg{qd, path[i], path[i + 1] - path[i], branch};
        total += seg.integrate(0.0, 1.0, 0);
        branch.advance(path[i + 1]);
    }
    if (branch_out) *branch_out = branch;
    return total;
}

inline Complex natural_parameter(const PolynomialQD& qd, Complex base, const PolyCurve& path) {
    std::vector<Complex> pts;
    for (const auto& p : path.vertices()) pts.push_back({p.x, p.y});
    return natural_parameter(qd, base, pts);
}

// L^1 norm over the unit disk by polar adaptive quadrature: the angular
// integral is smooth between the kinks of |phi| and the radial integrand is
// piecewise analytic, so nested adaptive GL reaches 1e-8 comfortably.
inline double PolynomialQD::l1_norm() const {
    if (l1_) return *l1_;
    auto ang = [&](double r) {
        auto f = [&](double th) { return std::abs(eval(std::polar(r, th))); };
        return detail::adaptive_gl(f, 0.0, 2 * std::numbers::pi, 1e-10, 1e-13);
    };
    auto rad = [&](double r) { return r * ang(r); };
    double v = detail::adaptive_gl(rad, 0.0, 1.0, 1e-10, 1e-13);
    l1_ = v;
    return v;
}

inline double l1_norm(const PolynomialQD& qd) { return qd.l1_norm(); }

}  // namespace extremal_rays
