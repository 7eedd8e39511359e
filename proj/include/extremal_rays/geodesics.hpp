#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <numbers>

#include "errors.hpp"

namespace extremal_rays {

inline double wrap_angle(double a) {
    double t = std::fmod(a, 2 * std::numbers::pi);
    return t < 0 ? t + 2 * std::numbers::pi : t;
}

// Box of geodesics [a,b] x [c,d]: the geodesics with one endpoint in the
// circle arc [a,b] and the other in [c,d]. Angles are stored normalized with
// b, c, d following a counterclockwise within one turn. Arc membership is
// half-open ([a,b) x [c,d)) so partitions of a box are exactly additive.
class GeodesicBox {
  public:
    GeodesicBox(double a, double b, double c, double d) {
        a_ = wrap_angle(a);
        auto lift = [&](double prev, double t) {
            t = wrap_angle(t);
            while (t <= prev + 1e-15) t += 2 * std::numbers::pi;
            return t;
        };
        b_ = lift(a_, b);
        c_ = lift(b_, c);
        d_ = lift(c_, d);
        if (d_ - a_ >= 2 * std::numbers::pi)
            throw invalid_parameter("GeodesicBox: points not in counterclockwise order");
        liouville_ = compute_liouville();
        if (!(liouville_ > 0)) throw invalid_parameter("GeodesicBox: degenerate box");
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double d() const { return d_; }
    double liouville() const { return liouville_; }
    double cross_ratio() const { return std::exp(liouville_); }

    // Is the unordered geodesic {alpha, beta} in the box?
    bool contains(double alpha, double beta) const {
        return (in_ab(alpha) && in_cd(beta)) || (in_ab(beta) && in_cd(alpha));
    }

  private:
    bool in_arc(double lo, double hi, double t) const {
        double x = wrap_angle(t);
        double base = wrap_angle(lo);
        double span = hi - lo;
        double off = x - base;
        if (off < 0) off += 2 * std::numbers::pi;
        return off < span;  // half-open [lo, hi)
    }
    bool in_ab(double t) const { return in_arc(a_, b_, t); }
    bool in_cd(double t) const { return in_arc(c_, d_, t); }

    double compute_liouville() const {
        // log of the boundary cross ratio (a-c)(b-d) / ((a-d)(b-c)) with the
        // points as complex numbers; the phases cancel so the sine form is
        // exact and stable
        double s_ac = std::sin((a_ - c_) / 2), s_bd = std::sin((b_ - d_) / 2);
        double s_ad = std::sin((a_ - d_) / 2), s_bc = std::sin((b_ - c_) / 2);
        return std::log((s_ac * s_bd) / (s_ad * s_bc));
    }

    double a_, b_, c_, d_;
    double liouville_;
};

inline double liouville(const GeodesicBox& box) { return box.liouville(); }

// Liouville measure of [a0,a1] x [b0,b1] for disjoint arcs, by the same
// cross-ratio formula (the measure of the ordered box).
inline double liouville_mass(double a0, double a1, double b0, double b1) {
    double s_ac = std::sin((a0 - b0) / 2), s_bd = std::sin((a1 - b1) / 2);
    double s_ad = std::sin((a0 - b1) / 2), s_bc = std::sin((a1 - b0) / 2);
    return std::log((s_ac * s_bd) / (s_ad * s_bc));
}

// Disk Moebius transform g(z) = e^{i theta} (z - w) / (1 - conj(w) z).
struct MoebiusDisk {
    double theta = 0;
    std::complex<double> w{0, 0};

    std::complex<double> operator()(std::complex<double> z) const {
        return std::polar(1.0, theta) * (z - w) / (1.0 - std::conj(w) * z);
    }
    double boundary(double angle) const {
        return std::arg((*this)(std::polar(1.0, angle)));
    }
    GeodesicBox transport(const GeodesicBox& box) const {
        return GeodesicBox(boundary(box.a()), boundary(box.b()), boundary(box.c()),
                           boundary(box.d()));
    }
};

// The standard box (1, i, -1, -i): Liouville measure log 2, modulus 1.
inline GeodesicBox standard_box() {
    return GeodesicBox(0, std::numbers::pi / 2, std::numbers::pi, 3 * std::numbers::pi / 2);
}

// splitmix64: the deterministic per-index generator used for reproducible
// box sampling
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
inline double uniform01(std::uint64_t x) { return double(x >> 11) * 0x1.0p-53; }

// Deterministic Moebius transport for sample index i under a fixed seed;
// |w| <= 0.5 keeps boundary distortion bounded so sampled boxes stay
// resolvable by discretized currents.
inline MoebiusDisk sampled_transport(std::uint64_t seed, std::uint64_t i) {
    std::uint64_t s1 = splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    std::uint64_t s2 = splitmix64(s1);
    std::uint64_t s3 = splitmix64(s2);
    double theta = 2 * std::numbers::pi * uniform01(s1);
    double r = 0.5 * std::sqrt(uniform01(s2));
    double psi = 2 * std::numbers::pi * uniform01(s3);
    return MoebiusDisk{theta, std::polar(r, psi)};
}

// The log-2 box with both arcs of equal width centered on the geodesic
// (alpha, beta): solve sin^2(d/2) / (sin(d/2 - t) sin(d/2 + t)) = 2 for the
// half-width t. Returns nothing when the box would be too thin to resolve.
inline std::optional<GeodesicBox> anchored_log2_box(double alpha, double beta,
                                                    double t_floor = 0.1) {
    double a = wrap_angle(alpha), b = wrap_angle(beta);
    double d = std::abs(a - b);
    d = std::min(d, 2 * std::numbers::pi - d);
    if (d <= 2 * t_floor) return std::nullopt;
    // L(t) = log( sin^2(d/2) / (sin^2(d/2) - sin^2(t)) ), increasing in t
    double s2 = std::sin(d / 2) * std::sin(d / 2);
    double target = s2 * (1.0 - 0.5);  // sin^2(t) with cross ratio 2
    double t = std::asin(std::sqrt(target));
    if (t < t_floor) return std::nullopt;
    return GeodesicBox(a - t, a + t, b - t, b + t);
}

}  // namespace extremal_rays
