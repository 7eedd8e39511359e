#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "qd.hpp"

namespace extremal_rays {

struct TrajectoryEnd {
    enum class Kind { boundary, zero, truncated };
    Kind kind = Kind::truncated;
    Complex point{0, 0};   // boundary point on S^1, the zero hit, or the last trace point
    double angle = 0;      // arg(point) for boundary ends
};

enum class TrajectoryKind { vertical, horizontal };

// A traced trajectory of a polynomial quadratic differential on the disk.
// points runs from end_a to end_b (end_a is the backward direction from the
// seed). phi_length is the total length in the |sqrt(phi)||dz| metric; when
// either end is truncated the true length exceeds it and the trajectory is an
// infinite-length candidate.
struct Trajectory {
    std::vector<Complex> points;
    double phi_length = 0;
    TrajectoryEnd end_a, end_b;
    TrajectoryKind kind = TrajectoryKind::vertical;
    Complex seed{0, 0};

    bool truncated() const {
        return end_a.kind == TrajectoryEnd::Kind::truncated ||
               end_b.kind == TrajectoryEnd::Kind::truncated;
    }
    bool both_boundary() const {
        return end_a.kind == TrajectoryEnd::Kind::boundary &&
               end_b.kind == TrajectoryEnd::Kind::boundary;
    }
};

struct TraceOptions {
    double budget = 1e3;        // max phi-length traced per direction
    double boundary_eps = 1e-6; // |z| > 1 - boundary_eps ends at S^1
    double zero_eps = 1e-6;     // distance to a zero that ends the trace
    double step_tol = 1e-12;    // RK local error target per step
    double max_record_step = 1e-2;
    bool record_path = true;
};

namespace detail {
// sqrt(phi(z)) with the sign nearest ref (valid while arg(phi) moved < pi)
inline Complex sqrt_near(const PolynomialQD& qd, Complex z, Complex ref) {
    Complex w = std::sqrt(qd.eval(z));
    return (std::norm(w + ref) > std::norm(w - ref)) ? w : -w;
}

// Trajectories are integrated in Euclidean arc length: the direction field
// i conj(s)/|s| (s = branch-tracked sqrt(phi)) is invariant under phi -> c phi
// for c > 0, so the traced path of c phi is bitwise the path of phi and only
// the separately accumulated phi-length scales. That makes the projective
// invariance of mu exact rather than approximate.
struct DirectionField {
    const PolynomialQD& qd;
    double sign;  // +1 / -1: the two ends of the line field
    bool horizontal;

    Complex operator()(Complex z, Complex ref) const {
        Complex s = sqrt_near(qd, z, ref);
        double m = std::abs(s);
        Complex u = horizontal ? std::conj(s) / m : Complex(0, 1) * std::conj(s) / m;
        return sign * u;
    }
};

struct RayResult {
    std::vector<Complex> points;  // excludes the seed
    double phi_len = 0;
    TrajectoryEnd end;
};

inline RayResult trace_ray(const PolynomialQD& qd, Complex z0, const DirectionField& field,
                           const TraceOptions& opt) {
    RayResult out;
    Complex z = z0;
    Complex ref = std::sqrt(qd.eval(z0));
    double t_phi = 0;
    double h = 1e-3;  // Euclidean step
    const double h_min = 1e-13;
    bool has_zeros = !qd.zeros().empty();
    long steps = 0;

    auto rk4 = [&](Complex zc, Complex refc, double hc, Complex* ref_end) {
        Complex k1 = field(zc, refc);
        Complex r1 = sqrt_near(qd, zc + 0.5 * hc * k1, refc);
        Complex k2 = field(zc + 0.5 * hc * k1, r1);
        Complex r2 = sqrt_near(qd, zc + 0.5 * hc * k2, refc);
        Complex k3 = field(zc + 0.5 * hc * k2, r2);
        Complex r3 = sqrt_near(qd, zc + hc * k3, refc);
        Complex k4 = field(zc + hc * k3, r3);
        Complex zn = zc + (hc / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        *ref_end = sqrt_near(qd, zn, r3);
        return zn;
    };

    while (true) {
        if (++steps > 2000000) throw solver_error("trace_ray: step limit exceeded");
        double speed = std::abs(ref);  // d(phi-length)/d(arc-length)
        double budget_left = opt.budget - t_phi;
        if (budget_left <= 1e-12 * (1 + opt.budget) || budget_left / speed < h_min) {
            out.end = {TrajectoryEnd::Kind::truncated, z, std::arg(z)};
            return out;
        }
        h = std::min({h, opt.max_record_step, 1.0000001 * budget_left / speed});
        // one full step vs two half steps
        Complex ref_full, ref_half, ref_mid;
        Complex z_full = rk4(z, ref, h, &ref_full);
        Complex z_mid = rk4(z, ref, h / 2, &ref_mid);
        Complex z_half = rk4(z_mid, ref_mid, h / 2, &ref_half);
        double err = std::abs(z_full - z_half);
        // branch guard: phi may not swing more than pi/4 across the step
        double swing = 0;
        Complex pa = qd.eval(z), pb = qd.eval(z_half);
        if (pa != Complex(0, 0) && pb != Complex(0, 0)) swing = std::abs(std::arg(pb / pa));
        if ((err > opt.step_tol || swing > std::numbers::pi / 4) && h > h_min) {
            h *= 0.5;
            continue;
        }
        // boundary landing: when the step exits the guard band, bisect the
        // step size so the endpoint sits just past 1 - boundary_eps instead
        // of overshooting by a whole step
        if (std::abs(z_half) > 1.0 - opt.boundary_eps && h > 16 * h_min) {
            double lo = 0, hi = h;
            for (int b = 0; b < 48 && (hi - lo) > h_min; ++b) {
                double mid2 = 0.5 * (lo + hi);
                Complex rtmp;
                Complex zm = rk4(z, ref, mid2, &rtmp);
                if (std::abs(zm) > 1.0 - opt.boundary_eps)
                    hi = mid2;
                else
                    lo = mid2;
            }
            Complex rh, rm, rq;
            Complex zm = rk4(z, ref, hi / 2, &rm);
            z_half = rk4(zm, rm, hi / 2, &rh);
            ref_mid = rm;
            ref_half = rh;
            (void)rq;
            h = hi;
        }
        // phi-length increment by Simpson along the step (scales exactly
        // under phi -> c phi since every |s| does)
        double inc = (h / 6.0) * (std::abs(ref) + 4.0 * std::abs(ref_mid) + std::abs(ref_half));
        z = z_half;
        ref = ref_half;
        t_phi += inc;
        if (opt.record_path) out.points.push_back(z);
        out.phi_len = t_phi;
        if (std::abs(z) > 1.0 - opt.boundary_eps) {
            Complex bp = z / std::abs(z);
            out.end = {TrajectoryEnd::Kind::boundary, bp, std::arg(bp)};
            return out;
        }
        if (has_zeros) {
            double d = qd.min_distance_to_zero(z);
            if (d < opt.zero_eps) {
                out.end = {TrajectoryEnd::Kind::zero, z, std::arg(z)};
                return out;
            }
            // keep steps below a quarter of the zero distance
            h = std::min(h * 1.6, std::max(0.25 * d, 1e-6));
        } else {
            h *= 1.6;
        }
    }
}

inline Trajectory trace_impl(const PolynomialQD& qd, Complex z0, TrajectoryKind kind,
                             const TraceOptions& opt) {
    if (std::abs(z0) >= 1.0) throw invalid_parameter("trace: seed outside the open disk");
    if (qd.eval(z0) == Complex(0, 0)) throw invalid_parameter("trace: seed is a zero of phi");
    bool horizontal = kind == TrajectoryKind::horizontal;
    RayResult down = trace_ray(qd, z0, DirectionField{qd, -1.0, horizontal}, opt);
    RayResult up = trace_ray(qd, z0, DirectionField{qd, +1.0, horizontal}, opt);
    Trajectory traj;
    traj.kind = kind;
    traj.seed = z0;
    traj.phi_length = down.phi_len + up.phi_len;
    traj.end_a = down.end;
    traj.end_b = up.end;
    if (opt.record_path) {
        traj.points.reserve(down.points.size() + up.points.size() + 1);
        for (auto it = down.points.rbegin(); it != down.points.rend(); ++it) traj.points.push_back(*it);
        traj.points.push_back(z0);
        for (const auto& p : up.points) traj.points.push_back(p);
    } else {
        traj.points = {z0};
    }
    return traj;
}
}  // namespace detail

inline Trajectory trace_vertical(const PolynomialQD& qd, Complex z0, double budget = 1e3) {
    TraceOptions opt;
    opt.budget = budget;
    return detail::trace_impl(qd, z0, TrajectoryKind::vertical, opt);
}

inline Trajectory trace_vertical(const PolynomialQD& qd, Complex z0, const TraceOptions& opt) {
    return detail::trace_impl(qd, z0, TrajectoryKind::vertical, opt);
}

inline Trajectory trace_horizontal(const PolynomialQD& qd, Complex z0, double budget = 1e3) {
    TraceOptions opt;
    opt.budget = budget;
    return detail::trace_impl(qd, z0, TrajectoryKind::horizontal, opt);
}

// Boundary endpoint pair of a fully traced trajectory, as angles normalized
// to [0, 2pi) with the smaller angle first.
inline std::pair<double, double> endpoint_pair(const Trajectory& traj) {
    if (!traj.both_boundary())
        throw not_full_trajectory("endpoint_pair: trajectory has a non-boundary end");
    auto norm = [](double a) {
        double t = std::fmod(a, 2 * std::numbers::pi);
        return t < 0 ? t + 2 * std::numbers::pi : t;
    };
    double a = norm(traj.end_a.angle), b = norm(traj.end_b.angle);
    if (a > b) std::swap(a, b);
    return {a, b};
}

}  // namespace extremal_rays
