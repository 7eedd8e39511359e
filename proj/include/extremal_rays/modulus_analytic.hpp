#pragma once

#include <cmath>
#include <numbers>

#include "geodesics.hpp"
#include "errors.hpp"

namespace extremal_rays {

namespace detail {
// arithmetic-geometric mean; K(k) = pi / (2 AGM(1, k')), K'(k) = pi / (2 AGM(1, k))
inline double agm(double a, double b) {
    for (int i = 0; i < 80 && std::abs(a - b) > 1e-17 * a; ++i) {
        double am = 0.5 * (a + b);
        double gm = std::sqrt(a * b);
        a = am;
        b = gm;
    }
    return 0.5 * (a + b);
}

// modulus of the quadrilateral with cross ratio cr (> 1): the elliptic
// quarter-period ratio K'(k) / (2 K(k)) at (1+k)^2 / (4k) = cr
inline double box_modulus_from_cr(double cr) {
    if (!(cr > 1.0)) {
        if (cr == 1.0) return 0.0;
        throw invalid_parameter("box modulus: cross ratio must be > 1");
    }
    // k = 2 cr - 1 - 2 sqrt(cr (cr - 1)), the root in (0, 1); rewritten to
    // avoid cancellation for large cr
    double k = 1.0 / (2.0 * cr - 1.0 + 2.0 * std::sqrt(cr * (cr - 1.0)));
    double kp = std::sqrt((1.0 - k) * (1.0 + k));
    return agm(1.0, kp) / (2.0 * agm(1.0, k));
}

// inverse: cross ratio whose box modulus equals m (bisection on the strictly
// decreasing k -> K'/(2K))
inline double cr_from_box_modulus(double m) {
    if (!(m > 0)) throw invalid_parameter("box modulus inversion: m must be positive");
    double lo = -700, hi = -1e-14;  // log k
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double k = std::exp(mid);
        double kp = std::sqrt(std::max(0.0, (1.0 - k) * (1.0 + k)));
        double val = agm(1.0, kp) / (2.0 * agm(1.0, k));
        if (val > m)
            lo = mid;  // k too small -> modulus too large
        else
            hi = mid;
    }
    double k = std::exp(0.5 * (lo + hi));
    return (1.0 + k) * (1.0 + k) / (4.0 * k);
}
}  // namespace detail

// Modulus of the family of curves in the disk connecting the arc [a,b] to the
// arc [c,d], via the boundary cross ratio and the elliptic quarter-period
// ratio. The four-fold symmetric box (1, i, -1, -i) gives exactly 1.
inline double disk_box_modulus(const GeodesicBox& box) {
    return detail::box_modulus_from_cr(box.cross_ratio());
}

// Relative-distance upper bound pi (1 + 1/(2 Delta))^2 for the modulus of the
// family connecting two continua in the plane.
inline double reldist_bound(double dist, double diam_e, double diam_f) {
    double mindiam = std::min(diam_e, diam_f);
    if (!(mindiam > 0)) throw invalid_parameter("reldist_bound: zero diameter");
    if (!(dist > 0)) throw invalid_parameter("reldist_bound: sets must be disjoint");
    double delta = dist / mindiam;
    double t = 1.0 + 1.0 / (2.0 * delta);
    return std::numbers::pi * t * t;
}

inline double reldist_bound_from_delta(double delta) {
    if (!(delta > 0)) throw invalid_parameter("reldist_bound: Delta must be positive");
    double t = 1.0 + 1.0 / (2.0 * delta);
    return std::numbers::pi * t * t;
}

// Two-sided bounds c/a <= mod Gamma_N <= c/a + 1/(2N) for the slit rectangle
// family connecting the low vertical edge pieces of D_N.
inline std::pair<double, double> slit_bounds(double a, double b, double c, int N) {
    if (!(a > 0) || !(b > 0) || !(c > 0) || !(c < b) || N < 1)
        throw invalid_parameter("slit_bounds: need 0 < c < b, a > 0, N >= 1");
    double lower = c / a;
    return {lower, lower + 1.0 / (2.0 * N)};
}

// Gap mod(Gamma_box) - L(box)/pi - (2/pi) log 4; tends to zero as the box
// degenerates (modulus to infinity).
inline double mod_liouville_gap(const GeodesicBox& box) {
    return disk_box_modulus(box) - box.liouville() / std::numbers::pi -
           (2.0 / std::numbers::pi) * std::log(4.0);
}

// The same gap evaluated on the exact cross-ratio parameterization; used for
// strongly degenerate boxes whose angles would lose precision.
inline double mod_liouville_gap_from_cr(double cr) {
    return detail::box_modulus_from_cr(cr) - std::log(cr) / std::numbers::pi -
           (2.0 / std::numbers::pi) * std::log(4.0);
}

}  // namespace extremal_rays
