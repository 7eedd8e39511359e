#include <catch2/catch_amalgamated.hpp>

#include <extremal_rays/qd.hpp>
#include <extremal_rays/trace.hpp>

#include <numbers>

using namespace extremal_rays;
using Catch::Approx;

static PolynomialQD qd_of(std::vector<Complex> c) { return PolynomialQD(std::move(c)); }

TEST_CASE("constant differential traces vertical chords") {
    PolynomialQD one = qd_of({{1, 0}});
    Trajectory t = trace_vertical(one, {0.2, 0});
    REQUIRE(t.both_boundary());
    double chord = 2 * std::sqrt(1 - 0.2 * 0.2);
    CHECK(t.phi_length == Approx(chord).margin(1e-5));
    auto [a, b] = endpoint_pair(t);
    // endpoints (0.2, +-sqrt(1-0.04)): angles +-acos-ish around +-pi/2
    double want_top = std::atan2(std::sqrt(1 - 0.04), 0.2);
    CHECK(a == Approx(want_top).margin(1e-5));
    CHECK(b == Approx(2 * std::numbers::pi - want_top).margin(1e-5));
    // the path stays on Re z = 0.2
    for (const auto& z : t.points) CHECK(z.real() == Approx(0.2).margin(1e-9));
}

TEST_CASE("diameter trajectory of phi=1 lands at -i, i") {
    PolynomialQD one = qd_of({{1, 0}});
    Trajectory t = trace_vertical(one, {0, 0});
    auto [a, b] = endpoint_pair(t);
    CHECK(a == Approx(std::numbers::pi / 2).margin(1e-6));
    CHECK(b == Approx(3 * std::numbers::pi / 2).margin(1e-6));
    CHECK(t.phi_length == Approx(2.0).margin(1e-6));
}

TEST_CASE("budget truncates at the stated phi-length") {
    PolynomialQD one = qd_of({{1, 0}});
    Trajectory t = trace_vertical(one, {0, 0}, 0.5);
    CHECK(t.truncated());
    CHECK(t.phi_length == Approx(1.0).margin(1e-6));  // 0.5 each way
    CHECK_THROWS_AS(endpoint_pair(t), not_full_trajectory);
}

TEST_CASE("seed validation") {
    PolynomialQD one = qd_of({{1, 0}});
    CHECK_THROWS_AS(trace_vertical(one, {1.5, 0}), invalid_parameter);
    PolynomialQD z = qd_of({{0, 0}, {1, 0}});
    CHECK_THROWS_AS(trace_vertical(z, {0, 0}), invalid_parameter);
}

// Oracle for phi(z) = z: w = (2/3) z^{3/2} maps the trajectory through
// x0 > 0 to the vertical line Re w = (2/3) x0^{3/2}; it exits the disk where
// |w| = 2/3, i.e. at z = ((3/2) w)^{2/3} with angles +-(2/3) arg((3/2) w).
TEST_CASE("phi(z)=z trajectory matches the w-model") {
    PolynomialQD z = qd_of({{0, 0}, {1, 0}});
    double x0 = 0.5;
    Trajectory t = trace_vertical(z, {x0, 0});
    REQUIRE(t.both_boundary());

    double w0 = (2.0 / 3.0) * std::pow(x0, 1.5);
    double wim = std::sqrt(4.0 / 9.0 - w0 * w0);
    Complex w_end(w0, wim);
    double theta = (2.0 / 3.0) * std::arg(1.5 * w_end);
    auto [a, b] = endpoint_pair(t);
    CHECK(a == Approx(theta).margin(2e-4));
    CHECK(b == Approx(2 * std::numbers::pi - theta).margin(2e-4));
    // symmetric about the real axis, both endpoints in the right half circle
    CHECK(theta < std::numbers::pi / 2);

    // phi-length oracle: the vertical line from w0 - i wim to w0 + i wim
    CHECK(t.phi_length == Approx(2 * wim).margin(2e-4));
}

TEST_CASE("verticality residual: natural parameter has constant real part") {
    PolynomialQD z = qd_of({{0, 0}, {1, 0}});
    Trajectory t = trace_vertical(z, {0.5, 0});
    REQUIRE(t.points.size() > 10);
    // integrate sqrt(phi) along the traced polyline; the real part must stay
    // put within 1e-6 per unit phi-length
    Complex w = natural_parameter(z, t.points.front(), t.points);
    CHECK(std::abs(w.real()) / std::max(1.0, t.phi_length) < 1e-6);
    CHECK(std::abs(w.imag()) == Approx(t.phi_length).epsilon(1e-4));
}

TEST_CASE("trajectories near a zero stop with a zero end") {
    PolynomialQD z = qd_of({{0, 0}, {1, 0}});
    // the critical vertical rays of z dz^2 leave the zero at arguments
    // pi/3, pi, 5pi/3; a seed on one of them traces into the zero
    Complex z0 = 0.4 * std::polar(1.0, std::numbers::pi / 3);
    Trajectory t = trace_vertical(z, z0);
    bool hits_zero = t.end_a.kind == TrajectoryEnd::Kind::zero ||
                     t.end_b.kind == TrajectoryEnd::Kind::zero;
    CHECK(hits_zero);
}

TEST_CASE("endpoint distinctness for full traces") {
    PolynomialQD p = qd_of({{0.5, 0.2}, {0.1, 0}, {1, 0}});
    for (double x : {-0.6, -0.2, 0.1, 0.45, 0.7}) {
        Trajectory t = trace_vertical(p, {x, 0.05});
        if (!t.both_boundary()) continue;
        auto [a, b] = endpoint_pair(t);
        CHECK(std::abs(a - b) > 1e-6);
    }
}

TEST_CASE("projective invariance of the traced path under phi -> 4 phi") {
    PolynomialQD p = qd_of({{0.3, 0.1}, {0.2, 0}, {1, 0}});
    PolynomialQD p4 = qd_of({{1.2, 0.4}, {0.8, 0}, {4, 0}});
    TraceOptions opt;
    opt.record_path = false;
    Trajectory t1 = detail::trace_impl(p, {0.3, 0.1}, TrajectoryKind::vertical, opt);
    Trajectory t4 = detail::trace_impl(p4, {0.3, 0.1}, TrajectoryKind::vertical, opt);
    REQUIRE(t1.both_boundary());
    REQUIRE(t4.both_boundary());
    // bitwise identical paths, phi-length exactly doubled
    CHECK(t1.end_a.angle == t4.end_a.angle);
    CHECK(t1.end_b.angle == t4.end_b.angle);
    CHECK(t4.phi_length == 2.0 * t1.phi_length);
}

TEST_CASE("horizontal trace of phi=1 is a horizontal chord") {
    PolynomialQD one = qd_of({{1, 0}});
    Trajectory t = trace_horizontal(one, {0, 0.3});
    REQUIRE(t.both_boundary());
    for (const auto& z : t.points) CHECK(z.imag() == Approx(0.3).margin(1e-9));
}
