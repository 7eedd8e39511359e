#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "currents.hpp"
#include "grid_solver.hpp"
#include "teich_ray.hpp"
#include "trace.hpp"

namespace extremal_rays {

using nlohmann::json;

// Domain description file: coordinates as decimal strings so dyadic values
// survive a round trip exactly.
inline json to_json(const SlitDomain& dom) {
    json j;
    j["outer"] = json::array();
    for (const auto& p : dom.outer())
        j["outer"].push_back(json::array({p.x.to_decimal(), p.y.to_decimal()}));
    j["slits"] = json::array();
    for (const auto& s : dom.slits())
        j["slits"].push_back(json::array(
            {json::array({s.a.x.to_decimal(), s.a.y.to_decimal()}),
             json::array({s.b.x.to_decimal(), s.b.y.to_decimal()})}));
    return j;
}

inline SlitDomain domain_from_json(const json& j) {
    std::vector<DyPoint> outer;
    for (const auto& p : j.at("outer"))
        outer.push_back({Dyadic::parse(p.at(0).get<std::string>()),
                         Dyadic::parse(p.at(1).get<std::string>())});
    std::vector<Slit> slits;
    if (j.contains("slits"))
        for (const auto& s : j.at("slits")) {
            DyPoint a{Dyadic::parse(s.at(0).at(0).get<std::string>()),
                      Dyadic::parse(s.at(0).at(1).get<std::string>())};
            DyPoint b{Dyadic::parse(s.at(1).at(0).get<std::string>()),
                      Dyadic::parse(s.at(1).at(1).get<std::string>())};
            slits.push_back(Slit{a, b, true, false});
        }
    return SlitDomain(std::move(outer), std::move(slits));
}

inline json to_json(const PolynomialQD& qd) {
    json j;
    j["coeffs"] = json::array();
    for (const auto& c : qd.coeffs()) j["coeffs"].push_back({c.real(), c.imag()});
    return j;
}

inline PolynomialQD qd_from_json(const json& j) {
    std::vector<Complex> coeffs;
    for (const auto& c : j.at("coeffs")) coeffs.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
    return PolynomialQD(std::move(coeffs));
}

inline json to_json(const ModulusResult& m) {
    json j;
    j["value"] = m.value;
    j["h"] = m.h;
    if (m.reciprocity_gap)
        j["reciprocity_gap"] = *m.reciprocity_gap;
    else
        j["reciprocity_gap"] = nullptr;
    j["extrapolated"] = m.extrapolated;
    j["error_bar"] = m.error_bar;
    j["observed_order"] = m.observed_order;
    j["iterations"] = m.iterations;
    return j;
}

inline json to_json(const TrajectoryEnd& e) {
    json j;
    switch (e.kind) {
        case TrajectoryEnd::Kind::boundary: j["kind"] = "boundary"; break;
        case TrajectoryEnd::Kind::zero: j["kind"] = "zero"; break;
        case TrajectoryEnd::Kind::truncated: j["kind"] = "truncated"; break;
    }
    j["point"] = {e.point.real(), e.point.imag()};
    j["angle"] = e.angle;
    return j;
}

inline json trajectory_sidecar(const Trajectory& t) {
    json j;
    j["phi_length"] = t.phi_length;
    j["end_a"] = to_json(t.end_a);
    j["end_b"] = to_json(t.end_b);
    j["kind"] = t.kind == TrajectoryKind::vertical ? "vertical" : "horizontal";
    j["seed"] = {t.seed.real(), t.seed.imag()};
    return j;
}

namespace detail {
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

// CSV rows (t, x, y): t is the cumulative Euclidean arc length from end_a.
inline std::string trajectory_csv(const Trajectory& t) {
    std::ostringstream os;
    os << "t,x,y\n";
    double s = 0;
    for (size_t i = 0; i < t.points.size(); ++i) {
        if (i > 0) s += std::abs(t.points[i] - t.points[i - 1]);
        os << detail::fmt_double(s) << ',' << detail::fmt_double(t.points[i].real()) << ','
           << detail::fmt_double(t.points[i].imag()) << '\n';
    }
    return os.str();
}

inline std::string lamination_csv(const SampledLamination& lam) {
    std::ostringstream os;
    os << "angle_a,angle_b,weight\n";
    for (const auto& at : lam.atoms())
        os << detail::fmt_double(at.a) << ',' << detail::fmt_double(at.b) << ','
           << detail::fmt_double(at.weight) << '\n';
    return os.str();
}

inline json to_json(const CombConditionRecord& c) {
    return json{{"value", c.value}, {"bound", c.bound},       {"error_bar", c.error_bar},
                {"pass", c.pass},   {"route", c.route}};
}

inline json to_json(const UniformWeakStarCertificate& cert) {
    json arr = json::array();
    for (const auto& r : cert.levels) {
        json j;
        j["k"] = r.k;
        j["a"] = to_json(r.a);
        j["b"] = to_json(r.b);
        j["c"] = to_json(r.c);
        j["d"] = to_json(r.d);
        j["e"] = to_json(r.e);
        j["delta_witness"] = r.delta_witness;
        j["e_direct"] = r.e_direct;
        j["e_direct_error_bar"] = r.e_direct_bar;
        j["pass"] = r.pass;
        arr.push_back(j);
    }
    json out;
    out["k_max"] = cert.k_max;
    out["h"] = cert.h;
    out["constants"] = {{"C1p", UniformWeakStarCertificate::C1p()},
                        {"C2p", UniformWeakStarCertificate::C2p()},
                        {"deltap", UniformWeakStarCertificate::deltap()},
                        {"C3p", UniformWeakStarCertificate::C3p()}};
    out["levels"] = arr;
    out["all_pass"] = cert.all_pass;
    return out;
}

inline std::string convergence_csv(const ConvergenceReport& rep) {
    std::ostringstream os;
    os << "eps,eps_mod,target,gap,error_bar\n";
    for (const auto& p : rep.points)
        os << detail::fmt_double(p.eps) << ',' << detail::fmt_double(p.eps_mod) << ','
           << detail::fmt_double(rep.target) << ','
           << detail::fmt_double(p.eps_mod - rep.target) << ','
           << detail::fmt_double(p.error_bar) << '\n';
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace extremal_rays
