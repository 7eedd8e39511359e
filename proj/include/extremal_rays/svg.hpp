#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "currents.hpp"
#include "slit_domain.hpp"
#include "teich_ray.hpp"
#include "trace.hpp"

namespace extremal_rays {

// Minimal SVG emitter; plots are presentation only, never computation.
class SvgCanvas {
  public:
    SvgCanvas(double x0, double y0, double x1, double y1, int pixels = 640)
        : x0_(x0), y0_(y0), x1_(x1), y1_(y1), px_(pixels) {
        double aspect = (y1 - y0) / (x1 - x0);
        py_ = std::max(1, (int)(pixels * aspect));
    }

    void line(double xa, double ya, double xb, double yb, const std::string& color,
              double width = 1.0) {
        body_ << "<line x1=\"" << X(xa) << "\" y1=\"" << Y(ya) << "\" x2=\"" << X(xb) << "\" y2=\""
              << Y(yb) << "\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  double width = 1.0) {
        body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
              << "\" points=\"";
        for (const auto& [x, y] : pts) body_ << X(x) << ',' << Y(y) << ' ';
        body_ << "\"/>\n";
    }

    void circle(double x, double y, double r_px, const std::string& color) {
        body_ << "<circle cx=\"" << X(x) << "\" cy=\"" << Y(y) << "\" r=\"" << r_px
              << "\" fill=\"" << color << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12) {
        body_ << "<text x=\"" << X(x) << "\" y=\"" << Y(y) << "\" font-size=\"" << size
              << "\" font-family=\"monospace\">" << s << "</text>\n";
    }

    std::string finish() const {
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px_ + 20 << "\" height=\""
           << py_ + 20 << "\" viewBox=\"-10 -10 " << px_ + 20 << ' ' << py_ + 20 << "\">\n";
        os << body_.str();
        os << "</svg>\n";
        return os.str();
    }

  private:
    double X(double x) const { return (x - x0_) / (x1_ - x0_) * px_; }
    double Y(double y) const { return py_ - (y - y0_) / (y1_ - y0_) * py_; }

    double x0_, y0_, x1_, y1_;
    int px_, py_;
    std::ostringstream body_;
};

// Domain with highlighted boundary sets: e bold, f dashed-bold.
inline std::string render_domain(const SlitDomain& dom, const BoundarySet* e = nullptr,
                                 const BoundarySet* f = nullptr) {
    SvgCanvas svg(dom.min_x().value() - 0.05, dom.min_y().value() - 0.05,
                  dom.max_x().value() + 0.05, dom.max_y().value() + 0.05);
    for (int i = 0; i < dom.edge_count(); ++i) {
        Point a = shadow(dom.edge_start(i)), b = shadow(dom.edge_end(i));
        svg.line(a.x, a.y, b.x, b.y, "black", 1.0);
    }
    for (const auto& s : dom.slits()) {
        if (s.edge_resident) continue;
        Point a = shadow(s.a), b = shadow(s.b);
        svg.line(a.x, a.y, b.x, b.y, "black", 1.0);
    }
    auto draw_set = [&](const BoundarySet& set, const std::string& color) {
        for (const auto& p : set.pieces()) {
            auto [a, b] = BoundarySet::piece_endpoints(dom, p);
            svg.line(a.x, a.y, b.x, b.y, color, 3.0);
        }
    };
    if (e) draw_set(*e, "#d62728");
    if (f) draw_set(*f, "#1f77b4");
    return svg.finish();
}

inline std::string render_disk_trajectories(const std::vector<Trajectory>& trajectories) {
    SvgCanvas svg(-1.05, -1.05, 1.05, 1.05);
    std::vector<std::pair<double, double>> circle_pts;
    for (int i = 0; i <= 256; ++i) {
        double t = 2 * std::numbers::pi * i / 256;
        circle_pts.push_back({std::cos(t), std::sin(t)});
    }
    svg.polyline(circle_pts, "black", 1.0);
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    int ci = 0;
    for (const auto& t : trajectories) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& z : t.points) pts.push_back({z.real(), z.imag()});
        svg.polyline(pts, colors[ci++ % 5], 1.0);
    }
    return svg.finish();
}

inline std::string render_convergence(const ConvergenceReport& rep) {
    double xmax = 0, ymax = rep.target;
    for (const auto& p : rep.points) {
        xmax = std::max(xmax, -std::log2(p.eps));
        ymax = std::max(ymax, p.eps_mod);
    }
    SvgCanvas svg(-0.5, -0.1 * ymax, xmax + 0.5, 1.15 * ymax);
    svg.line(0, 0, xmax + 0.3, 0, "black");
    svg.line(0, 0, 0, 1.1 * ymax, "black");
    svg.line(0, rep.target, xmax + 0.3, rep.target, "#888888");
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : rep.points) pts.push_back({-std::log2(p.eps), p.eps_mod});
    svg.polyline(pts, "#d62728", 1.5);
    for (const auto& [x, y] : pts) svg.circle(x, y, 3.0, "#d62728");
    svg.text(0.2, 1.05 * ymax, "eps*mod vs -log2(eps); grey: vertical family modulus");
    return svg.finish();
}

}  // namespace extremal_rays
