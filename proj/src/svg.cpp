#include "qscat/svg.hpp"

#include <fstream>

namespace qscat {

namespace {

constexpr double kView = 400.0;

double px(double x, double span) { return kView / 2 + x * (kView / (2 * span)); }
double py(double y, double span) { return kView / 2 - y * (kView / (2 * span)); }

double approx(const QQ& x) { return x.get_d(); }

void segment(std::ofstream& out, double x0, double y0, double x1, double y1, const char* color,
             double span) {
    out << "<line x1=\"" << px(x0, span) << "\" y1=\"" << py(y0, span) << "\" x2=\"" << px(x1, span)
        << "\" y2=\"" << py(y1, span) << "\" stroke=\"" << color << "\" stroke-width=\"1.2\"/>\n";
}

struct Clip {  // chop the line p + t*d to the viewing square
    double t0, t1;
    bool ok;
};

Clip clip_line(double p0, double p1, double d0, double d1, double span, bool ray) {
    double lo = ray ? 0.0 : -1e9, hi = 1e9;
    for (int axis = 0; axis < 2; ++axis) {
        double p = axis ? p1 : p0, d = axis ? d1 : d0;
        if (d == 0) {
            if (p < -span || p > span) return {0, 0, false};
            continue;
        }
        double ta = (-span - p) / d, tb = (span - p) / d;
        if (ta > tb) std::swap(ta, tb);
        lo = std::max(lo, ta);
        hi = std::min(hi, tb);
    }
    return {lo, hi, lo < hi};
}

}  // namespace

void write_diagram_svg(const ScatteringDiagram& d, const std::string& path, double span) {
    if (d.lat.rank != 2) throw input_error("SVG output is a rank-2 convenience");
    std::ofstream out(path);
    if (!out) throw input_error("cannot open SVG output: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kView << "\" height=\"" << kView
        << "\" viewBox=\"0 0 " << kView << " " << kView << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    auto draw_support = [&](const WallSupport& s, const char* color) {
        // carrier direction in the plane
        double n0 = approx(QQ(s.normal[0])), n1 = approx(QQ(s.normal[1]));
        double c = approx(s.offset);
        double norm2 = n0 * n0 + n1 * n1;
        double b0 = n0 * c / norm2, b1 = n1 * c / norm2;  // base point on the carrier
        double d0 = -n1, d1 = n0;
        // respect a single halfspace cut when present (outgoing rays)
        bool ray = false;
        double t_start = 0;
        if (!s.cuts.empty()) {
            // find the cut bound along the line: a.(b + t d) >= bound
            for (const LinCond& cut : s.cuts) {
                double a0 = approx(cut.a[0]), a1 = approx(cut.a[1]);
                double ad = a0 * d0 + a1 * d1;
                double ab = a0 * b0 + a1 * b1 - approx(cut.b);
                if (ad > 1e-12) {
                    ray = true;
                    t_start = std::max(t_start, -ab / ad);
                } else if (ad < -1e-12) {
                    ray = true;
                    // flip direction so the allowed side is t >= start
                    d0 = -d0;
                    d1 = -d1;
                    ad = -ad;
                    t_start = std::max(0.0, -(a0 * b0 + a1 * b1 - approx(cut.b)) / ad);
                }
            }
        }
        Clip cl = clip_line(b0 + t_start * d0, b1 + t_start * d1, d0, d1, span, ray);
        if (!cl.ok) return;
        double x0 = b0 + (t_start + cl.t0) * d0, y0 = b1 + (t_start + cl.t0) * d1;
        double x1 = b0 + (t_start + cl.t1) * d0, y1 = b1 + (t_start + cl.t1) * d1;
        segment(out, x0, y0, x1, y1, color, span);
    };
    if (d.kind == DiagramKind::standard) {
        for (const Wall& w : d.walls)
            draw_support(w.support, wall_incoming(d.lat, w.support, w.exp_dir) ? "#1f77b4" : "#d62728");
    } else {
        for (const NilpotentWall& w : d.nwalls)
            draw_support(w.support, w.parent1 < 0 ? "#1f77b4" : "#d62728");
    }
    out << "</svg>\n";
}

void write_trees_svg(const GradedLattice& lat, const std::vector<TropicalTree>& trees,
                     const std::string& path, double span) {
    if (lat.rank != 2) throw input_error("SVG output is a rank-2 convenience");
    std::ofstream out(path);
    if (!out) throw input_error("cannot open SVG output: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kView << "\" height=\"" << kView
        << "\" viewBox=\"0 0 " << kView << " " << kView << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const char* colors[] = {"#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
    int ci = 0;
    for (const TropicalTree& t : trees) {
        const char* color = colors[ci++ % 4];
        for (const TropEdge& e : t.edges) {
            double x0 = approx(t.vertices[static_cast<size_t>(e.from)][0]);
            double y0 = approx(t.vertices[static_cast<size_t>(e.from)][1]);
            if (e.to >= 0) {
                double x1 = approx(t.vertices[static_cast<size_t>(e.to)][0]);
                double y1 = approx(t.vertices[static_cast<size_t>(e.to)][1]);
                segment(out, x0, y0, x1, y1, color, span);
            } else {
                VecQ dir = lat.pi1(e.lift);
                double d0 = approx(dir[0]), d1 = approx(dir[1]);
                double norm = std::max(1e-9, std::sqrt(d0 * d0 + d1 * d1));
                segment(out, x0, y0, x0 + d0 / norm * span, y0 + d1 / norm * span, color, span);
            }
        }
        // root marker
        if (!t.vertices.empty())
            out << "<circle cx=\"" << px(approx(t.vertices[0][0]), span) << "\" cy=\""
                << py(approx(t.vertices[0][1]), span) << "\" r=\"3\" fill=\"black\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace qscat
