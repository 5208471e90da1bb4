#include "preflab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "preflab/csv.hpp"
#include "preflab/errors.hpp"

namespace preflab {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (lo == hi) {
            lo -= 1;
            hi += 1;
        } else {
            double m = 0.05 * (hi - lo);
            lo -= m;
            hi += m;
        }
    }
};

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    bool any = false;
    for (const auto& s : spec.series) any = any || !s.x.empty();
    if (!any) throw InputError("render_svg: no data");

    Range rx, ry;
    for (const auto& s : spec.series) {
        if (s.x.size() != s.y.size())
            throw InputError("render_svg: series '" + s.label +
                             "' has mismatched x/y lengths");
        for (double v : s.x) rx.add(v);
        for (double v : s.y) ry.add(v);
    }
    rx.pad();
    ry.pad();

    const double ml = 60, mr = 20, mt = 36, mb = 48;
    const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
    auto px = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto py = [&](double v) { return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
        << "\" height=\"" << spec.height << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\""
        << " font-size=\"15\">" << spec.title << "</text>\n";
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << spec.height - 10
        << "\" text-anchor=\"middle\" font-size=\"13\">" << spec.x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << mt + ph / 2 << ")\">" << spec.y_label << "</text>\n";

    // Axis ticks, 5 per axis.
    for (int i = 0; i <= 4; ++i) {
        double xv = rx.lo + (rx.hi - rx.lo) * i / 4;
        double yv = ry.lo + (ry.hi - ry.lo) * i / 4;
        out << "<text x=\"" << px(xv) << "\" y=\"" << mt + ph + 16
            << "\" text-anchor=\"middle\" font-size=\"11\">" << csv_num(xv, 2)
            << "</text>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << csv_num(yv, 2)
            << "</text>\n";
    }

    if (spec.fit && !spec.fit->degenerate) {
        double y0 = spec.fit->intercept + spec.fit->slope * rx.lo;
        double y1 = spec.fit->intercept + spec.fit->slope * rx.hi;
        out << "<line x1=\"" << px(rx.lo) << "\" y1=\"" << py(y0) << "\" x2=\""
            << px(rx.hi) << "\" y2=\"" << py(y1)
            << "\" stroke=\"#999\" stroke-dasharray=\"5,4\"/>\n";
    }

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const auto& s = spec.series[si];
        const char* color = kColors[si % 6];
        if (spec.connect_points && s.x.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << px(s.x[i]) << "," << py(s.y[i]) << " ";
            out << "\"/>\n";
        }
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
                << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    }

    // Legend: series labels, then the fit's r.
    double ly = mt + 16;
    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        if (spec.series[si].label.empty()) continue;
        out << "<circle cx=\"" << ml + 12 << "\" cy=\"" << ly - 4
            << "\" r=\"3.5\" fill=\"" << kColors[si % 6] << "\"/>\n";
        out << "<text x=\"" << ml + 22 << "\" y=\"" << ly
            << "\" font-size=\"12\">" << spec.series[si].label << "</text>\n";
        ly += 16;
    }
    if (spec.fit && !spec.fit->degenerate) {
        out << "<text x=\"" << ml + 8 << "\" y=\"" << ly
            << "\" font-size=\"12\">r = " << csv_num(spec.fit->pearson_r, 3)
            << "</text>\n";
    }

    out << "</svg>\n";
    return out.str();
}

void write_svg(const std::filesystem::path& path, const PlotSpec& spec) {
    std::ofstream out(path, std::ios::binary);
    out << render_svg(spec);
    if (!out) throw IoError("svg: cannot write " + path.string());
}

}  // namespace preflab
