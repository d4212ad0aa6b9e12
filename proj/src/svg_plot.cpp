#include "hgdo/svg_plot.hpp"

#include "hgdo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace hgdo::plot {

namespace {

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) {
            const double pad = std::max(std::abs(lo) * 0.1, 1e-3);
            lo -= pad;
            hi += pad;
        }
    }
};

void render_panel(std::ostringstream& os, const Panel& p, double x0, double y0, double w, double h) {
    const double ml = 70, mr = 150, mt = 28, mb = 40;
    const double pw = w - ml - mr, ph = h - mt - mb;
    Range rx, ry;
    for (const auto& s : p.series) {
        for (double v : s.x) rx.add(v);
        for (double v : s.y) ry.add(v);
    }
    rx.finish();
    ry.finish();
    if (p.equal_aspect) {
        const double sx = (rx.hi - rx.lo) / pw, sy = (ry.hi - ry.lo) / ph;
        const double s = std::max(sx, sy);
        const double cx = 0.5 * (rx.lo + rx.hi), cy = 0.5 * (ry.lo + ry.hi);
        rx.lo = cx - 0.5 * s * pw, rx.hi = cx + 0.5 * s * pw;
        ry.lo = cy - 0.5 * s * ph, ry.hi = cy + 0.5 * s * ph;
    }
    auto X = [&](double v) { return x0 + ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto Y = [&](double v) { return y0 + mt + (1.0 - (v - ry.lo) / (ry.hi - ry.lo)) * ph; };

    os << "<text x=\"" << fmt(x0 + ml) << "\" y=\"" << fmt(y0 + 18) << "\" font-size=\"14\">" << escape(p.title)
       << "</text>\n";
    os << "<rect x=\"" << fmt(x0 + ml) << "\" y=\"" << fmt(y0 + mt) << "\" width=\"" << fmt(pw) << "\" height=\""
       << fmt(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double vx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
        const double vy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
        os << "<line x1=\"" << fmt(X(vx)) << "\" y1=\"" << fmt(y0 + mt) << "\" x2=\"" << fmt(X(vx)) << "\" y2=\""
           << fmt(y0 + mt + ph) << "\" stroke=\"#ddd\"/>\n";
        os << "<line x1=\"" << fmt(x0 + ml) << "\" y1=\"" << fmt(Y(vy)) << "\" x2=\"" << fmt(x0 + ml + pw)
           << "\" y2=\"" << fmt(Y(vy)) << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << fmt(X(vx)) << "\" y=\"" << fmt(y0 + mt + ph + 15)
           << "\" font-size=\"10\" text-anchor=\"middle\">" << tick_label(vx) << "</text>\n";
        os << "<text x=\"" << fmt(x0 + ml - 5) << "\" y=\"" << fmt(Y(vy) + 3)
           << "\" font-size=\"10\" text-anchor=\"end\">" << tick_label(vy) << "</text>\n";
    }
    os << "<text x=\"" << fmt(x0 + ml + pw / 2) << "\" y=\"" << fmt(y0 + h - 8)
       << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(p.x_label) << "</text>\n";
    os << "<text x=\"" << fmt(x0 + 14) << "\" y=\"" << fmt(y0 + mt + ph / 2) << "\" font-size=\"12\" transform=\"rotate(-90 "
       << fmt(x0 + 14) << " " << fmt(y0 + mt + ph / 2) << ")\" text-anchor=\"middle\">" << escape(p.y_label)
       << "</text>\n";

    for (std::size_t i = 0; i < p.series.size(); ++i) {
        const auto& s = p.series[i];
        const char* color = kPalette[i % kPalette.size()];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\"";
        if (s.dashed) os << " stroke-dasharray=\"5,3\"";
        os << " points=\"";
        const std::size_t n = std::min(s.x.size(), s.y.size());
        // Thin very long series to at most ~4000 vertices.
        const std::size_t stride = std::max<std::size_t>(1, n / 4000);
        for (std::size_t k = 0; k < n; k += stride) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            os << fmt(X(s.x[k])) << ',' << fmt(Y(s.y[k])) << ' ';
        }
        os << "\"/>\n";
        const double ly = y0 + mt + 14 + 16 * i;
        os << "<line x1=\"" << fmt(x0 + ml + pw + 10) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(x0 + ml + pw + 30)
           << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\"";
        if (s.dashed) os << " stroke-dasharray=\"5,3\"";
        os << "/>\n";
        os << "<text x=\"" << fmt(x0 + ml + pw + 35) << "\" y=\"" << fmt(ly) << "\" font-size=\"11\">" << escape(s.name)
           << "</text>\n";
    }
}

template <class F>
Series series_of(const sim::SimTrace& trace, const std::string& name, F&& get, bool dashed = false) {
    Series s;
    s.name = name;
    s.dashed = dashed;
    s.x.reserve(trace.size());
    s.y.reserve(trace.size());
    for (const auto& smp : trace.samples) {
        s.x.push_back(smp.t);
        s.y.push_back(get(smp));
    }
    return s;
}

}  // namespace

std::string render_svg(const Figure& fig) {
    const double title_h = fig.title.empty() ? 0.0 : 30.0;
    const double height = title_h + fig.panel_height * static_cast<double>(fig.panels.size());
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fig.width << "\" height=\"" << fmt(height)
       << "\" viewBox=\"0 0 " << fig.width << ' ' << fmt(height) << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!fig.title.empty())
        os << "<text x=\"" << fig.width / 2 << "\" y=\"20\" font-size=\"16\" text-anchor=\"middle\">"
           << escape(fig.title) << "</text>\n";
    for (std::size_t i = 0; i < fig.panels.size(); ++i)
        render_panel(os, fig.panels[i], 0.0, title_h + fig.panel_height * static_cast<double>(i), fig.width,
                     fig.panel_height);
    os << "</svg>\n";
    return os.str();
}

void write_svg(const Figure& fig, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << render_svg(fig);
    out.flush();
    if (!out) throw IoError(path.string(), "write failed");
}

Figure xy_figure(const sim::SimTrace& trace) {
    Figure fig;
    fig.title = "Trajectory";
    fig.panel_height = 600;
    Panel p;
    p.title = "x-y path";
    p.x_label = "x (m)";
    p.y_label = "y (m)";
    p.equal_aspect = true;
    Series actual{"actual", {}, {}, false}, ref{"reference", {}, {}, true};
    for (const auto& s : trace.samples) {
        actual.x.push_back(s.state.x1.x());
        actual.y.push_back(s.state.x1.y());
        ref.x.push_back(s.ref_pos.x());
        ref.y.push_back(s.ref_pos.y());
    }
    p.series = {std::move(actual), std::move(ref)};
    fig.panels.push_back(std::move(p));
    return fig;
}

Figure timeseries_figure(const sim::SimTrace& trace) {
    Figure fig;
    fig.title = "Tracking";
    constexpr std::array<const char*, 3> pos = {"x", "y", "z"};
    constexpr std::array<const char*, 3> ang = {"phi", "theta", "psi"};
    for (int i = 0; i < 3; ++i) {
        Panel p;
        p.title = std::string(pos[i]) + " position";
        p.x_label = "t (s)";
        p.y_label = std::string(pos[i]) + " (m)";
        p.series.push_back(series_of(trace, "actual", [i](const sim::SimSample& s) { return s.state.x1[i]; }));
        p.series.push_back(series_of(trace, "reference", [i](const sim::SimSample& s) { return s.ref_pos[i]; }, true));
        fig.panels.push_back(std::move(p));
    }
    for (int i = 0; i < 3; ++i) {
        Panel p;
        p.title = std::string(ang[i]) + " angle";
        p.x_label = "t (s)";
        p.y_label = std::string(ang[i]) + " (rad)";
        p.series.push_back(series_of(trace, "actual", [i](const sim::SimSample& s) { return s.state.x3[i]; }));
        p.series.push_back(series_of(trace, "setpoint", [i](const sim::SimSample& s) { return s.att_ref[i]; }, true));
        fig.panels.push_back(std::move(p));
    }
    return fig;
}

Figure estimates_figure(const sim::SimTrace& trace) {
    Figure fig;
    fig.title = "Disturbance estimates";
    constexpr std::array<const char*, 6> names = {"dx", "dy", "dz", "dphi", "dtheta", "dpsi"};
    for (int c = 0; c < 6; ++c) {
        Panel p;
        p.title = names[c];
        p.x_label = "t (s)";
        p.y_label = c < 3 ? "m/s^2" : "rad/s^2";
        p.series.push_back(series_of(trace, "true", [c](const sim::SimSample& s) {
            return c < 3 ? s.d1[c] : s.d2[c - 3];
        }));
        p.series.push_back(series_of(
            trace, "estimate", [c](const sim::SimSample& s) { return c < 3 ? s.d1_hat[c] : s.d2_hat[c - 3]; }, true));
        fig.panels.push_back(std::move(p));
    }
    return fig;
}

Figure make_figure(const sim::SimTrace& trace, Kind kind) {
    switch (kind) {
        case Kind::Xy: return xy_figure(trace);
        case Kind::Timeseries: return timeseries_figure(trace);
        case Kind::Estimates: return estimates_figure(trace);
    }
    return xy_figure(trace);
}

}  // namespace hgdo::plot
