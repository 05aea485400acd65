#include "gridsim/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gridsim/errors.hpp"
#include "json_io.hpp"

namespace gridsim {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;
constexpr int kTicks = 5;

constexpr std::array<const char*, 6> kPalette = {"#0072bd", "#d95319", "#edb120", "#7e2f8e", "#77ac30", "#4dbeee"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    // Expand to a span of "nice" tick steps.
    void finish() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            lo -= 0.5 * std::max(1.0, std::abs(lo));
            hi += 0.5 * std::max(1.0, std::abs(hi));
        }
        const double raw = (hi - lo) / kTicks;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        }
        lo = std::floor(lo / step) * step;
        hi = std::ceil(hi / step) * step;
    }
};

}  // namespace

void PlotSpec::validate() const {
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) {
            throw DomainError("series '" + s.label + "' has mismatched x/y lengths");
        }
        if (s.x.size() != series.front().x.size()) {
            throw DomainError("all series must share the same x length");
        }
    }
}

std::string render_svg(const PlotSpec& spec) {
    spec.validate();
    Range xr, yr;
    for (const auto& s : spec.series) {
        for (double v : s.x) xr.include(v);
        for (double v : s.y) yr.include(v);
    }
    xr.finish();
    yr.finish();

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto py = [&](double y) { return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"white\"/>\n";
    if (!spec.title.empty()) {
        out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
               escape(spec.title) + "</text>\n";
    }

    out += "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) + "\" height=\"" +
           num(plot_h) + "\"/>\n";
    for (int k = 0; k <= kTicks; ++k) {
        const double xv = xr.lo + (xr.hi - xr.lo) * k / kTicks;
        const double yv = yr.lo + (yr.hi - yr.lo) * k / kTicks;
        out += "<line x1=\"" + num(px(xv)) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" + num(px(xv)) +
               "\" y2=\"" + num(kTop + plot_h + 5) + "\"/>\n";
        out += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
               num(py(yv)) + "\"/>\n";
    }
    out += "</g>\n";
    out += "<g class=\"tick-labels\" fill=\"black\">\n";
    for (int k = 0; k <= kTicks; ++k) {
        const double xv = xr.lo + (xr.hi - xr.lo) * k / kTicks;
        const double yv = yr.lo + (yr.hi - yr.lo) * k / kTicks;
        out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kTop + plot_h + 18) + "\" text-anchor=\"middle\">" +
               tick_label(xv) + "</text>\n";
        out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" +
               tick_label(yv) + "</text>\n";
    }
    out += "</g>\n";
    out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 12) + "\" text-anchor=\"middle\">" +
           escape(spec.x_label) + "</text>\n";
    out += "<text x=\"18\" y=\"" + num(kTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num(kTop + plot_h / 2) + ")\">" + escape(spec.y_label) + "</text>\n";

    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        const auto& series = spec.series[s];
        const char* color = kPalette[s % kPalette.size()];
        out += "<polyline class=\"series\" fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series.x.size(); ++i) {
            if (i) out += ' ';
            out += num(px(series.x[i])) + "," + num(py(series.y[i]));
        }
        out += "\"/>\n";
        const double ly = kTop + 10 + 18.0 * static_cast<double>(s);
        out += "<line x1=\"" + num(kLeft + plot_w + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" +
               num(kLeft + plot_w + 32) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(kLeft + plot_w + 38) + "\" y=\"" + num(ly + 4) + "\">" + escape(series.label) +
               "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

void emit_svg(const PlotSpec& spec) { detail::write_text_file(spec.output, render_svg(spec)); }

}  // namespace gridsim
