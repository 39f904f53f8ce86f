#include "ccmkit/svg.hpp"

#include "ccmkit/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ccmkit {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 200.0; // legend column
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string escape_xml(const std::string& text) {
    std::string out;
    for (char c : text) {
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

std::string tick_label(double v) {
    char buf[32];
    if (std::fabs(v - std::round(v)) < 1e-9) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.2f", v);
    }
    return buf;
}

} // namespace

std::string convergence_svg(const std::vector<CurveFile>& curves, const std::string& title) {
    if (curves.empty()) fail(ErrorCode::invalid_argument, "plot: no curves");
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = 0.0;
    double y_hi = 1.0;
    for (const auto& c : curves) {
        if (c.rows.empty()) fail(ErrorCode::invalid_argument, "plot: curve '" + c.label + "' has no points");
        for (const auto& r : c.rows) {
            if (!std::isfinite(r.lib_size) || !std::isfinite(r.rho_mean) || !std::isfinite(r.rho_sd)) {
                fail(ErrorCode::invalid_argument, "plot: curve '" + c.label + "' has non-finite values");
            }
            x_lo = std::min(x_lo, r.lib_size);
            x_hi = std::max(x_hi, r.lib_size);
            y_lo = std::min(y_lo, r.rho_mean - r.rho_sd);
            y_hi = std::max(y_hi, r.rho_mean + r.rho_sd);
        }
    }
    if (x_hi == x_lo) {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    y_lo = std::max(-1.0, std::floor(y_lo * 10.0) / 10.0);
    y_hi = std::min(1.0, std::ceil(y_hi * 10.0) / 10.0);
    if (y_hi <= y_lo) y_hi = y_lo + 0.1;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
    s += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">" +
         escape_xml(title) + "</text>\n";

    // Axes and ticks.
    s += "<g class=\"axes\" stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n";
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" + num(kLeft + plot_w) + "\" y2=\"" +
         num(kTop + plot_h) + "\"/>\n";
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
         num(kTop + plot_h) + "\"/>\n";
    s += "</g>\n";
    s += "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#000000\">\n";
    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double xv = x_lo + (x_hi - x_lo) * i / kTicks;
        const double yv = y_lo + (y_hi - y_lo) * i / kTicks;
        s += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(kTop + plot_h + 20) + "\" text-anchor=\"middle\">" +
             tick_label(std::round(xv)) + "</text>\n";
        s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" +
             tick_label(std::round(yv * 100.0) / 100.0) + "</text>\n";
    }
    s += "</g>\n";
    s += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 20) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">Library size (L)</text>\n";
    s += "<text x=\"20\" y=\"" + num(kTop + plot_h / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\" transform=\"rotate(-90 20 " + num(kTop + plot_h / 2) + ")\">Cross-map skill (rho)</text>\n";

    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        const char* color = kPalette[i % kPalette.size()];
        std::string band;
        for (const auto& r : c.rows) band += num(px(r.lib_size)) + "," + num(py(r.rho_mean + r.rho_sd)) + " ";
        for (auto it = c.rows.rbegin(); it != c.rows.rend(); ++it) {
            band += num(px(it->lib_size)) + "," + num(py(it->rho_mean - it->rho_sd)) + " ";
        }
        band.pop_back();
        std::string mean;
        for (const auto& r : c.rows) mean += num(px(r.lib_size)) + "," + num(py(r.rho_mean)) + " ";
        mean.pop_back();
        s += "<g class=\"curve\">\n";
        s += "<polyline class=\"band\" points=\"" + band + "\" fill=\"" + color +
             "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
        s += "<polyline class=\"mean\" points=\"" + mean + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
        s += "</g>\n";
    }

    s += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"13\">\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const double y = kTop + 10.0 + 22.0 * static_cast<double>(i);
        const char* color = kPalette[i % kPalette.size()];
        const double x = kLeft + plot_w + 20.0;
        s += "<g class=\"legend-entry\"><line x1=\"" + num(x) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x + 24) +
             "\" y2=\"" + num(y) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/><text x=\"" + num(x + 30) +
             "\" y=\"" + num(y + 4) + "\">" + escape_xml(curves[i].label) + "</text></g>\n";
    }
    s += "</g>\n</svg>\n";
    return s;
}

} // namespace ccmkit
