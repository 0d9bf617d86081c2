#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace pctv::svg {

namespace {

std::string esc(const std::string& s) {
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

std::string fmt(double v, const char* spec = "%.4g") {
    char buf[32];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

std::string render(const Figure& f) {
    const double W = 640, H = 480, left = 70, right = 150, top = 40, bottom = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto tx = [&](double x) { return f.log_x ? std::log10(x) : x; };
    for (const auto& s : f.series)
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!std::isfinite(tx(s.x[k])) || !std::isfinite(s.y[k])) continue;
            x0 = std::min(x0, tx(s.x[k]));
            x1 = std::max(x1, tx(s.x[k]));
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 <= 0) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 <= 0) y0 -= 0.5, y1 += 0.5;
    double pw = W - left - right, ph = H - top - bottom;
    if (f.equal_aspect) {
        const double s = std::min(pw / (x1 - x0), ph / (y1 - y0));
        pw = s * (x1 - x0);
        ph = s * (y1 - y0);
    }
    auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + esc(f.title) + "</text>\n";
    out += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    const double xlo = f.log_x ? std::pow(10.0, x0) : x0, xhi = f.log_x ? std::pow(10.0, x1) : x1;
    out += "<text x=\"" + fmt(left) + "\" y=\"" + fmt(top + ph + 16) + "\" font-size=\"11\">" + fmt(xlo) + "</text>\n";
    out += "<text x=\"" + fmt(left + pw) + "\" y=\"" + fmt(top + ph + 16) + "\" text-anchor=\"end\" font-size=\"11\">" +
           fmt(xhi) + "</text>\n";
    out += "<text x=\"" + fmt(left - 4) + "\" y=\"" + fmt(top + ph) + "\" text-anchor=\"end\" font-size=\"11\">" + fmt(y0) +
           "</text>\n";
    out += "<text x=\"" + fmt(left - 4) + "\" y=\"" + fmt(top + 10) + "\" text-anchor=\"end\" font-size=\"11\">" + fmt(y1) +
           "</text>\n";
    out += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"" + fmt(top + ph + 36) + "\" text-anchor=\"middle\" font-size=\"12\">" +
           esc(f.x_label) + "</text>\n";
    out += "<text transform=\"translate(18," + fmt(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" +
           esc(f.y_label) + "</text>\n";

    double ly = top + 10;
    for (const auto& s : f.series) {
        const std::size_t m = std::min(s.x.size(), s.y.size());
        if (s.polyline) {
            out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t k = 0; k < m; ++k) out += fmt(px(s.x[k]), "%.2f") + "," + fmt(py(s.y[k]), "%.2f") + " ";
            out += "\"/>\n";
        }
        for (std::size_t k = 0; k < m; ++k)
            out += "<circle cx=\"" + fmt(px(s.x[k]), "%.2f") + "\" cy=\"" + fmt(py(s.y[k]), "%.2f") + "\" r=\"" +
                   fmt(s.marker_radius) + "\" fill=\"" + s.color + "\"/>\n";
        out += "<circle cx=\"" + fmt(W - right + 14) + "\" cy=\"" + fmt(ly - 4) + "\" r=\"4\" fill=\"" + s.color + "\"/>\n";
        out += "<text x=\"" + fmt(W - right + 24) + "\" y=\"" + fmt(ly) + "\" font-size=\"11\">" + esc(s.label) + "</text>\n";
        ly += 16;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace pctv::svg
