#include "qloc/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qloc {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kLeft = 64;
constexpr int kRight = 20;
constexpr int kTop = 24;
constexpr int kBottom = 48;

struct Axis {
    double lo = 0.0, hi = 1.0;

    // Pixel coordinate of a data value on the horizontal axis.
    double px(double v) const {
        return kLeft + (v - lo) / (hi - lo) * (kWidth - kLeft - kRight);
    }
    // Vertical axis grows downward in SVG, so flip.
    double py(double v) const {
        return kHeight - kBottom - (v - lo) / (hi - lo) * (kHeight - kTop - kBottom);
    }
};

Axis fit_axis(double lo, double hi) {
    if (!(hi > lo)) {  // degenerate data: open a symmetric window around it
        const double pad = (lo == 0.0) ? 1.0 : std::fabs(lo) * 0.5;
        return {lo - pad, hi + pad};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

void append(std::string& s, const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    s += buf;
}

void open_svg(std::string& s, const char* title) {
    append(s,
           "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
           "viewBox=\"0 0 %d %d\" font-family=\"sans-serif\" font-size=\"12\">\n",
           kWidth, kHeight, kWidth, kHeight);
    append(s, "<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n", kWidth, kHeight);
    append(s, "<text x=\"%d\" y=\"16\" text-anchor=\"middle\">%s</text>\n", kWidth / 2, title);
}

void draw_axes(std::string& s, const Axis& x, const Axis& y,
               const char* xlabel, const char* ylabel) {
    append(s, "<g stroke=\"#444\" fill=\"none\">\n");
    append(s, "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\"/>\n",
           kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom);
    append(s, "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\"/>\n",
           kLeft, kTop, kLeft, kHeight - kBottom);
    append(s, "</g>\n");
    for (int i = 0; i <= 4; ++i) {
        const double fx = x.lo + (x.hi - x.lo) * i / 4.0;
        const double fy = y.lo + (y.hi - y.lo) * i / 4.0;
        append(s, "<line x1=\"%.1f\" y1=\"%d\" x2=\"%.1f\" y2=\"%d\" stroke=\"#444\"/>\n",
               x.px(fx), kHeight - kBottom, x.px(fx), kHeight - kBottom + 4);
        append(s, "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\">%.3g</text>\n",
               x.px(fx), kHeight - kBottom + 18, fx);
        append(s, "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" stroke=\"#444\"/>\n",
               kLeft - 4, y.py(fy), kLeft, y.py(fy));
        append(s, "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" dy=\"4\">%.3g</text>\n",
               kLeft - 8, y.py(fy), fy);
    }
    append(s, "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">%s</text>\n",
           (kLeft + kWidth - kRight) / 2, kHeight - 10, xlabel);
    append(s,
           "<text x=\"16\" y=\"%d\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 16 %d)\">%s</text>\n",
           (kTop + kHeight - kBottom) / 2, (kTop + kHeight - kBottom) / 2, ylabel);
}

} // namespace

std::string spectrum_scatter_svg(const ModeSpectrum& spectrum,
                                 const ModeSelection& selection) {
    if (spectrum.modes.empty())
        throw std::invalid_argument("spectrum_scatter_svg: empty spectrum");
    if (selection.keep_mask.size() != spectrum.modes.size())
        throw std::invalid_argument("spectrum_scatter_svg: selection size mismatch");

    double xlo = spectrum.modes.front().eigenvalue;
    double xhi = spectrum.modes.back().eigenvalue;
    double ylo = 0.0, yhi = 0.0;
    for (const ModeRecord& m : spectrum.modes) yhi = std::max(yhi, m.pr);
    const Axis x = fit_axis(xlo, xhi);
    const Axis y = fit_axis(ylo, yhi);

    std::string s;
    open_svg(s, "participation ratio vs eigenvalue");
    draw_axes(s, x, y, "eigenvalue", "participation ratio");

    // Discarded first so kept markers stay visible where they overlap.
    s += "<g fill=\"#b0b0b0\">\n";
    for (std::size_t i = 0; i < spectrum.modes.size(); ++i)
        if (!selection.keep_mask[i])
            append(s, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"2\"/>\n",
                   x.px(spectrum.modes[i].eigenvalue), y.py(spectrum.modes[i].pr));
    s += "</g>\n<g fill=\"#1f77b4\">\n";
    for (std::size_t i = 0; i < spectrum.modes.size(); ++i)
        if (selection.keep_mask[i])
            append(s, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"2\"/>\n",
                   x.px(spectrum.modes[i].eigenvalue), y.py(spectrum.modes[i].pr));
    s += "</g>\n";

    append(s,
           "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" stroke=\"#d62728\" "
           "stroke-dasharray=\"6 4\"/>\n",
           kLeft, y.py(selection.pr_threshold), kWidth - kRight, y.py(selection.pr_threshold));
    append(s, "<text x=\"%d\" y=\"%.1f\" fill=\"#d62728\" text-anchor=\"end\" dy=\"-4\">"
              "threshold %.4g</text>\n",
           kWidth - kRight, y.py(selection.pr_threshold), selection.pr_threshold);
    s += "</svg>\n";
    return s;
}

std::string pr_histogram_svg(const PrHistogram& hist, const LorentzianFit& fit,
                             double pr_threshold) {
    if (hist.counts.empty())
        throw std::invalid_argument("pr_histogram_svg: empty histogram");

    double ymax = 0.0;
    for (std::size_t c : hist.counts) ymax = std::max(ymax, static_cast<double>(c));
    for (std::size_t b = 0; b < hist.counts.size(); ++b)
        ymax = std::max(ymax, fit.eval(hist.center(b)));
    const Axis x = fit_axis(hist.bin_edges.front(), hist.bin_edges.back());
    const Axis y = fit_axis(0.0, ymax);

    std::string s;
    open_svg(s, "participation ratio histogram");
    draw_axes(s, x, y, "participation ratio", "mode count");

    s += "<g fill=\"#9ecae1\" stroke=\"#3182bd\" stroke-width=\"0.5\">\n";
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        const double x0 = x.px(hist.bin_edges[b]);
        const double x1 = x.px(hist.bin_edges[b + 1]);
        const double yb = y.py(static_cast<double>(hist.counts[b]));
        append(s, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\"/>\n",
               x0, yb, x1 - x0, y.py(0.0) - yb);
    }
    s += "</g>\n<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
    // Sample the fitted curve densely so the peak renders smoothly even
    // when it is much narrower than a bin.
    constexpr int kSamples = 256;
    for (int i = 0; i <= kSamples; ++i) {
        const double v = x.lo + (x.hi - x.lo) * i / kSamples;
        const double f = std::min(fit.eval(v), y.hi);
        append(s, "%.1f,%.1f ", x.px(v), y.py(std::max(f, y.lo)));
    }
    s += "\"/>\n";

    append(s,
           "<line x1=\"%.1f\" y1=\"%d\" x2=\"%.1f\" y2=\"%d\" stroke=\"#2ca02c\" "
           "stroke-dasharray=\"6 4\"/>\n",
           x.px(pr_threshold), kTop, x.px(pr_threshold), kHeight - kBottom);
    append(s, "<text x=\"%.1f\" y=\"%d\" fill=\"#2ca02c\" text-anchor=\"middle\">"
              "threshold</text>\n",
           x.px(pr_threshold), kTop + 12);
    s += "</svg>\n";
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace qloc
