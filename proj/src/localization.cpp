#include "qloc/localization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "qloc/kernels.hpp"

namespace qloc {

namespace {

constexpr double kInvPi = 1.0 / std::numbers::pi;

double lorentz(double x, double lambda0, double gamma) {
    const double dx = x - lambda0;
    return kInvPi * gamma / (dx * dx + gamma * gamma);
}

// Closed-form least-squares amplitude for fixed (lambda0, gamma):
// A = sum(y*phi) / sum(phi^2).
double best_amplitude(const std::vector<double>& x, const std::vector<double>& y,
                      double lambda0, double gamma) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double phi = lorentz(x[k], lambda0, gamma);
        num += y[k] * phi;
        den += phi * phi;
    }
    return den > 0.0 ? num / den : 0.0;
}

double sse_for(const std::vector<double>& x, const std::vector<double>& y,
               double amplitude, double lambda0, double gamma) {
    double sse = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = amplitude * lorentz(x[k], lambda0, gamma) - y[k];
        sse += r * r;
    }
    return sse;
}

// Solves the 3x3 system M*step = rhs in place; returns false when singular.
bool solve3(double M[3][3], double rhs[3], double step[3]) {
    int piv[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(M[piv[r]][col]) > std::fabs(M[piv[best]][col])) best = r;
        std::swap(piv[col], piv[best]);
        const double p = M[piv[col]][col];
        if (std::fabs(p) < 1e-300) return false;
        for (int r = col + 1; r < 3; ++r) {
            const double f = M[piv[r]][col] / p;
            for (int c2 = col; c2 < 3; ++c2) M[piv[r]][c2] -= f * M[piv[col]][c2];
            rhs[piv[r]] -= f * rhs[piv[col]];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double acc = rhs[piv[row]];
        for (int c2 = row + 1; c2 < 3; ++c2) acc -= M[piv[row]][c2] * step[c2];
        step[row] = acc / M[piv[row]][row];
    }
    return true;
}

} // namespace

double LorentzianFit::eval(double x) const {
    return amplitude * lorentz(x, lambda0, gamma);
}

ModeSpectrum participation_ratios(const EigenBasis& basis) {
    ModeSpectrum spec;
    spec.n_pix = basis.dim;
    spec.modes.resize(basis.dim);
    for (std::size_t m = 0; m < basis.dim; ++m) {
        double s2 = 0.0, s4 = 0.0;
        kern::sum2_sum4(basis.vec(m), basis.dim, s2, s4);
        if (s2 <= 0.0 || s4 <= 0.0)
            throw std::invalid_argument("participation_ratios: zero-norm eigenvector");
        spec.modes[m] = {m, basis.eigenvalues[m],
                         (s2 * s2) / (static_cast<double>(basis.dim) * s4)};
    }
    return spec;
}

PrHistogram pr_histogram(const ModeSpectrum& spectrum, int bin_count) {
    if (bin_count < 8)
        throw std::invalid_argument("pr_histogram: bin_count must be >= 8");
    if (spectrum.modes.empty())
        throw std::invalid_argument("pr_histogram: empty spectrum");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const ModeRecord& m : spectrum.modes) {
        lo = std::min(lo, m.pr);
        hi = std::max(hi, m.pr);
    }
    if (!(hi > lo))
        throw std::invalid_argument("pr_histogram: degenerate PR range");

    PrHistogram h;
    h.bin_count = bin_count;
    h.bin_edges.resize(bin_count + 1);
    const double width = (hi - lo) / bin_count;
    for (int b = 0; b <= bin_count; ++b) h.bin_edges[b] = lo + width * b;
    h.bin_edges[bin_count] = hi;  // exact upper edge despite rounding
    h.counts.assign(bin_count, 0);
    for (const ModeRecord& m : spectrum.modes) {
        int b = static_cast<int>((m.pr - lo) / width);
        if (b >= bin_count) b = bin_count - 1;  // right-closed final bin
        ++h.counts[b];
    }
    return h;
}

LorentzianFit fit_lorentzian(const PrHistogram& hist) {
    const int nb = hist.bin_count;
    std::vector<double> x(nb), y(nb);
    int nonempty = 0;
    for (int b = 0; b < nb; ++b) {
        x[b] = hist.center(b);
        y[b] = static_cast<double>(hist.counts[b]);
        if (hist.counts[b] > 0) ++nonempty;
    }
    if (nonempty < 8)
        throw std::invalid_argument("fit_lorentzian: fewer than 8 non-empty bins");

    const double range = x.back() - x.front();
    const double gamma_min = 0.5 * (hist.bin_edges[1] - hist.bin_edges[0]);
    const double gamma_max = range;

    // Coarse grid: every bin center x 24 log-spaced widths.
    constexpr int kGammaSteps = 24;
    double best_sse = std::numeric_limits<double>::infinity();
    double l0 = x[nb / 2], gm = gamma_min, amp = 0.0;
    const double log_lo = std::log(gamma_min), log_hi = std::log(gamma_max);
    for (int b = 0; b < nb; ++b) {
        for (int gi = 0; gi < kGammaSteps; ++gi) {
            const double g = std::exp(log_lo + (log_hi - log_lo) * gi / (kGammaSteps - 1));
            const double a = best_amplitude(x, y, x[b], g);
            if (a <= 0.0) continue;
            const double sse = sse_for(x, y, a, x[b], g);
            if (sse < best_sse) {
                best_sse = sse;
                l0 = x[b];
                gm = g;
                amp = a;
            }
        }
    }
    if (amp <= 0.0)
        throw std::runtime_error("fit_lorentzian: no usable starting point");

    // Damped Gauss-Newton on (amplitude, lambda0, gamma).
    constexpr int kIters = 60;
    for (int it = 0; it < kIters; ++it) {
        double JtJ[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        double Jtr[3] = {0, 0, 0};
        for (int k = 0; k < nb; ++k) {
            const double dx = x[k] - l0;
            const double den = dx * dx + gm * gm;
            const double phi = kInvPi * gm / den;
            const double r = amp * phi - y[k];
            const double J[3] = {
                phi,                                        // d/dA
                amp * kInvPi * gm * 2.0 * dx / (den * den), // d/dlambda0
                amp * kInvPi * (dx * dx - gm * gm) / (den * den),  // d/dgamma
            };
            for (int a2 = 0; a2 < 3; ++a2) {
                Jtr[a2] += J[a2] * r;
                for (int b2 = 0; b2 < 3; ++b2) JtJ[a2][b2] += J[a2] * J[b2];
            }
        }
        double step[3];
        double rhs[3] = {-Jtr[0], -Jtr[1], -Jtr[2]};
        if (!solve3(JtJ, rhs, step)) break;

        // Step halving against the current SSE; bounds re-imposed each try.
        const double sse0 = sse_for(x, y, amp, l0, gm);
        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h < 12; ++h, scale *= 0.5) {
            const double a_try = amp + scale * step[0];
            double l_try = l0 + scale * step[1];
            double g_try = gm + scale * step[2];
            l_try = std::clamp(l_try, x.front(), x.back());
            g_try = std::clamp(g_try, 1e-12, gamma_max);
            if (a_try <= 0.0) continue;
            const double sse = sse_for(x, y, a_try, l_try, g_try);
            if (sse < sse0) {
                amp = a_try;
                l0 = l_try;
                gm = g_try;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }

    if (!std::isfinite(amp) || !std::isfinite(l0) || !std::isfinite(gm))
        throw std::runtime_error("fit_lorentzian: fit diverged");

    LorentzianFit fit;
    fit.amplitude = amp;
    fit.lambda0 = l0;
    fit.gamma = gm;
    fit.residual = std::sqrt(sse_for(x, y, amp, l0, gm) / nb);
    return fit;
}

ModeSelection select_modes(const ModeSpectrum& spectrum, const LorentzianFit& fit,
                           double c) {
    if (!(c > 0.0))
        throw std::invalid_argument("select_modes: threshold multiplier must be positive");
    double min_pr = std::numeric_limits<double>::infinity();
    for (const ModeRecord& m : spectrum.modes) min_pr = std::min(min_pr, m.pr);

    ModeSelection sel;
    sel.threshold_multiplier = c;
    sel.pr_threshold = std::max(min_pr, fit.lambda0 - c * fit.gamma);
    sel.keep_mask.assign(spectrum.modes.size(), 0);
    for (std::size_t i = 0; i < spectrum.modes.size(); ++i) {
        if (spectrum.modes[i].pr < sel.pr_threshold) {
            sel.keep_mask[i] = 1;
            ++sel.kept_count;
        }
    }
    sel.discarded_count = spectrum.modes.size() - sel.kept_count;
    if (sel.kept_count == 0)
        throw EmptySelectionError(
            "select_modes: no mode below PR threshold; fall back to keeping all modes");

    // Diagnostic band extents: maximal kept runs at either end of the
    // ascending-eigenvalue ordering.
    std::size_t lo_run = 0;
    while (lo_run < sel.keep_mask.size() && sel.keep_mask[lo_run]) ++lo_run;
    if (lo_run > 0) {
        sel.low_band.mode_count = lo_run;
        sel.low_band.lambda_min = spectrum.modes.front().eigenvalue;
        sel.low_band.lambda_max = spectrum.modes[lo_run - 1].eigenvalue;
    }
    std::size_t hi_run = 0;
    while (hi_run < sel.keep_mask.size() - lo_run &&
           sel.keep_mask[sel.keep_mask.size() - 1 - hi_run])
        ++hi_run;
    if (hi_run > 0) {
        sel.high_band.mode_count = hi_run;
        sel.high_band.lambda_min =
            spectrum.modes[spectrum.modes.size() - hi_run].eigenvalue;
        sel.high_band.lambda_max = spectrum.modes.back().eigenvalue;
    }
    return sel;
}

double median_pr(const ModeSpectrum& spectrum) {
    if (spectrum.modes.empty())
        throw std::invalid_argument("median_pr: empty spectrum");
    std::vector<double> pr(spectrum.modes.size());
    for (std::size_t i = 0; i < pr.size(); ++i) pr[i] = spectrum.modes[i].pr;
    const std::size_t mid = pr.size() / 2;
    std::nth_element(pr.begin(), pr.begin() + mid, pr.end());
    double med = pr[mid];
    if (pr.size() % 2 == 0) {
        // mean of the two middle order statistics
        med = 0.5 * (med + *std::max_element(pr.begin(), pr.begin() + mid));
    }
    return med;
}

double fraction_below(const ModeSpectrum& spectrum, double threshold) {
    if (spectrum.modes.empty())
        throw std::invalid_argument("fraction_below: empty spectrum");
    std::size_t below = 0;
    for (const ModeRecord& m : spectrum.modes)
        if (m.pr < threshold) ++below;
    return static_cast<double>(below) / static_cast<double>(spectrum.modes.size());
}

void dump_spectrum_csv(const ModeSpectrum& spectrum, const ModeSelection& sel,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "mode_index,eigenvalue,participation_ratio,kept\n";
    out.precision(17);
    for (std::size_t i = 0; i < spectrum.modes.size(); ++i) {
        const ModeRecord& m = spectrum.modes[i];
        out << m.mode_index << ',' << m.eigenvalue << ',' << m.pr << ','
            << (sel.keep_mask.empty() ? 1 : int(sel.keep_mask[i])) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void dump_histogram_csv(const PrHistogram& hist, const LorentzianFit& fit,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "bin_center,count,fit_value\n";
    out.precision(17);
    for (int b = 0; b < hist.bin_count; ++b) {
        const double c = hist.center(b);
        out << c << ',' << hist.counts[b] << ',' << fit.eval(c) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace qloc
