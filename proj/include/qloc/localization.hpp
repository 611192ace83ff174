#pragma once

// Mode statistics and automatic selection: participation ratios, their
// histogram, the Lorentzian fit to the histogram, and the PR threshold
// that splits localized (kept) from delocalized (discarded) modes.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qloc/eigen.hpp"

namespace qloc {

struct ModeRecord {
    std::size_t mode_index = 0;
    double eigenvalue = 0.0;
    double pr = 0.0;  // participation ratio in (0, 1]
};

struct ModeSpectrum {
    std::size_t n_pix = 0;            // total mode/pixel count
    std::vector<ModeRecord> modes;    // ascending eigenvalue order
};

struct PrHistogram {
    std::vector<double> bin_edges;    // bin_count + 1 ascending edges
    std::vector<std::size_t> counts;  // per bin
    int bin_count = 0;

    double center(int b) const {
        return 0.5 * (bin_edges[b] + bin_edges[b + 1]);
    }
};

struct LorentzianFit {
    double lambda0 = 0.0;    // peak location (PR units)
    double gamma = 0.0;      // HWHM (PR units)
    double amplitude = 0.0;  // count-scale factor
    double residual = 0.0;   // RMS fit error in counts

    double eval(double x) const;  // amplitude * (1/pi) * gamma / ((x-lambda0)^2 + gamma^2)
};

// Eigenvalue extent of a contiguous kept run at one end of the spectrum
// (the shaded low/high bands of the reference plots). Purely diagnostic.
struct EigenvalueBand {
    std::size_t mode_count = 0;  // 0 = band absent
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

struct ModeSelection {
    std::vector<char> keep_mask;  // per mode, 1 = keep
    double pr_threshold = 0.0;
    std::size_t kept_count = 0;
    std::size_t discarded_count = 0;
    double threshold_multiplier = 1.0;
    EigenvalueBand low_band;   // kept run starting at the smallest eigenvalue
    EigenvalueBand high_band;  // kept run ending at the largest eigenvalue
};

// Raised when no mode falls below the threshold; callers are expected to
// fall back to keeping all modes (and say so in their report).
struct EmptySelectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// pr[n] = (sum_i e_in^2)^2 / (n_pix * sum_i e_in^4). Throws
// std::invalid_argument on a zero-norm eigenvector.
ModeSpectrum participation_ratios(const EigenBasis& basis);

// Equal-width bins over [min pr, max pr], final bin right-closed.
// Throws std::invalid_argument for bin_count < 8, an empty spectrum, or a
// degenerate (constant) PR range.
PrHistogram pr_histogram(const ModeSpectrum& spectrum, int bin_count = 64);

// Least-squares Lorentzian fit over bin centers: coarse (lambda0, gamma)
// grid with closed-form amplitude, then damped Gauss-Newton. Deterministic
// for identical input. Throws std::invalid_argument when fewer than 8
// bins are non-empty, std::runtime_error if the fit diverges.
LorentzianFit fit_lorentzian(const PrHistogram& hist);

// Threshold rule: pr_threshold = max(min pr, lambda0 - c*gamma); keep
// strictly below. Throws EmptySelectionError when nothing qualifies.
ModeSelection select_modes(const ModeSpectrum& spectrum, const LorentzianFit& fit,
                           double c = 1.0);

// Median of all PR values (mean of the two middle values for even counts).
double median_pr(const ModeSpectrum& spectrum);

// Fraction of modes with pr strictly below the threshold. Unlike the
// pipeline's keep mask this never falls back to keep-all, so it reads 0
// when the threshold sits at or below the minimum PR.
double fraction_below(const ModeSpectrum& spectrum, double threshold);

// CSV dumps: "mode_index,eigenvalue,participation_ratio,kept" and
// "bin_center,count,fit_value".
void dump_spectrum_csv(const ModeSpectrum& spectrum, const ModeSelection& sel,
                       const std::string& path);
void dump_histogram_csv(const PrHistogram& hist, const LorentzianFit& fit,
                        const std::string& path);

} // namespace qloc
