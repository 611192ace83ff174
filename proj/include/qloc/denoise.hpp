#pragma once

// Adaptive-basis projection, selective reconstruction, and the end-to-end
// denoising pipeline: smooth (optional) -> estimate hbar -> build H ->
// eigendecompose -> participation ratios -> histogram + Lorentzian fit ->
// select modes -> project -> reconstruct.

#include <cmath>
#include <string>
#include <vector>

#include "qloc/eigen.hpp"
#include "qloc/hamiltonian.hpp"
#include "qloc/image.hpp"
#include "qloc/localization.hpp"

namespace qloc {

struct PipelineConfig {
    SmoothingSpec smoothing;  // disabled by default
    double alpha = 1.0;
    double mass = 1.0;
    LaplacianMode laplacian = LaplacianMode::literal;
    double threshold_c = 1.0;
    int bin_count = 64;
    std::size_t eigen_cap = kDefaultEigenCap;
    // Baseline comparator: skip classification/selection, keep every mode.
    bool all_modes = false;
};

struct DenoiseReport {
    std::size_t kept_count = 0;
    std::size_t discarded_count = 0;
    double compression_ratio = 0.0;  // discarded / total
    double hbar = 0.0;
    double coupling_t = 0.0;
    double pr_threshold = 0.0;
    double fit_lambda0 = 0.0;
    double fit_gamma = 0.0;
    double fit_amplitude = 0.0;
    double fit_residual = 0.0;
    bool all_modes = false;
    bool fallback_keep_all = false;  // empty selection, kept everything
    EigenvalueBand low_band;
    EigenvalueBand high_band;
    // Filled by callers that hold a clean reference; NaN otherwise.
    double psnr_db = std::nan("");
    double ssim = std::nan("");
    // Stage wall times, seconds.
    double t_eigen_s = 0.0;
    double t_fit_s = 0.0;
    double t_project_s = 0.0;
    double t_reconstruct_s = 0.0;
};

struct PipelineResult {
    ImageGrid denoised;
    DenoiseReport report;
};

// Intermediate products, exposed so callers (analysis command, bench
// harness) can reuse one eigendecomposition across several selections.
struct PipelineArtifacts {
    ImageGrid work;  // smoothed (or original) input actually processed
    EigenBasis basis;
    ModeSpectrum spectrum;
    PrHistogram histogram;
    LorentzianFit fit;
    ModeSelection selection;
    bool classified = false;  // spectrum/histogram/fit/selection valid
};

// c_n = e_n . vec(img)
std::vector<double> project(const ImageGrid& img, const EigenBasis& basis);

// vec(out) = sum over kept modes of c_n e_n. Values may leave [0,1]; they
// are clamped only when saved. The mask overload exists for tests that
// need selections select_modes would refuse to produce (e.g. empty).
ImageGrid reconstruct(const std::vector<double>& coeffs, const EigenBasis& basis,
                      const std::vector<char>& keep_mask);
ImageGrid reconstruct(const std::vector<double>& coeffs, const EigenBasis& basis,
                      const ModeSelection& sel);

PipelineResult denoise_pipeline(const ImageGrid& img, const PipelineConfig& config,
                                PipelineArtifacts* artifacts = nullptr);

// Flat key=value serialization of the report (one pair per line).
std::string report_to_kv(const DenoiseReport& report);
void write_report_kv(const DenoiseReport& report, const std::string& path);

} // namespace qloc
