#include "qloc/denoise.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qloc/kernels.hpp"

namespace qloc {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::vector<double> project(const ImageGrid& img, const EigenBasis& basis) {
    if (img.size() != basis.dim)
        throw std::invalid_argument("project: image/basis dimension mismatch");
    std::vector<double> c(basis.dim);
    for (std::size_t m = 0; m < basis.dim; ++m)
        c[m] = kern::dot(basis.vec(m), img.pix.data(), basis.dim);
    return c;
}

ImageGrid reconstruct(const std::vector<double>& coeffs, const EigenBasis& basis,
                      const std::vector<char>& keep_mask) {
    if (coeffs.size() != basis.dim || keep_mask.size() != basis.dim)
        throw std::invalid_argument("reconstruct: dimension mismatch");
    const int n = static_cast<int>(std::lround(std::sqrt(double(basis.dim))));
    ImageGrid out(n, 0.0);
    for (std::size_t m = 0; m < basis.dim; ++m)
        if (keep_mask[m] && coeffs[m] != 0.0)
            kern::axpy(coeffs[m], basis.vec(m), out.pix.data(), basis.dim);
    return out;
}

ImageGrid reconstruct(const std::vector<double>& coeffs, const EigenBasis& basis,
                      const ModeSelection& sel) {
    return reconstruct(coeffs, basis, sel.keep_mask);
}

PipelineResult denoise_pipeline(const ImageGrid& img, const PipelineConfig& config,
                                PipelineArtifacts* artifacts) {
    using clock = std::chrono::steady_clock;
    PipelineResult res;
    DenoiseReport& rep = res.report;
    rep.all_modes = config.all_modes;

    const ImageGrid* work = &img;
    ImageGrid smoothed;
    if (config.smoothing.enabled) {
        smoothed = gaussian_smooth(img, config.smoothing);
        work = &smoothed;
    }

    rep.hbar = estimate_hbar(*work);
    PlanckParams params;
    params.hbar = rep.hbar;
    params.alpha = config.alpha;
    params.mass = config.mass;
    rep.coupling_t = params.coupling();
    const Hamiltonian H = build_hamiltonian(*work, params, config.laplacian);

    auto t0 = clock::now();
    EigenBasis basis = eigendecompose(H, config.eigen_cap);
    rep.t_eigen_s = seconds_since(t0);

    const std::size_t total = basis.dim;
    ModeSpectrum spectrum;
    PrHistogram hist;
    LorentzianFit fit;
    ModeSelection sel;
    bool classified = false;

    if (config.all_modes) {
        sel.keep_mask.assign(total, 1);
        sel.kept_count = total;
        sel.pr_threshold = 1.0;
        sel.threshold_multiplier = config.threshold_c;
    } else {
        t0 = clock::now();
        spectrum = participation_ratios(basis);
        hist = pr_histogram(spectrum, config.bin_count);
        fit = fit_lorentzian(hist);
        try {
            sel = select_modes(spectrum, fit, config.threshold_c);
        } catch (const EmptySelectionError&) {
            sel.keep_mask.assign(total, 1);
            sel.kept_count = total;
            sel.pr_threshold = fit.lambda0 - config.threshold_c * fit.gamma;
            sel.threshold_multiplier = config.threshold_c;
            rep.fallback_keep_all = true;
        }
        rep.t_fit_s = seconds_since(t0);
        rep.fit_lambda0 = fit.lambda0;
        rep.fit_gamma = fit.gamma;
        rep.fit_amplitude = fit.amplitude;
        rep.fit_residual = fit.residual;
        classified = true;
    }

    rep.kept_count = sel.kept_count;
    rep.discarded_count = total - sel.kept_count;
    rep.compression_ratio = static_cast<double>(rep.discarded_count) / total;
    rep.pr_threshold = sel.pr_threshold;
    rep.low_band = sel.low_band;
    rep.high_band = sel.high_band;

    t0 = clock::now();
    const std::vector<double> coeffs = project(*work, basis);
    rep.t_project_s = seconds_since(t0);

    t0 = clock::now();
    res.denoised = reconstruct(coeffs, basis, sel.keep_mask);
    rep.t_reconstruct_s = seconds_since(t0);

    if (artifacts) {
        artifacts->work = config.smoothing.enabled ? std::move(smoothed) : img;
        artifacts->basis = std::move(basis);
        artifacts->spectrum = std::move(spectrum);
        artifacts->histogram = std::move(hist);
        artifacts->fit = fit;
        artifacts->selection = std::move(sel);
        artifacts->classified = classified;
    }
    return res;
}

std::string report_to_kv(const DenoiseReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "kept_count=" << r.kept_count << '\n'
        << "discarded_count=" << r.discarded_count << '\n'
        << "compression_ratio=" << r.compression_ratio << '\n'
        << "hbar=" << r.hbar << '\n'
        << "coupling_t=" << r.coupling_t << '\n'
        << "pr_threshold=" << r.pr_threshold << '\n'
        << "fit_lambda0=" << r.fit_lambda0 << '\n'
        << "fit_gamma=" << r.fit_gamma << '\n'
        << "fit_amplitude=" << r.fit_amplitude << '\n'
        << "fit_residual=" << r.fit_residual << '\n'
        << "all_modes=" << (r.all_modes ? 1 : 0) << '\n'
        << "fallback_keep_all=" << (r.fallback_keep_all ? 1 : 0) << '\n'
        << "low_band_modes=" << r.low_band.mode_count << '\n'
        << "low_band_lambda_min=" << r.low_band.lambda_min << '\n'
        << "low_band_lambda_max=" << r.low_band.lambda_max << '\n'
        << "high_band_modes=" << r.high_band.mode_count << '\n'
        << "high_band_lambda_min=" << r.high_band.lambda_min << '\n'
        << "high_band_lambda_max=" << r.high_band.lambda_max << '\n';
    if (!std::isnan(r.psnr_db)) out << "psnr_db=" << r.psnr_db << '\n';
    if (!std::isnan(r.ssim)) out << "ssim=" << r.ssim << '\n';
    out << "t_eigen_s=" << r.t_eigen_s << '\n'
        << "t_fit_s=" << r.t_fit_s << '\n'
        << "t_project_s=" << r.t_project_s << '\n'
        << "t_reconstruct_s=" << r.t_reconstruct_s << '\n';
    return out.str();
}

void write_report_kv(const DenoiseReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << report_to_kv(report);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace qloc
