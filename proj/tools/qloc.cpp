// qloc: command-line driver for the adaptive-eigenbasis denoiser.
//
// Subcommands: denoise, analyze, noise, metrics, bench, sweep-hbar. All
// report lines on stdout are flat key=value pairs. Exit code is 0 only if
// every requested output file was written; on failure the partial outputs
// are removed.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qloc/denoise.hpp"
#include "qloc/image.hpp"
#include "qloc/noisebench.hpp"
#include "qloc/svgplot.hpp"

namespace {

// Tracks files created by the current command so a failure can undo them.
struct OutputTracker {
    std::vector<std::string> paths;

    void will_write(const std::string& p) { paths.push_back(p); }

    void remove_all() {
        for (const std::string& p : paths) std::remove(p.c_str());
    }
};

// Flat key=value config file. Blank lines and '#' comments are skipped.
std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot read '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--config", "line " + std::to_string(lineno) +
                                                       ": expected key=value");
        auto trim = [](std::string s) {
            const std::size_t b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const std::size_t e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw CLI::ValidationError("--config", "empty key");
        kv[key] = val;
    }
    return kv;
}

// Pipeline knobs shared by denoise/analyze/bench/sweep-hbar, plus the
// config-file plumbing. Flags override file values, which override the
// built-in defaults; this is done by seeding each flag's default from the
// config before CLI11 parses the command line.
struct PipelineOpts {
    double alpha = 1.0;
    double mass = 1.0;
    double threshold_c = 1.0;
    int bins = 64;
    double smooth_sigma = 0.0;  // 0 disables pre-smoothing
    int smooth_radius = 0;      // 0 derives ceil(3*sigma)
    std::string laplacian = "literal";
    std::size_t eigen_cap = qloc::kDefaultEigenCap;
    std::string config_path;

    void attach(CLI::App* cmd, const std::map<std::string, std::string>& cfg) {
        auto seed_d = [&](const char* k, double& v) {
            auto it = cfg.find(k);
            if (it != cfg.end()) v = std::stod(it->second);
        };
        auto seed_i = [&](const char* k, int& v) {
            auto it = cfg.find(k);
            if (it != cfg.end()) v = std::stoi(it->second);
        };
        auto it = cfg.find("laplacian");
        if (it != cfg.end()) laplacian = it->second;
        it = cfg.find("eigen_cap");
        if (it != cfg.end()) eigen_cap = std::stoull(it->second);
        seed_d("alpha", alpha);
        seed_d("mass", mass);
        seed_d("threshold_c", threshold_c);
        seed_d("smooth_sigma", smooth_sigma);
        seed_i("bins", bins);
        seed_i("smooth_radius", smooth_radius);

        cmd->add_option("--config", config_path,
                        "flat key=value config file (flags override it)");
        cmd->add_option("--alpha", alpha, "Planck-constant scale factor");
        cmd->add_option("--mass", mass, "particle mass in the kinetic term");
        cmd->add_option("--threshold-c", threshold_c,
                        "threshold multiplier c in lambda0 - c*gamma");
        cmd->add_option("--bins", bins, "PR histogram bin count");
        cmd->add_option("--smooth-sigma", smooth_sigma,
                        "Gaussian pre-smoothing sigma (0 = off)");
        cmd->add_option("--smooth-radius", smooth_radius,
                        "smoothing kernel radius (0 = derived)");
        cmd->add_option("--laplacian", laplacian, "laplacian mode")
            ->check(CLI::IsMember({"literal", "no_row_wrap"}));
        cmd->add_option("--eigen-cap", eigen_cap, "max pixel count for the dense solver");
    }

    qloc::PipelineConfig to_config(bool all_modes = false) const {
        qloc::PipelineConfig c;
        c.smoothing.enabled = smooth_sigma > 0.0;
        c.smoothing.sigma = smooth_sigma;
        c.smoothing.kernel_radius = smooth_radius;
        c.alpha = alpha;
        c.mass = mass;
        c.laplacian = laplacian == "literal" ? qloc::LaplacianMode::literal
                                             : qloc::LaplacianMode::no_row_wrap;
        c.threshold_c = threshold_c;
        c.bin_count = bins;
        c.eigen_cap = eigen_cap;
        c.all_modes = all_modes;
        return c;
    }
};

// Strict comma-separated list parsing. CLI11's own conversion quietly
// turns an empty token into 0.0, so "--snrs ''" would run a 0 dB cell
// instead of erroring; these reject empty or partially-numeric tokens.
template <typename T, typename Conv>
std::vector<T> parse_list(const std::string& s, const char* flag, Conv conv) {
    std::vector<T> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = s.find(',', pos);
        const std::string tok =
            s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t used = 0;
        T v{};
        try {
            v = conv(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (tok.empty() || used != tok.size())
            throw CLI::ValidationError(flag, "bad list entry '" + tok + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const char* flag) {
    return parse_list<double>(s, flag,
                              [](const std::string& t, std::size_t* n) { return std::stod(t, n); });
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s, const char* flag) {
    return parse_list<std::uint64_t>(s, flag, [](const std::string& t, std::size_t* n) {
        return static_cast<std::uint64_t>(std::stoull(t, n));
    });
}

std::string path_stem(const std::string& path) {
    const std::size_t slash = path.find_last_of("/\\");
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path;
    return path.substr(0, dot);
}

void print_kv(const char* key, double v) {
    std::printf("%s=%.17g\n", key, v);
}

// ---- denoise ----------------------------------------------------------

int run_denoise(const std::string& input, const std::string& output,
                const PipelineOpts& opts, bool all_modes,
                const std::string& report_path, const std::string& spectrum_csv,
                int bit_depth) {
    OutputTracker track;
    try {
        const qloc::ImageGrid img = qloc::load_image(input);
        qloc::PipelineArtifacts art;
        const qloc::PipelineResult res =
            qloc::denoise_pipeline(img, opts.to_config(all_modes), &art);

        track.will_write(output);
        qloc::save_image(res.denoised, output, bit_depth);
        std::fputs(qloc::report_to_kv(res.report).c_str(), stdout);
        if (!report_path.empty()) {
            track.will_write(report_path);
            qloc::write_report_kv(res.report, report_path);
        }
        if (!spectrum_csv.empty()) {
            track.will_write(spectrum_csv);
            qloc::dump_spectrum_csv(art.spectrum, art.selection, spectrum_csv);
        }
        return 0;
    } catch (const std::exception& e) {
        track.remove_all();
        std::fprintf(stderr, "denoise: %s\n", e.what());
        return 1;
    }
}

// ---- analyze ----------------------------------------------------------

int run_analyze(const std::string& input, std::string prefix, const PipelineOpts& opts) {
    OutputTracker track;
    try {
        if (prefix.empty()) prefix = path_stem(input);
        const qloc::ImageGrid img = qloc::load_image(input);
        qloc::PipelineArtifacts art;
        const qloc::PipelineResult res =
            qloc::denoise_pipeline(img, opts.to_config(false), &art);

        const std::string spectrum_path = prefix + "_spectrum.csv";
        const std::string hist_path = prefix + "_histogram.csv";
        const std::string scatter_path = prefix + "_scatter.svg";
        const std::string histsvg_path = prefix + "_histogram.svg";

        track.will_write(spectrum_path);
        qloc::dump_spectrum_csv(art.spectrum, art.selection, spectrum_path);
        track.will_write(hist_path);
        qloc::dump_histogram_csv(art.histogram, art.fit, hist_path);
        track.will_write(scatter_path);
        qloc::write_text_file(scatter_path,
                              qloc::spectrum_scatter_svg(art.spectrum, art.selection));
        track.will_write(histsvg_path);
        qloc::write_text_file(
            histsvg_path,
            qloc::pr_histogram_svg(art.histogram, art.fit, art.selection.pr_threshold));

        std::fputs(qloc::report_to_kv(res.report).c_str(), stdout);
        print_kv("median_pr", qloc::median_pr(art.spectrum));
        print_kv("localized_fraction",
                 qloc::fraction_below(art.spectrum, art.selection.pr_threshold));
        return 0;
    } catch (const std::exception& e) {
        track.remove_all();
        std::fprintf(stderr, "analyze: %s\n", e.what());
        return 1;
    }
}

// ---- noise ------------------------------------------------------------

int run_noise(const std::string& input, const std::string& output, double snr,
              std::uint64_t seed, int bit_depth) {
    OutputTracker track;
    try {
        const qloc::ImageGrid img = qloc::load_image(input);
        qloc::NoiseSpec spec;
        spec.target_snr_db = snr;
        spec.seed = seed;
        const qloc::ImageGrid noisy = qloc::add_poisson_noise(img, spec);
        track.will_write(output);
        qloc::save_image(noisy, output, bit_depth);
        print_kv("target_snr_db", spec.target_snr_db);
        print_kv("achieved_snr_db", spec.achieved_snr_db);
        print_kv("q", spec.q);
        std::printf("seed=%llu\n", static_cast<unsigned long long>(seed));
        return 0;
    } catch (const std::exception& e) {
        track.remove_all();
        std::fprintf(stderr, "noise: %s\n", e.what());
        return 1;
    }
}

// ---- metrics ----------------------------------------------------------

int run_metrics(const std::string& ref_path, const std::string& test_path) {
    try {
        const qloc::ImageGrid ref = qloc::load_image(ref_path);
        const qloc::ImageGrid test = qloc::load_image(test_path);
        print_kv("psnr_db", qloc::psnr(ref, test));
        print_kv("ssim", qloc::ssim(ref, test));
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "metrics: %s\n", e.what());
        return 1;
    }
}

// ---- bench ------------------------------------------------------------

int run_bench(const std::string& phantom_name, int size, std::uint64_t phantom_seed,
              const std::vector<double>& snrs, const std::vector<std::uint64_t>& seeds,
              const std::string& out_path, const PipelineOpts& opts) {
    OutputTracker track;
    try {
        const qloc::ImageGrid phantom =
            qloc::make_phantom(qloc::phantom_kind_from_string(phantom_name), size,
                               phantom_seed);
        const std::vector<qloc::BenchRow> rows =
            qloc::bench_run(phantom, snrs, seeds, opts.to_config(false));
        track.will_write(out_path);
        qloc::write_text_file(out_path, qloc::bench_csv(rows));
        std::printf("rows=%zu\n", rows.size());
        return 0;
    } catch (const std::exception& e) {
        track.remove_all();
        std::fprintf(stderr, "bench: %s\n", e.what());
        return 1;
    }
}

// ---- sweep-hbar -------------------------------------------------------

int run_sweep(const std::string& input, std::string prefix,
              const std::vector<double>& alphas, const PipelineOpts& opts) {
    OutputTracker track;
    try {
        if (prefix.empty()) prefix = path_stem(input);
        const qloc::ImageGrid img = qloc::load_image(input);

        std::ostringstream summary;
        summary.precision(17);
        summary << "alpha,median_pr,localized_fraction\n";
        for (double a : alphas) {
            PipelineOpts per = opts;
            per.alpha = a;
            qloc::PipelineArtifacts art;
            qloc::denoise_pipeline(img, per.to_config(false), &art);

            char tag[64];
            std::snprintf(tag, sizeof tag, "%s_alpha%g_spectrum.csv", prefix.c_str(), a);
            track.will_write(tag);
            qloc::dump_spectrum_csv(art.spectrum, art.selection, tag);

            const double med = qloc::median_pr(art.spectrum);
            const double loc =
                qloc::fraction_below(art.spectrum, art.selection.pr_threshold);
            summary << a << ',' << med << ',' << loc << '\n';
            std::printf("alpha=%.17g median_pr=%.17g localized_fraction=%.17g\n", a, med,
                        loc);
        }
        const std::string summary_path = prefix + "_summary.csv";
        track.will_write(summary_path);
        qloc::write_text_file(summary_path, summary.str());
        return 0;
    } catch (const std::exception& e) {
        track.remove_all();
        std::fprintf(stderr, "sweep-hbar: %s\n", e.what());
        return 1;
    }
}

// Pre-scan for --config so file values can seed flag defaults before the
// real parse; CLI11 then applies command-line overrides on top.
std::map<std::string, std::string> scan_config(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return load_config_file(argv[i + 1]);
        if (a.rfind("--config=", 0) == 0) return load_config_file(a.substr(9));
    }
    return {};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive-eigenbasis image denoising"};
    app.require_subcommand(1);

    std::map<std::string, std::string> cfg;
    try {
        cfg = scan_config(argc, argv);
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "qloc: %s\n", e.what());
        return 1;
    }

    // denoise
    std::string dn_in, dn_out, dn_report, dn_spectrum;
    bool dn_all = false;
    int dn_bits = 8;
    PipelineOpts dn_opts;
    CLI::App* dn = app.add_subcommand("denoise", "denoise an image");
    dn->add_option("input", dn_in, "input image (PGM or PNG)")->required();
    dn->add_option("output", dn_out, "output image")->required();
    dn_opts.attach(dn, cfg);
    dn->add_flag("--all-modes", dn_all, "skip selection, reconstruct from every mode");
    dn->add_option("--report", dn_report, "write the key=value report to this file");
    dn->add_option("--spectrum-csv", dn_spectrum, "dump the mode spectrum CSV");
    dn->add_option("--bits", dn_bits, "output bit depth")->check(CLI::IsMember({8, 16}));

    // analyze
    std::string an_in, an_prefix;
    PipelineOpts an_opts;
    CLI::App* an = app.add_subcommand("analyze", "emit spectrum/histogram CSVs and SVGs");
    an->add_option("input", an_in, "input image")->required();
    an_opts.attach(an, cfg);
    an->add_option("--out-prefix", an_prefix, "output path prefix (default: input stem)");

    // noise
    std::string no_in, no_out;
    double no_snr = 15.0;
    std::uint64_t no_seed = 0;
    int no_bits = 8;
    CLI::App* no = app.add_subcommand("noise", "add Poisson noise at a target SNR");
    no->add_option("input", no_in, "input image")->required();
    no->add_option("output", no_out, "output image")->required();
    no->add_option("--snr-db", no_snr, "target SNR in dB")->required();
    no->add_option("--seed", no_seed, "noise stream seed");
    no->add_option("--bits", no_bits, "output bit depth")->check(CLI::IsMember({8, 16}));

    // metrics
    std::string me_ref, me_test;
    CLI::App* me = app.add_subcommand("metrics", "print psnr/ssim for two images");
    me->add_option("reference", me_ref, "reference image")->required();
    me->add_option("test", me_test, "test image")->required();

    // bench
    std::string be_phantom = "blocks", be_out = "bench.csv";
    int be_size = 64;
    std::uint64_t be_phantom_seed = 7;
    std::string be_snrs, be_seeds;
    PipelineOpts be_opts;
    CLI::App* be = app.add_subcommand("bench", "run the all-vs-selected benchmark grid");
    be->add_option("--phantom", be_phantom, "phantom kind")
        ->check(CLI::IsMember({"blocks", "disks", "shepp_logan_like"}));
    be->add_option("--size", be_size, "phantom side length");
    be->add_option("--phantom-seed", be_phantom_seed, "phantom placement seed");
    be->add_option("--snrs", be_snrs, "comma-separated SNR targets (dB)")->required();
    be->add_option("--seeds", be_seeds, "comma-separated noise seeds")->required();
    be->add_option("--out", be_out, "output CSV path");
    be_opts.attach(be, cfg);

    // sweep-hbar
    std::string sw_in, sw_prefix, sw_alphas;
    PipelineOpts sw_opts;
    CLI::App* sw = app.add_subcommand("sweep-hbar", "run analysis across alpha values");
    sw->add_option("input", sw_in, "input image")->required();
    sw->add_option("--alphas", sw_alphas, "comma-separated alpha values")->required();
    sw->add_option("--out-prefix", sw_prefix, "output path prefix (default: input stem)");
    sw_opts.attach(sw, cfg);

    CLI11_PARSE(app, argc, argv);

    if (dn->parsed()) {
        if (dn_all && !dn_spectrum.empty()) {
            std::fprintf(stderr,
                         "denoise: --spectrum-csv requires classification; drop --all-modes\n");
            return 1;
        }
        return run_denoise(dn_in, dn_out, dn_opts, dn_all, dn_report, dn_spectrum, dn_bits);
    }
    if (an->parsed()) return run_analyze(an_in, an_prefix, an_opts);
    if (no->parsed()) return run_noise(no_in, no_out, no_snr, no_seed, no_bits);
    if (me->parsed()) return run_metrics(me_ref, me_test);
    if (be->parsed() || sw->parsed()) {
        try {
            if (be->parsed())
                return run_bench(be_phantom, be_size, be_phantom_seed,
                                 parse_double_list(be_snrs, "--snrs"),
                                 parse_seed_list(be_seeds, "--seeds"), be_out, be_opts);
            return run_sweep(sw_in, sw_prefix, parse_double_list(sw_alphas, "--alphas"),
                             sw_opts);
        } catch (const CLI::Error& e) {
            std::fprintf(stderr, "qloc: %s\n", e.what());
            return 1;
        }
    }
    return 1;
}
