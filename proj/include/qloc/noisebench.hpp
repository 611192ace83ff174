#pragma once

// Poisson noise synthesis at a target SNR, image-quality metrics (PSNR,
// SSIM), deterministic phantoms, and the benchmark harness that runs the
// pipeline in all-modes vs selected-modes configurations.

#include <cstdint>
#include <string>
#include <vector>

#include "qloc/denoise.hpp"
#include "qloc/image.hpp"

namespace qloc {

// splitmix64: the full generator state is one 64-bit word; next() adds the
// golden-gamma constant and finalizes with two xor-shift multiplies
// (Steele, Lea & Flood 2014). Chosen because the whole algorithm fits in
// ten lines and reproduces bit-identically on every platform.
struct Splitmix64 {
    std::uint64_t state = 0;

    explicit Splitmix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0,1) from the top 53 bits.
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Stateless mixing of a base seed with a stream index (pixel, cell, ...),
// so independent streams can be drawn in any order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

// One Poisson draw. Inversion by sequential search below mean 30, the PTRS
// transformed-rejection sampler (Hormann 1993) above it.
std::uint64_t poisson_draw(Splitmix64& rng, double mean);

struct NoiseSpec {
    double target_snr_db = 15.0;
    std::uint64_t seed = 0;
    double achieved_snr_db = 0.0;  // filled by add_poisson_noise
    double q = 0.0;                // photon-count scale found by the search
};

// y_i = Poisson(q * x_i)/q with q bisected over [1e-2, 1e8] until the
// achieved SNR is within +-0.3 dB of the target. Deterministic given
// (img, seed, target): pixel i always consumes the stream mix_seed(seed, i).
// Throws std::invalid_argument on an all-zero image, std::runtime_error
// when the target cannot be reached inside the q range.
ImageGrid add_poisson_noise(const ImageGrid& img, NoiseSpec& spec);

// 10*log10(sum x^2 / sum (x-y)^2); +infinity when the images are identical.
double snr_db(const ImageGrid& clean, const ImageGrid& noisy);

// 10*log10(1/MSE) on the normalized [0,1] scale; +infinity at MSE 0.
double psnr(const ImageGrid& ref, const ImageGrid& test);

// Mean local SSIM, 11x11 Gaussian window sigma 1.5, K1=0.01, K2=0.03,
// dynamic range 1, aggregated over fully valid window positions only.
// Requires N >= 11.
double ssim(const ImageGrid& ref, const ImageGrid& test);

enum class PhantomKind { blocks, disks, shepp_logan_like };

// Deterministic piecewise-constant phantom: near-zero background with a
// dominant bright region, faint dark plateaus for texture, and (for the
// non-blocks kinds) curved shapes. Requires N >= 16.
ImageGrid make_phantom(PhantomKind kind, int N, std::uint64_t seed);

PhantomKind phantom_kind_from_string(const std::string& name);

struct BenchRow {
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    std::string method;  // "all_modes" | "selected_modes"
    double ssim = 0.0;
    double psnr_db = 0.0;
    double compression_ratio = 0.0;
    double t_eigen_s = 0.0;
    double t_fit_s = 0.0;
    double t_reconstruct_s = 0.0;
};

// For each (snr, seed): synthesize one noisy realization (its stream is
// derived from seed and snr, not the method), run both pipeline arms on
// it, and emit one row per arm. The eigendecomposition is shared between
// the arms of a cell: both see the same operator, so re-solving it would
// only duplicate work.
std::vector<BenchRow> bench_run(const ImageGrid& phantom,
                                const std::vector<double>& snr_list,
                                const std::vector<std::uint64_t>& seeds,
                                const PipelineConfig& config);

std::string bench_csv(const std::vector<BenchRow>& rows);

} // namespace qloc
