#pragma once

// Square grayscale image container plus file I/O (PGM P2/P5, grayscale
// PNG 8/16-bit) and optional Gaussian pre-smoothing. Intensities live in
// [0,1] after load; quantization back to integer depth happens only when
// saving.

#include <cstdint>
#include <string>
#include <vector>

namespace qloc {

struct ImageGrid {
    int n = 0;                 // side length, image is n x n
    std::vector<double> pix;   // row-major, pixel (r,c) at r*n + c

    ImageGrid() = default;
    ImageGrid(int side, double fill = 0.0)
        : n(side), pix(static_cast<std::size_t>(side) * side, fill) {}

    double& at(int r, int c) { return pix[static_cast<std::size_t>(r) * n + c]; }
    double at(int r, int c) const { return pix[static_cast<std::size_t>(r) * n + c]; }
    std::size_t size() const { return pix.size(); }
};

struct SmoothingSpec {
    bool enabled = false;
    double sigma = 0.5;     // pixels
    int kernel_radius = 0;  // 0 = derive as ceil(3*sigma)
};

// Reads a PGM (P2 or P5) or grayscale PNG file. Values are scaled to
// [0,1] by the format's maxval. Throws std::runtime_error on unsupported
// format, non-square or zero-size images, or I/O failure.
ImageGrid load_image(const std::string& path);

// Writes PGM (P5) or PNG depending on the file extension (.pgm/.png).
// Values are clamped to [0,1] and quantized round-half-up to bit_depth
// (8 or 16). Throws std::runtime_error on unwritable path.
void save_image(const ImageGrid& img, const std::string& path, int bit_depth = 8);

// Sampled normalized Gaussian taps for the given sigma and radius
// (kernel length 2*radius+1, sums to 1). Exposed for tests.
std::vector<double> gaussian_kernel(double sigma, int radius);

// Separable Gaussian convolution with symmetric (edge-repeat) border
// reflection, output clamped to [0,1]. spec.enabled must be true;
// invoking with a disabled spec is a contract violation and throws
// std::invalid_argument.
ImageGrid gaussian_smooth(const ImageGrid& img, const SmoothingSpec& spec);

} // namespace qloc
