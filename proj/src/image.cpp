#include "qloc/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <png.h>

namespace qloc {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error(what);
}

bool has_suffix(const std::string& s, const std::string& suf) {
    if (s.size() < suf.size()) return false;
    std::string tail = s.substr(s.size() - suf.size());
    std::transform(tail.begin(), tail.end(), tail.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return tail == suf;
}

// Skips PGM whitespace and '#' comment lines, then reads one token.
std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
                tok.push_back(static_cast<char>(in.get()));
            return tok;
        }
    }
    fail("truncated PGM header");
}

long pgm_int(std::istream& in, const char* what) {
    const std::string tok = pgm_token(in);
    try {
        std::size_t pos = 0;
        const long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail(std::string("bad PGM ") + what + ": '" + tok + "'");
    }
}

ImageGrid finish_load(int w, int h, long maxval, std::vector<double>&& raw) {
    if (w != h) fail("non-square image (" + std::to_string(w) + "x" + std::to_string(h) + ")");
    if (w <= 0) fail("zero-size image");
    ImageGrid img(w);
    const double scale = 1.0 / static_cast<double>(maxval);
    for (std::size_t i = 0; i < raw.size(); ++i) img.pix[i] = raw[i] * scale;
    return img;
}

ImageGrid load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open '" + path + "'");
    const std::string magic = pgm_token(in);
    if (magic != "P2" && magic != "P5") fail("unsupported format (expected P2/P5 PGM): '" + magic + "'");
    const long w = pgm_int(in, "width");
    const long h = pgm_int(in, "height");
    const long maxval = pgm_int(in, "maxval");
    if (maxval <= 0 || maxval > 65535) fail("bad PGM maxval " + std::to_string(maxval));
    if (w <= 0 || h <= 0) fail("zero-size image");
    std::vector<double> raw(static_cast<std::size_t>(w) * h);
    if (magic == "P2") {
        for (double& v : raw) {
            const long p = pgm_int(in, "pixel");
            if (p < 0 || p > maxval) fail("PGM pixel out of range");
            v = static_cast<double>(p);
        }
    } else {
        in.get();  // single whitespace byte after maxval
        const bool wide = maxval > 255;
        std::vector<unsigned char> buf(raw.size() * (wide ? 2 : 1));
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(in.gcount()) != buf.size()) fail("truncated PGM data");
        for (std::size_t i = 0; i < raw.size(); ++i) {
            // P5 stores 16-bit samples most significant byte first
            const unsigned v = wide ? (buf[2 * i] << 8 | buf[2 * i + 1]) : buf[i];
            if (v > static_cast<unsigned long>(maxval)) fail("PGM pixel out of range");
            raw[i] = static_cast<double>(v);
        }
    }
    return finish_load(static_cast<int>(w), static_cast<int>(h), maxval, std::move(raw));
}

struct png_file {
    std::FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;
    bool writing = false;
    ~png_file() {
        if (png) {
            if (writing) png_destroy_write_struct(&png, info ? &info : nullptr);
            else png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        }
        if (fp) std::fclose(fp);
    }
};

ImageGrid load_png(const std::string& path) {
    png_file f;
    f.fp = std::fopen(path.c_str(), "rb");
    if (!f.fp) fail("cannot open '" + path + "'");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, f.fp) != 8 || png_sig_cmp(sig, 0, 8))
        fail("unsupported format (not a PNG): '" + path + "'");
    f.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    f.info = png_create_info_struct(f.png);
    if (!f.png || !f.info) fail("libpng init failed");
    if (setjmp(png_jmpbuf(f.png))) fail("libpng read error in '" + path + "'");
    png_init_io(f.png, f.fp);
    png_set_sig_bytes(f.png, 8);
    png_read_info(f.png, f.info);

    const png_uint_32 w = png_get_image_width(f.png, f.info);
    const png_uint_32 h = png_get_image_height(f.png, f.info);
    const int depth = png_get_bit_depth(f.png, f.info);
    const int color = png_get_color_type(f.png, f.info);
    if (color != PNG_COLOR_TYPE_GRAY) fail("unsupported format (PNG must be grayscale)");
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(f.png);
    png_read_update_info(f.png, f.info);

    const int bytes = depth == 16 ? 2 : 1;
    const long maxval = depth == 16 ? 65535 : 255;
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * bytes);
    std::vector<double> raw(static_cast<std::size_t>(w) * h);
    for (png_uint_32 r = 0; r < h; ++r) {
        png_read_row(f.png, row.data(), nullptr);
        for (png_uint_32 c = 0; c < w; ++c) {
            // libpng hands back 16-bit samples big-endian by default
            const unsigned v = bytes == 2 ? (row[2 * c] << 8 | row[2 * c + 1]) : row[c];
            raw[static_cast<std::size_t>(r) * w + c] = static_cast<double>(v);
        }
    }
    png_read_end(f.png, nullptr);
    return finish_load(static_cast<int>(w), static_cast<int>(h), maxval, std::move(raw));
}

unsigned quantize(double v, unsigned maxval) {
    v = std::clamp(v, 0.0, 1.0);
    // round-half-up of v*maxval
    return static_cast<unsigned>(std::floor(v * maxval + 0.5));
}

void save_pgm(const ImageGrid& img, const std::string& path, int bit_depth) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot write '" + path + "'");
    const unsigned maxval = bit_depth == 16 ? 65535u : 255u;
    out << "P5\n" << img.n << " " << img.n << "\n" << maxval << "\n";
    for (double v : img.pix) {
        const unsigned q = quantize(v, maxval);
        if (bit_depth == 16) out.put(static_cast<char>(q >> 8));
        out.put(static_cast<char>(q & 0xff));
    }
    if (!out) fail("write failed for '" + path + "'");
}

void save_png(const ImageGrid& img, const std::string& path, int bit_depth) {
    png_file f;
    f.writing = true;
    f.fp = std::fopen(path.c_str(), "wb");
    if (!f.fp) fail("cannot write '" + path + "'");
    f.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    f.info = png_create_info_struct(f.png);
    if (!f.png || !f.info) fail("libpng init failed");
    if (setjmp(png_jmpbuf(f.png))) fail("libpng write error for '" + path + "'");
    png_init_io(f.png, f.fp);
    png_set_IHDR(f.png, f.info, static_cast<png_uint_32>(img.n),
                 static_cast<png_uint_32>(img.n), bit_depth,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(f.png, f.info);

    const unsigned maxval = bit_depth == 16 ? 65535u : 255u;
    const int bytes = bit_depth == 16 ? 2 : 1;
    std::vector<unsigned char> row(static_cast<std::size_t>(img.n) * bytes);
    for (int r = 0; r < img.n; ++r) {
        for (int c = 0; c < img.n; ++c) {
            const unsigned q = quantize(img.at(r, c), maxval);
            if (bytes == 2) {
                row[2 * c] = static_cast<unsigned char>(q >> 8);
                row[2 * c + 1] = static_cast<unsigned char>(q & 0xff);
            } else {
                row[c] = static_cast<unsigned char>(q);
            }
        }
        png_write_row(f.png, row.data());
    }
    png_write_end(f.png, nullptr);
}

} // namespace

ImageGrid load_image(const std::string& path) {
    if (has_suffix(path, ".pgm")) return load_pgm(path);
    if (has_suffix(path, ".png")) return load_png(path);
    // No helpful extension: sniff the magic bytes.
    std::ifstream probe(path, std::ios::binary);
    if (!probe) fail("cannot open '" + path + "'");
    char m[2] = {0, 0};
    probe.read(m, 2);
    if (m[0] == 'P' && (m[1] == '2' || m[1] == '5')) return load_pgm(path);
    if (static_cast<unsigned char>(m[0]) == 0x89 && m[1] == 'P') return load_png(path);
    fail("unsupported format: '" + path + "'");
}

void save_image(const ImageGrid& img, const std::string& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw std::invalid_argument("bit_depth must be 8 or 16");
    for (double v : img.pix)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite pixel value");
    if (has_suffix(path, ".png")) save_png(img, path, bit_depth);
    else save_pgm(img, path, bit_depth);
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int j = -radius; j <= radius; ++j) {
        const double w = std::exp(-0.5 * (j / sigma) * (j / sigma));
        k[j + radius] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

ImageGrid gaussian_smooth(const ImageGrid& img, const SmoothingSpec& spec) {
    if (!spec.enabled)
        throw std::invalid_argument("gaussian_smooth invoked with smoothing disabled");
    if (!(spec.sigma > 0.0))
        throw std::invalid_argument("smoothing sigma must be positive");
    int radius = spec.kernel_radius;
    const int min_radius = static_cast<int>(std::ceil(3.0 * spec.sigma));
    if (radius <= 0) radius = min_radius;
    if (radius < min_radius)
        throw std::invalid_argument("kernel_radius below ceil(3*sigma)");

    const std::vector<double> k = gaussian_kernel(spec.sigma, radius);
    const int n = img.n;
    // Symmetric (edge-repeating) reflection: -1 -> 0, n -> n-1, etc.
    auto mirror = [n](int i) {
        while (i < 0 || i >= n) {
            if (i < 0) i = -i - 1;
            if (i >= n) i = 2 * n - 1 - i;
        }
        return i;
    };

    ImageGrid tmp(n), out(n);
    for (int r = 0; r < n; ++r)         // horizontal pass
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int j = -radius; j <= radius; ++j)
                acc += k[j + radius] * img.at(r, mirror(c + j));
            tmp.at(r, c) = acc;
        }
    for (int c = 0; c < n; ++c)         // vertical pass
        for (int r = 0; r < n; ++r) {
            double acc = 0.0;
            for (int j = -radius; j <= radius; ++j)
                acc += k[j + radius] * tmp.at(mirror(r + j), c);
            out.at(r, c) = std::clamp(acc, 0.0, 1.0);
        }
    return out;
}

} // namespace qloc
