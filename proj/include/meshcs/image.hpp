#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

#include "meshcs/error.hpp"

namespace meshcs {

/// Row-major grid of real intensities in [0, 2^p - 1].
///
/// Pixel (row i, column j) lives at continuous coordinate (x = j, y = i); the
/// mesh and interpolation code rely on that convention.
class GrayImage {
public:
    GrayImage() = default;

    GrayImage(std::size_t width, std::size_t height, int precision_bits = 8)
        : width_(width), height_(height), bits_(precision_bits), data_(width * height, 0.0) {
        check_shape();
    }

    GrayImage(std::size_t width, std::size_t height, std::vector<double> data,
              int precision_bits = 8)
        : width_(width), height_(height), bits_(precision_bits), data_(std::move(data)) {
        check_shape();
        if (data_.size() != width_ * height_)
            throw ValidationError("image data length " + std::to_string(data_.size()) +
                                  " does not match " + std::to_string(width_) + "x" +
                                  std::to_string(height_));
        for (double v : data_)
            if (!(v >= 0.0 && v <= peak()))
                throw ValidationError("intensity " + std::to_string(v) + " outside [0, " +
                                      std::to_string(peak()) + "]");
    }

    /// Builds an image from unconstrained solver output, clamping every value
    /// into the representable range.
    static GrayImage clamped(std::size_t width, std::size_t height, std::vector<double> data,
                             int precision_bits = 8) {
        const double hi = std::ldexp(1.0, precision_bits) - 1.0;
        for (double& v : data) v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, hi);
        return GrayImage(width, height, std::move(data), precision_bits);
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    int precision_bits() const noexcept { return bits_; }
    double peak() const noexcept { return std::ldexp(1.0, bits_) - 1.0; }

    double at(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
    void set(std::size_t row, std::size_t col, double v) {
        if (!(v >= 0.0 && v <= peak())) throw ValidationError("intensity outside range");
        data_[row * width_ + col] = v;
    }

    std::span<const double> pixels() const noexcept { return data_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    void check_shape() const {
        if (width_ == 0 || height_ == 0) throw ValidationError("zero-dimension image");
        if (bits_ < 1 || bits_ > 16) throw ValidationError("unsupported precision");
    }

    std::size_t width_ = 0;
    std::size_t height_ = 0;
    int bits_ = 8;
    std::vector<double> data_;
};

/// Row-major flattening.
inline std::vector<double> as_vector(const GrayImage& img) {
    return {img.pixels().begin(), img.pixels().end()};
}

inline GrayImage from_vector(std::span<const double> v, std::size_t width, std::size_t height,
                             int precision_bits = 8) {
    return GrayImage(width, height, std::vector<double>(v.begin(), v.end()), precision_bits);
}

/// ITU-R BT.601 luma, rounded half away from zero.
inline std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::clamp(std::round(y), 0.0, 255.0));
}

namespace detail {

inline std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Reads one header token of a PNM file, skipping whitespace and comments.
inline std::string pnm_token(const std::vector<unsigned char>& buf, std::size_t& pos) {
    for (;;) {
        while (pos < buf.size() && std::isspace(buf[pos])) ++pos;
        if (pos < buf.size() && buf[pos] == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    std::string tok;
    while (pos < buf.size() && !std::isspace(buf[pos])) tok.push_back(static_cast<char>(buf[pos++]));
    return tok;
}

inline std::size_t parse_dim(const std::string& tok, const std::string& path) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw IoError("malformed PGM header in " + path);
    return std::stoul(tok);
}

inline GrayImage decode_pgm(const std::vector<unsigned char>& buf, const std::string& path) {
    std::size_t pos = 2;
    const std::size_t w = parse_dim(pnm_token(buf, pos), path);
    const std::size_t h = parse_dim(pnm_token(buf, pos), path);
    const std::size_t maxval = parse_dim(pnm_token(buf, pos), path);
    if (w == 0 || h == 0) throw ValidationError("zero-dimension image in " + path);
    if (maxval != 255) throw IoError("only 8-bit PGM (maxval 255) is supported: " + path);
    if (pos >= buf.size() || !std::isspace(buf[pos])) throw IoError("truncated PGM " + path);
    ++pos;
    if (buf.size() - pos < w * h) throw IoError("truncated PGM raster in " + path);
    std::vector<double> data(w * h);
    for (std::size_t i = 0; i < w * h; ++i) data[i] = buf[pos + i];
    return GrayImage(w, h, std::move(data), 8);
}

inline GrayImage decode_png(const std::vector<unsigned char>& buf, const std::string& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, buf.data(), buf.size()))
        throw IoError("cannot decode PNG " + path + ": " + image.message);
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw IoError("16-bit PNG is not supported: " + path);
    }
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const std::size_t w = image.width, h = image.height;
    if (w == 0 || h == 0) {
        png_image_free(&image);
        throw ValidationError("zero-dimension image in " + path);
    }
    std::vector<unsigned char> raw(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr))
        throw IoError("cannot decode PNG " + path + ": " + image.message);
    std::vector<double> data(w * h);
    for (std::size_t i = 0; i < w * h; ++i)
        data[i] = color ? luma(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]) : raw[i];
    return GrayImage(w, h, std::move(data), 8);
}

}  // namespace detail

/// Loads binary PGM (P5, maxval 255) or 8-bit PNG. RGB input is reduced to luma.
inline GrayImage load_image(const std::string& path) {
    const auto buf = detail::read_file(path);
    if (buf.size() >= 2 && buf[0] == 'P' && buf[1] == '5') return detail::decode_pgm(buf, path);
    static constexpr unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (buf.size() >= 8 && std::equal(png_sig, png_sig + 8, buf.begin()))
        return detail::decode_png(buf, path);
    throw IoError("unsupported image format: " + path);
}

/// Quantizes to 8 bits (round half away from zero) and writes binary PGM.
inline std::vector<unsigned char> encode_pgm(const GrayImage& img) {
    const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                               std::to_string(img.height()) + "\n255\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    out.reserve(header.size() + img.size());
    const double scale = 255.0 / img.peak();
    for (double v : img.pixels())
        out.push_back(static_cast<unsigned char>(std::clamp(std::round(v * scale), 0.0, 255.0)));
    return out;
}

inline void save_image(const GrayImage& img, const std::string& path) {
    const auto bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace meshcs
