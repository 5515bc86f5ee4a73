#pragma once

// Grayscale image front end: PGM I/O, bilinear resize, vectorization, Canny
// edges and fixed-size pixel patches around landmarks.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "faup/facegeo.hpp"

namespace faup {

inline constexpr int kWorkingWidth = 490;
inline constexpr int kWorkingHeight = 400;

class Image {
public:
    Image() = default;
    Image(int width, int height, std::uint8_t fill = 0);
    Image(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return width_; }
    int height() const { return height_; }
    std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    std::uint8_t& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    const std::vector<std::uint8_t>& pixels() const { return pixels_; }

    bool operator==(const Image&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

class EdgeMap {
public:
    EdgeMap() = default;
    EdgeMap(int width, int height) : width_(width), height_(height), mask_(static_cast<std::size_t>(width) * height, 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool at(int x, int y) const { return mask_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v) { mask_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
    std::size_t count() const;
    // 0 / 255 grayscale rendering, for inspection or re-processing.
    Image to_image() const;

    bool operator==(const EdgeMap&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> mask_;
};

Image load_pgm(std::span<const std::uint8_t> bytes);
Image read_pgm(const std::filesystem::path& path);
// Binary P5 with maxval 255.
std::vector<std::uint8_t> encode_pgm(const Image& img);
void write_pgm(const std::filesystem::path& path, const Image& img);

Image resize(const Image& img, int w = kWorkingWidth, int h = kWorkingHeight);

// Row-major, scaled to [0, 1].
std::vector<double> image_to_vector(const Image& img, int expect_w = kWorkingWidth, int expect_h = kWorkingHeight);
// Inverse of image_to_vector with clamping and rounding to 8 bits.
Image vector_to_image(std::span<const double> v, int w, int h);

struct CannyParams {
    double low = 0.1;   // fraction of the maximum gradient magnitude
    double high = 0.3;  // fraction of the maximum gradient magnitude
    double sigma = 1.4;

    bool operator==(const CannyParams&) const = default;
};

EdgeMap canny(const Image& img, const CannyParams& p = {});

// Pixel coordinates of each landmark (x right, y down).
using PixelLandmarks = FaceModel;

// Concatenated (2r+1)^2 windows centred on the rounded pixel position of each
// monitored point, canonical point order, zero outside the image.
std::vector<double> extract_patches(const EdgeMap& edges, const PixelLandmarks& landmarks, PointSet monitored, int radius);
// Same layout over luminance in [0, 1].
std::vector<double> extract_luminance_patches(const Image& img, const PixelLandmarks& landmarks, PointSet monitored,
                                              int radius);

}  // namespace faup
