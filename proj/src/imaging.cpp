#include "faup/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include "faup/error.hpp"

namespace faup {

namespace {

void check_dims(int w, int h) {
    if (w < 1 || h < 1) throw InvalidInputError("image dimensions must be positive");
}

class PgmReader {
public:
    explicit PgmReader(std::span<const std::uint8_t> b) : bytes_(b) {}

    std::size_t pos() const { return pos_; }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const auto c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long number(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        token_at_ = start;
        long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_] - '0');
            if (v > 1'000'000'000L) throw ParseError(std::string("pgm: ") + what + " too large", start);
            ++pos_;
        }
        if (pos_ == start) {
            if (pos_ >= bytes_.size()) throw ParseError(std::string("pgm: truncated before ") + what, pos_);
            throw ParseError(std::string("pgm: expected ") + what, pos_);
        }
        return v;
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::size_t token_at_ = 0;
};

}  // namespace

Image::Image(int width, int height, std::uint8_t fill)
    : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * height, fill) {
    check_dims(width, height);
}

Image::Image(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dims(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidInputError("image pixel count does not match its dimensions");
    }
}

std::size_t EdgeMap::count() const { return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1)); }

Image EdgeMap::to_image() const {
    std::vector<std::uint8_t> px(mask_.size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = mask_[i] ? 255 : 0;
    return Image(width_, height_, std::move(px));
}

Image load_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
        throw ParseError("pgm: missing P5/P2 magic", 0);
    }
    const bool binary = bytes[1] == '5';
    PgmReader r(bytes);
    r.pos_ = 2;
    const long w = r.number("width");
    const std::size_t w_at = r.token_at_;
    const long h = r.number("height");
    const std::size_t h_at = r.token_at_;
    const long maxval = r.number("maxval");
    const std::size_t max_at = r.token_at_;
    if (w < 1) throw ParseError("pgm: zero width", w_at);
    if (h < 1) throw ParseError("pgm: zero height", h_at);
    if (maxval < 1 || maxval > 255) throw ParseError("pgm: maxval must be in 1..255", max_at);

    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    std::vector<std::uint8_t> px(n);
    if (binary) {
        if (r.pos_ >= bytes.size() || !std::isspace(bytes[r.pos_])) {
            throw ParseError("pgm: expected single whitespace after maxval", r.pos_);
        }
        ++r.pos_;
        if (bytes.size() - r.pos_ < n) throw ParseError("pgm: truncated pixel data", bytes.size());
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = bytes[r.pos_ + i];
            if (v > maxval) throw ParseError("pgm: pixel exceeds maxval", r.pos_ + i);
            px[i] = v;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t at = r.pos();
            const long v = r.number("pixel");
            if (v > maxval) throw ParseError("pgm: pixel exceeds maxval", at);
            px[i] = static_cast<std::uint8_t>(v);
        }
    }
    return Image(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

Image read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_pgm(bytes);
}

std::vector<std::uint8_t> encode_pgm(const Image& img) {
    const std::string header =
        "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

void write_pgm(const std::filesystem::path& path, const Image& img) {
    const auto bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Image resize(const Image& img, int w, int h) {
    check_dims(w, h);
    if (w == img.width() && h == img.height()) return img;
    Image out(w, h);
    const double sx = static_cast<double>(img.width()) / w;
    const double sy = static_cast<double>(img.height()) / h;
    for (int y = 0; y < h; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double ty = fy - y0;
        for (int x = 0; x < w; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double tx = fx - x0;
            const double top = img.at(x0, y0) * (1 - tx) + img.at(x1, y0) * tx;
            const double bot = img.at(x0, y1) * (1 - tx) + img.at(x1, y1) * tx;
            out.at(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(top * (1 - ty) + bot * ty, 0.0, 255.0)));
        }
    }
    return out;
}

std::vector<double> image_to_vector(const Image& img, int expect_w, int expect_h) {
    if (img.width() != expect_w || img.height() != expect_h) {
        throw InvalidInputError("image is " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                ", working size is " + std::to_string(expect_w) + "x" + std::to_string(expect_h));
    }
    std::vector<double> v(img.pixels().size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = img.pixels()[i] / 255.0;
    return v;
}

Image vector_to_image(std::span<const double> v, int w, int h) {
    check_dims(w, h);
    if (v.size() != static_cast<std::size_t>(w) * h) throw InvalidInputError("vector length does not match image size");
    std::vector<std::uint8_t> px(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        px[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v[i], 0.0, 1.0) * 255.0));
    }
    return Image(w, h, std::move(px));
}

EdgeMap canny(const Image& img, const CannyParams& p) {
    if (!(p.low >= 0.0) || !(p.high >= p.low)) throw InvalidInputError("canny: need 0 <= low <= high");
    if (!(p.sigma > 0.0)) throw InvalidInputError("canny: sigma must be positive");
    const int w = img.width();
    const int h = img.height();
    const auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

    // Separable Gaussian, clamp-to-edge.
    const int half = static_cast<int>(std::ceil(3.0 * p.sigma));
    std::vector<double> kernel(2 * half + 1);
    double ksum = 0.0;
    for (int i = -half; i <= half; ++i) ksum += kernel[i + half] = std::exp(-(i * i) / (2.0 * p.sigma * p.sigma));
    for (auto& k : kernel) k /= ksum;

    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    std::vector<double> blur(tmp.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -half; i <= half; ++i) s += kernel[i + half] * img.at(std::clamp(x + i, 0, w - 1), y);
            tmp[idx(x, y)] = s;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -half; i <= half; ++i) s += kernel[i + half] * tmp[idx(x, std::clamp(y + i, 0, h - 1))];
            blur[idx(x, y)] = s;
        }

    std::vector<double> mag(blur.size(), 0.0);
    std::vector<std::uint8_t> dir(blur.size(), 0);
    double max_mag = 0.0;
    for (int y = 1; y + 1 < h; ++y)
        for (int x = 1; x + 1 < w; ++x) {
            const auto b = [&](int dx, int dy) { return blur[idx(x + dx, y + dy)]; };
            const double gx = (b(1, -1) + 2 * b(1, 0) + b(1, 1)) - (b(-1, -1) + 2 * b(-1, 0) + b(-1, 1));
            const double gy = (b(-1, 1) + 2 * b(0, 1) + b(1, 1)) - (b(-1, -1) + 2 * b(0, -1) + b(1, -1));
            const double m = std::hypot(gx, gy);
            mag[idx(x, y)] = m;
            max_mag = std::max(max_mag, m);
            double deg = std::atan2(gy, gx) * 180.0 / 3.14159265358979323846;
            if (deg < 0) deg += 180.0;
            dir[idx(x, y)] = deg < 22.5 || deg >= 157.5 ? 0 : deg < 67.5 ? 1 : deg < 112.5 ? 2 : 3;
        }

    EdgeMap edges(w, h);
    // Tiny gradients from floating-point noise are not edges.
    if (max_mag <= 1e-9) return edges;
    const double lo = p.low * max_mag;
    const double hi = p.high * max_mag;

    // Non-maximum suppression. Ties along the gradient keep the forward pixel
    // only, so a symmetric ridge yields a one-pixel line.
    static constexpr int kFwd[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
    std::vector<std::uint8_t> cls(blur.size(), 0);  // 0 none, 1 weak, 2 strong
    for (int y = 1; y + 1 < h; ++y)
        for (int x = 1; x + 1 < w; ++x) {
            const double m = mag[idx(x, y)];
            if (m <= 1e-9 || m < lo) continue;
            const auto& f = kFwd[dir[idx(x, y)]];
            const double ahead = mag[idx(x + f[0], y + f[1])];
            const double behind = mag[idx(x - f[0], y - f[1])];
            if (m >= behind && m > ahead) cls[idx(x, y)] = m >= hi ? 2 : 1;
        }

    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (cls[idx(x, y)] == 2) {
                edges.set(x, y, true);
                stack.emplace_back(x, y);
            }
    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx;
                const int ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                if (cls[idx(nx, ny)] == 1 && !edges.at(nx, ny)) {
                    edges.set(nx, ny, true);
                    stack.emplace_back(nx, ny);
                }
            }
    }
    return edges;
}

namespace {

template <typename Sample>
std::vector<double> patches(int w, int h, const PixelLandmarks& lm, PointSet monitored, int radius, Sample&& sample) {
    if (monitored.empty()) throw InvalidInputError("extract_patches: empty monitored set");
    if (radius < 1) throw InvalidInputError("extract_patches: radius must be >= 1");
    const int side = 2 * radius + 1;
    std::vector<double> out;
    out.reserve(monitored.size() * side * side);
    for (auto id : monitored.to_vector()) {
        const long cx = std::lround(lm[id].x);
        const long cy = std::lround(lm[id].y);
        for (long y = cy - radius; y <= cy + radius; ++y)
            for (long x = cx - radius; x <= cx + radius; ++x) {
                const bool inside = x >= 0 && y >= 0 && x < w && y < h;
                out.push_back(inside ? sample(static_cast<int>(x), static_cast<int>(y)) : 0.0);
            }
    }
    return out;
}

}  // namespace

std::vector<double> extract_patches(const EdgeMap& edges, const PixelLandmarks& landmarks, PointSet monitored, int radius) {
    return patches(edges.width(), edges.height(), landmarks, monitored, radius,
                   [&](int x, int y) { return edges.at(x, y) ? 1.0 : 0.0; });
}

std::vector<double> extract_luminance_patches(const Image& img, const PixelLandmarks& landmarks, PointSet monitored,
                                              int radius) {
    return patches(img.width(), img.height(), landmarks, monitored, radius,
                   [&](int x, int y) { return img.at(x, y) / 255.0; });
}

}  // namespace faup
