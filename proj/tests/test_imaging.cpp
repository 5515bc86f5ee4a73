#include <doctest.h>

#include <filesystem>
#include <random>

#include "faup/error.hpp"
#include "faup/imaging.hpp"

using namespace faup;
using P = FeaturePointId;

namespace {

std::vector<std::uint8_t> bytes(std::string_view s) { return {s.begin(), s.end()}; }

Image random_image(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
    for (auto& p : px) p = static_cast<std::uint8_t>(rng() & 0xff);
    return Image(w, h, px);
}

PixelLandmarks grid_landmarks(double x0, double y0) {
    PixelLandmarks lm;
    for (auto id : all_points()) lm[id] = {x0 + 3.0 * static_cast<double>(index_of(id)), y0};
    return lm;
}

}  // namespace

TEST_CASE("minimal binary and ascii pgm") {
    auto b = bytes("P5 2 2 255\n");
    for (std::uint8_t v : {10, 20, 30, 40}) b.push_back(v);
    const auto img = load_pgm(b);
    CHECK(img.width() == 2);
    CHECK(img.height() == 2);
    CHECK(img.at(1, 0) == 20);
    CHECK(img.at(0, 1) == 30);

    auto c = bytes("P5\n# made by hand\n2 # width\n2\n255\n");
    for (std::uint8_t v : {10, 20, 30, 40}) c.push_back(v);
    CHECK(load_pgm(c) == img);

    CHECK(load_pgm(bytes("P2 2 2 255\n10 20\n30 40\n")) == img);
    // Values are kept as stored, not rescaled to 255.
    CHECK(load_pgm(bytes("P2 1 1 15\n7\n")).at(0, 0) == 7);
}

TEST_CASE("pgm errors carry an offset") {
    auto t = bytes("P5 2 2 255\n");
    t.push_back(1);
    t.push_back(2);
    t.push_back(3);
    CHECK_THROWS_AS(load_pgm(t), ParseError);
    CHECK_THROWS_AS(load_pgm(bytes("P6 1 1 255\n\x01")), ParseError);
    try {
        load_pgm(bytes("P5 2 2 300\n"));
        FAIL("maxval accepted");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 7);
    }
    CHECK_THROWS_AS(load_pgm(bytes("P2 1 1 10\n11\n")), ParseError);
    CHECK_THROWS_AS(load_pgm(bytes("P2 2 x 255\n")), ParseError);
}

TEST_CASE("pgm encode/load round trip is exact") {
    const auto img = random_image(37, 23, 4);
    CHECK(load_pgm(encode_pgm(img)) == img);
    const auto path = std::filesystem::temp_directory_path() / "faup_test_roundtrip.pgm";
    write_pgm(path, img);
    CHECK(read_pgm(path) == img);
    std::filesystem::remove(path);
}

TEST_CASE("resize") {
    const auto img = random_image(31, 17, 9);
    CHECK(resize(img, 31, 17) == img);
    const Image flat(5, 7, 123);
    const auto big = resize(flat, 13, 2);
    for (auto p : big.pixels()) CHECK(p == 123);
    const auto up = resize(Image(2, 1, std::vector<std::uint8_t>{0, 255}), 4, 1);
    // Pixel centres land at 0, 0.25, 0.75, 1 in source coordinates.
    CHECK(up.pixels() == std::vector<std::uint8_t>{0, 64, 191, 255});
    const auto def = resize(img);
    CHECK(def.width() == 490);
    CHECK(def.height() == 400);
}

TEST_CASE("image_to_vector layout") {
    Image img(kWorkingWidth, kWorkingHeight, 0);
    auto v = image_to_vector(img);
    CHECK(v.size() == 196000);
    CHECK(std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
    img.at(1, 0) = 255;
    v = image_to_vector(img);
    CHECK(v[1] == 1.0);
    CHECK(vector_to_image(v, kWorkingWidth, kWorkingHeight) == img);
    CHECK_THROWS_AS(image_to_vector(Image(10, 10)), InvalidInputError);
    CHECK(image_to_vector(Image(10, 10), 10, 10).size() == 100);
}

TEST_CASE("canny on constant and step images") {
    CHECK(canny(Image(40, 30, 77)).count() == 0);

    const int w = 40, h = 30, step = 20;
    Image img(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = step; x < w; ++x) img.at(x, y) = 255;
    const auto e = canny(img);
    int column = -1;
    for (int y = 8; y < h - 8; ++y) {
        int hits = 0;
        for (int x = 0; x < w; ++x) {
            if (!e.at(x, y)) continue;
            ++hits;
            if (column < 0) column = x;
            CHECK(x == column);
        }
        CHECK(hits == 1);
    }
    CHECK((column == step - 1 || column == step));

    // Edge maps re-fed as images give edges only where the mask changes.
    const auto again = canny(e.to_image());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (again.at(x, y)) CHECK(std::abs(x - column) <= 2);

    CHECK_THROWS_AS(canny(img, {0.5, 0.2, 1.0}), InvalidInputError);
    CHECK_THROWS_AS(canny(img, {0.1, 0.3, 0.0}), InvalidInputError);
}

TEST_CASE("patch extraction") {
    EdgeMap e(60, 40);
    e.set(10, 10, true);
    auto lm = grid_landmarks(5, 10);
    lm[P::bl1] = {10, 10};
    const auto all = extract_patches(e, lm, PointSet::all(), 3);
    CHECK(all.size() == 24 * 49);
    const auto some = extract_patches(e, lm, PointSet{P::mm3, P::mm4}, 3);
    CHECK(some.size() == 2 * 49);
    CHECK(some.size() * 24 == all.size() * 2);

    const auto one = extract_patches(e, lm, PointSet{P::bl1}, 2);
    REQUIRE(one.size() == 25);
    CHECK(one[12] == 1.0);
    CHECK(std::count(one.begin(), one.end(), 1.0) == 1);

    lm[P::bl1] = {0, 0};
    e.set(0, 0, true);
    const auto corner = extract_patches(e, lm, PointSet{P::bl1}, 2);
    CHECK(corner.size() == 25);
    CHECK(corner[12] == 1.0);
    CHECK(corner[0] == 0.0);

    CHECK_THROWS_AS(extract_patches(e, lm, PointSet{}, 3), InvalidInputError);
    CHECK_THROWS_AS(extract_patches(e, lm, PointSet{P::bl1}, 0), InvalidInputError);

    Image img(60, 40, 255);
    lm[P::mm3] = {30, 20};
    const auto lum = extract_luminance_patches(img, lm, PointSet{P::mm3}, 1);
    CHECK(lum == std::vector<double>(9, 1.0));
}
