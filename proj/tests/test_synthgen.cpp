#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "faup/error.hpp"
#include "faup/synthgen.hpp"

using namespace faup;
using E = Emotion;
using P = FeaturePointId;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("faup_synth_" + name);
    fs::remove_all(p);
    return p;
}

double max_abs_diff(const FaceModel& a, const FaceModel& b) {
    double m = 0.0;
    for (auto id : all_points()) m = std::max({m, std::abs(a[id].x - b[id].x), std::abs(a[id].y - b[id].y)});
    return m;
}

}  // namespace

TEST_CASE("splitmix64 reference outputs") {
    SplitMix64 r(0);
    CHECK(r.next() == 0xe220a8397b1dcdafULL);
    CHECK(r.next() == 0x6e789e6aa1b965f4ULL);
    SplitMix64 u(99);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK((x >= 0.0 && x < 1.0));
    }
}

TEST_CASE("gaussian draws have roughly unit moments") {
    SplitMix64 r(7);
    double s = 0.0, s2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double g = r.gaussian();
        s += g;
        s2 += g * g;
    }
    CHECK(std::abs(s / n) < 0.05);
    CHECK(std::abs(s2 / n - 1.0) < 0.05);
}

TEST_CASE("neutral template") {
    const auto t = neutral_template();
    CHECK(t[P::el1] == Point2{-0.5, 0});
    CHECK(t[P::er1] == Point2{0.5, 0});
    CHECK(max_abs_diff(normalize_face(t), t) <= 1e-15);
    const std::pair<P, P> mirrored[] = {{P::bl1, P::br1}, {P::bl2, P::br2}, {P::bl3, P::br3},
                                        {P::el2, P::er2}, {P::ml1, P::mr1}, {P::ml3, P::mr3}};
    for (const auto& [l, r] : mirrored) {
        CHECK(t[l].x == -t[r].x);
        CHECK(t[l].y == t[r].y);
    }
    for (auto a : all_points())
        for (auto b : all_points())
            if (a != b) CHECK(t[a] != t[b]);
}

TEST_CASE("apply_aus moves bound points only") {
    const auto t = neutral_template();
    CHECK(apply_aus(t, {}, 0.05) == t);
    const auto s = apply_aus(t, {16}, 0.05);
    for (auto id : all_points()) {
        if (id == P::mm3 || id == P::mm4) {
            CHECK(s[id].x == t[id].x);
            CHECK(std::abs(s[id].y - (t[id].y - 0.05)) <= 1e-15);
        } else {
            CHECK(s[id] == t[id]);
        }
    }
    const auto one = apply_aus(t, {6}, 0.05);
    const auto two = apply_aus(t, {6, 12}, 0.05);
    CHECK(std::abs((one[P::mr1].x - t[P::mr1].x) - 0.05) <= 1e-15);
    CHECK(std::abs((one[P::ml1].x - t[P::ml1].x) + 0.05) <= 1e-15);
    CHECK(std::abs((two[P::mr1].x - t[P::mr1].x) - 0.10) <= 1e-15);
    const auto tight = apply_aus(t, {23}, 0.05);
    CHECK(tight[P::mr1].x < t[P::mr1].x);
    CHECK(tight[P::ml1].x > t[P::ml1].x);
    CHECK(apply_aus(t, {10, 15}, 0.05) == t);
}

TEST_CASE("dataset generation") {
    SynthConfig c;
    c.per_class = 10;
    const auto a = generate_dataset(c);
    const auto b = generate_dataset(c);
    REQUIRE(a.size() == 60);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].expressive == b[i].expressive);
    const auto t = neutral_template();
    for (const auto& s : a) {
        CHECK(s.neutral == t);
        for (auto id : all_points())
            if (point_role(id) != PointRole::active) CHECK(s.expressive[id] == t[id]);
    }

    c.noise_sigma = 0.0;
    const auto clean = generate_dataset(c);
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const auto& s = clean[i];
        CHECK(s.emotion == kEmotions[i / 10]);
        CHECK(s.expressive == clean[i / 10 * 10].expressive);
        // Every displacement is the additive AU kinematics at the configured intensity.
        const auto kin = au_kinematics(emotion_aus(s.emotion));
        const auto d = displacement(s.expressive, s.neutral);
        for (auto id : all_points()) {
            CHECK(std::abs(d[id].x - c.intensity * kin[id].x) <= 1e-12);
            CHECK(std::abs(d[id].y - c.intensity * kin[id].y) <= 1e-12);
        }
    }

    c.seed = 43;
    c.noise_sigma = 0.01;
    CHECK(generate_dataset(c)[0].expressive != a[0].expressive);

    SynthConfig bad;
    bad.per_class = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidInputError);
    bad = {};
    bad.intensity = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInputError);
    bad = {};
    bad.noise_sigma = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInputError);
}

TEST_CASE("sequences") {
    SynthConfig c;
    c.noise_sigma = 0.0;
    const auto seq = generate_sequence({E::surprise, E::happiness}, 5, c);
    REQUIRE(seq.frames.size() == 10);
    CHECK(seq.boundaries() == std::vector<std::size_t>{5});
    for (std::size_t i = 0; i < 10; ++i) CHECK(seq.frames[i].state == (i < 5 ? E::surprise : E::happiness));

    const auto one = generate_sequence({E::surprise}, 4, c);
    CHECK(one.frames.size() == 4);
    for (const auto& f : one.frames) CHECK(max_abs_diff(f.face, one.frames[0].face) == 0.0);

    const auto sf = generate_sequence({E::surprise, E::fear}, 5, c);
    for (std::size_t i = 1; i < sf.frames.size(); ++i) {
        CHECK(sf.frames[i].face[P::br1].y <= sf.frames[i - 1].face[P::br1].y);
        CHECK(sf.frames[i].face[P::bl1].y <= sf.frames[i - 1].face[P::bl1].y);
    }
    CHECK(sf.frames.back().face[P::br1].y < sf.frames.front().face[P::br1].y);

    CHECK_THROWS_AS(generate_sequence({}, 5, c), InvalidInputError);
    CHECK_THROWS_AS(generate_sequence({E::surprise}, 1, c), InvalidInputError);
}

TEST_CASE("rendering") {
    const auto face = apply_aus(neutral_template(), emotion_aus(E::happiness), 0.05);
    const auto r = render_face(face, 200, 160);
    CHECK(r.image.width() == 200);
    CHECK(r.image.height() == 160);
    CHECK(render_face(face, 200, 160).image == r.image);
    CHECK(canny(r.image).count() >= 1);
    const auto m = PixelMapping::for_canvas(200, 160);
    const auto back = m.from_pixels(r.pixel_landmarks);
    CHECK(max_abs_diff(back, face) * m.scale <= 1.0);
}

TEST_CASE("dataset and sequence files round trip") {
    SynthConfig c;
    c.per_class = 2;
    c.render = true;
    c.render_width = 120;
    c.render_height = 100;
    const auto data = generate_dataset(c);
    const auto root = scratch("data");
    write_dataset(root, data, c.seed);
    CHECK(fs::exists(root / "manifest.tsv"));
    CHECK(fs::exists(root / "fear" / "0000.landmarks"));
    CHECK(fs::exists(root / "fear" / "0000.pgm"));
    CHECK(fs::exists(root / "fear" / "0000.pixlandmarks"));
    std::ifstream manifest(root / "manifest.tsv");
    std::string header;
    std::getline(manifest, header);
    CHECK(header == "sample\temotion\tseed");

    const auto back = read_dataset(root);
    REQUIRE(back.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(back[i].emotion == data[i].emotion);
        CHECK(back[i].expressive == data[i].expressive);
        REQUIRE(back[i].rendered.has_value());
        CHECK(back[i].rendered->image == data[i].rendered->image);
        CHECK(back[i].rendered->pixel_landmarks == data[i].rendered->pixel_landmarks);
    }
    const auto single = read_sample(root / "anger" / "0001.landmarks");
    CHECK(single.emotion == E::anger);
    CHECK(single.expressive == data[7].expressive);
    fs::remove_all(root);
    CHECK_THROWS(read_dataset(root));

    const auto seq = generate_sequence({E::surprise, E::sadness}, 3, c);
    const auto dir = scratch("seq");
    write_sequence(dir, seq);
    const auto sb = read_sequence(dir);
    REQUIRE(sb.frames.size() == seq.frames.size());
    CHECK(sb.neutral == seq.neutral);
    CHECK(sb.boundaries() == seq.boundaries());
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        CHECK(sb.frames[i].face == seq.frames[i].face);
        CHECK(sb.frames[i].state == seq.frames[i].state);
    }
    fs::remove_all(dir);
}
