#include <doctest.h>

#include <filesystem>
#include <map>
#include <set>

#include "faup/error.hpp"
#include "faup/pipeline.hpp"

using namespace faup;
using E = Emotion;
using P = FeaturePointId;
namespace fs = std::filesystem;

namespace {

std::vector<LabeledSample> dataset(int per_class, double sigma, std::uint64_t seed = 42) {
    SynthConfig c;
    c.per_class = per_class;
    c.noise_sigma = sigma;
    c.seed = seed;
    return generate_dataset(c);
}

const TrainResult& clean_model() {
    static const TrainResult r = train(dataset(10, 0.0), BundleConfig{});
    return r;
}

LabeledSample neutral_sample() {
    LabeledSample s;
    s.neutral = neutral_template();
    s.expressive = s.neutral;
    return s;
}

}  // namespace

TEST_CASE("split allocation") {
    const auto data = dataset(10, 0.0);
    const auto split = split_dataset(data, 1.0 / 3.0, 42);
    CHECK(split.train.size() == 20);
    CHECK(split.test.size() == 40);
    std::map<E, int> per;
    for (auto i : split.train) ++per[data[i].emotion];
    // 20 / 6 = 3 each plus two leftovers, first two classes in emotion order.
    CHECK(per[E::surprise] == 4);
    CHECK(per[E::fear] == 4);
    for (auto e : {E::disgust, E::anger, E::happiness, E::sadness}) CHECK(per[e] == 3);
    std::set<std::size_t> all(split.train.begin(), split.train.end());
    all.insert(split.test.begin(), split.test.end());
    CHECK(all.size() == 60);
    const auto again = split_dataset(data, 1.0 / 3.0, 42);
    CHECK(again.train == split.train);
    CHECK(split_dataset(data, 1.0 / 3.0, 7).train != split.train);

    auto missing = data;
    std::erase_if(missing, [](const auto& s) { return s.emotion == E::anger; });
    CHECK_THROWS_AS(train(missing, BundleConfig{}), InvalidInputError);
    CHECK_THROWS_AS(split_dataset(data, 1.0, 42), InvalidInputError);
}

TEST_CASE("landmark features") {
    const auto& b = clean_model().bundle;
    const auto n = neutral_sample();
    const auto all = extract_features(b, n, PointSet::all());
    CHECK(all.size() == 48);
    CHECK(std::all_of(all.begin(), all.end(), [](double v) { return v == 0.0; }));
    CHECK(extract_features(b, n, PointSet{P::mm3, P::mm4}).size() == 4);
    CHECK(std::abs(b.intensity - 0.05) <= 1e-12);

    auto s = n;
    s.expressive = apply_aus(s.neutral, {16}, 0.05);
    const auto f = extract_features(b, s, PointSet{P::mm3});
    CHECK(std::abs(f[0]) <= 1e-12);
    CHECK(std::abs(f[1] + 1.0) <= 1e-12);
}

TEST_CASE("noiseless training separates every class") {
    const auto& r = clean_model();
    for (const auto& d : r.detectors) {
        CHECK(d.correctness == 1.0);
        CHECK(d.sv_count >= 1);
        CHECK(d.margin > 0.0);
    }
    for (auto e : kEmotions) {
        const auto& m = r.bundle.detectors[index_of(e)];
        CHECK(m.label_map[0] == not_emotion_label(e));
        CHECK(m.label_map[1] == emotion_name(e));
        CHECK(std::abs(m.margin - 2.0 / norm(m.weights)) <= 1e-9);
    }
}

TEST_CASE("full and pruned classification on clean data") {
    const auto& b = clean_model().bundle;
    const std::map<E, int> plan = {{E::surprise, 2}, {E::fear, 4},      {E::disgust, 2},
                                   {E::anger, 8},    {E::happiness, 2}, {E::sadness, 2}};
    for (const auto& s : dataset(3, 0.0)) {
        const auto full = classify_full(b, s);
        CHECK(full.emotion == s.emotion);
        CHECK_FALSE(full.low_confidence);
        const auto pr = classify_pruned(b, s);
        CHECK(pr.emotion == s.emotion);
        CHECK_FALSE(pr.fallback);
        CHECK(pr.points_examined == plan.at(s.emotion));
        CHECK(pr.points_read <= 24);
    }
}

TEST_CASE("pruned path falls back on a neutral face") {
    const auto& b = clean_model().bundle;
    const auto n = neutral_sample();
    const auto full = classify_full(b, n);
    CHECK(full.low_confidence);
    const auto pr = classify_pruned(b, n);
    CHECK(pr.fallback);
    CHECK(pr.points_examined == 8 + 24);
    CHECK(pr.emotion == full.emotion);
}

TEST_CASE("pruned classification with a prior") {
    const auto& b = clean_model().bundle;
    for (const auto& s : dataset(1, 0.0)) {
        if (s.emotion == E::surprise) continue;
        const auto pr = classify_pruned(b, s, E::surprise);
        CHECK(pr.emotion == s.emotion);
        REQUIRE(pr.evidence.has_value());
        CHECK(pr.evidence->to == s.emotion);
        CHECK_FALSE(pr.evidence->derived);
    }
    const auto data = dataset(1, 0.0);
    const auto pr = classify_pruned(b, data[index_of(E::surprise)], E::happiness);
    CHECK(pr.emotion == E::surprise);
    if (pr.evidence) CHECK(pr.evidence->derived);
}

TEST_CASE("noisy data keeps both paths accurate") {
    const auto data = dataset(50, 0.01);
    const auto r = train(data, BundleConfig{});
    std::vector<LabeledSample> test;
    for (auto i : r.split.test) test.push_back(data[i]);
    const auto rep = bench_compare(r.bundle, test, 1);
    CHECK(rep.accuracy_full >= 0.9);
    CHECK(rep.accuracy_pruned >= 0.9);
    CHECK(rep.agreement >= 0.99);
    CHECK(rep.samples == test.size());
}

TEST_CASE("bench report algebra") {
    const auto& b = clean_model().bundle;
    const auto rep = bench_compare(b, dataset(2, 0.0), 1);
    REQUIRE(rep.rows.size() == 6);
    double sum = 0.0;
    for (const auto& row : rep.rows) {
        CHECK(row.full_points == 24);
        CHECK(row.reduction == 1.0 - static_cast<double>(row.pruned_points) / 24.0);
        sum += row.reduction;
    }
    CHECK(rep.rows[0].pruned_points == 2);
    CHECK(std::abs(rep.rows[0].reduction - 22.0 / 24.0) <= 1e-12);
    CHECK(std::abs(rep.mean_reduction - sum / 6.0) <= 1e-12);
    CHECK(std::abs(rep.mean_reduction - (1.0 - (20.0 / 6.0) / 24.0)) <= 1e-12);
    CHECK(rep.agreement == 1.0);
    CHECK(rep.fallback_rate == 0.0);
    CHECK(rep.to_tsv().find("reduction") != std::string::npos);
    CHECK(rep.summary().find("NSur") != std::string::npos);
    CHECK_THROWS_AS(bench_compare(b, {}, 1), InvalidInputError);
}

TEST_CASE("transitions out of surprise") {
    const auto& b = clean_model().bundle;
    SynthConfig c;
    c.noise_sigma = 0.0;
    for (auto to : {E::fear, E::disgust, E::anger, E::happiness, E::sadness}) {
        const auto seq = generate_sequence({E::surprise, to}, 5, c);
        const auto ev = detect_transitions(b, seq);
        REQUIRE(ev.size() == 1);
        CHECK(ev[0].from == E::surprise);
        CHECK(ev[0].to == to);
        CHECK_FALSE(ev[0].heuristic);
        CHECK(std::abs(static_cast<long>(ev[0].frame) - 5) <= 1);
        if (to == E::fear) CHECK(ev[0].evidence.present == std::vector{AUPattern::single(4)});
    }
    CHECK(detect_transitions(b, generate_sequence({E::surprise}, 6, c)).empty());

    Sequence tiny;
    tiny.neutral = neutral_template();
    tiny.frames.resize(1);
    CHECK_THROWS_AS(detect_transitions(b, tiny), InvalidInputError);
}

TEST_CASE("bundle persistence") {
    const auto& b = clean_model().bundle;
    const auto text = serialize_bundle(b);
    CHECK(text.rfind("FAUPMODEL 1\n", 0) == 0);
    const auto back = parse_bundle(text);
    CHECK(back == b);
    CHECK(serialize_bundle(back) == text);

    const auto path = fs::temp_directory_path() / "faup_test_bundle.model";
    save_bundle(b, path);
    CHECK(load_bundle(path) == b);
    fs::remove(path);

    CHECK_THROWS_AS(parse_bundle(text.substr(0, text.size() / 2)), ChecksumError);
    auto flipped = text;
    flipped[text.find("bias") + 6] ^= 1;
    CHECK_THROWS_AS(parse_bundle(flipped), ChecksumError);
    auto v99 = text;
    v99.replace(0, 11, "FAUPMODEL 99");
    CHECK_THROWS_AS(parse_bundle(v99), UnsupportedVersionError);
    CHECK_THROWS_AS(parse_bundle("garbage"), ModelFormatError);

    // Same data and seed: same bytes.
    CHECK(serialize_bundle(train(dataset(10, 0.0), BundleConfig{}).bundle) == text);
}

TEST_CASE("image mode on a small rendered set") {
    SynthConfig c;
    c.per_class = 2;
    c.render = true;
    c.render_width = 140;
    c.render_height = 120;
    const auto data = generate_dataset(c);
    BundleConfig cfg;
    cfg.mode = FeatureMode::image;
    cfg.work_width = 140;
    cfg.work_height = 120;
    const auto r = train(data, cfg);
    REQUIRE(r.bundle.pca.has_value());
    CHECK(r.bundle.pca->dims() == 140u * 120u);
    CHECK(r.bundle.pca->k() == 5);
    const auto f = extract_features(r.bundle, data[0], PointSet{P::mm3, P::mm4});
    CHECK(f.size() == 2 * 49);
    for (const auto& s : data) {
        const auto full = classify_full(r.bundle, s);
        CHECK(index_of(full.emotion) < 6);
        CHECK(classify_pruned(r.bundle, s).points_examined > 0);
    }
    CHECK(parse_bundle(serialize_bundle(r.bundle)) == r.bundle);

    auto unrendered = data[0];
    unrendered.rendered.reset();
    CHECK_THROWS_AS(extract_features(r.bundle, unrendered, PointSet::all()), InvalidInputError);
}
