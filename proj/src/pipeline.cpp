#include "faup/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "faup/error.hpp"

namespace faup {

namespace {

constexpr std::size_t kNoPrior = 6;

// Per-hypothesis data for the rule stage, built once per prior.
struct PlanEntry {
    Emotion hypothesis = Emotion::surprise;
    PointSet points;
    int size = 0;
    AUSet present;  // AUs taken as present when the plan's points agree
    std::optional<TransitionRule> rule;
    // The AU-level rules accept `present` as this hypothesis. Depends only on
    // the tables, so it is settled when the plan table is built.
    bool confirmed = false;
};

struct PlanTable {
    std::vector<PlanEntry> entries;
    int largest = 0;
};

// Unit expected displacement of every point along its action axis, per emotion.
using AxisKinematics = std::array<double, kPointCount>;

const std::array<AxisKinematics, 6>& expected_kinematics() {
    static const auto table = [] {
        std::array<AxisKinematics, 6> t{};
        for (auto e : kEmotions) {
            const Displacement d = au_kinematics(emotion_aus(e));
            for (auto id : all_points()) {
                t[index_of(e)][index_of(id)] = point_axis(id) == Axis::x ? d[id].x : d[id].y;
            }
        }
        return t;
    }();
    return table;
}

bool rules_confirm(const PlanEntry& e, std::optional<Emotion> prior, const AUObservation& obs);

const PlanTable& plan_table(std::optional<Emotion> prior) {
    static const auto tables = [] {
        std::array<PlanTable, 7> t;
        for (std::size_t slot = 0; slot < t.size(); ++slot) {
            const std::optional<Emotion> p =
                slot == kNoPrior ? std::nullopt : std::optional<Emotion>(kEmotions[slot]);
            for (const auto& plan : plan_monitoring(p)) {
                PlanEntry e;
                e.hypothesis = plan.hypothesis;
                e.points = plan.points;
                e.size = static_cast<int>(plan.points.size());
                e.present = units_of(plan.aus_to_check);
                if (p == Emotion::surprise) {
                    e.rule = transition_rule(*p, plan.hypothesis);
                } else if (p) {
                    e.rule = derive_transition_rule(*p, plan.hypothesis);
                }
                e.confirmed = rules_confirm(e, p, AUObservation::closed_world(e.present));
                t[slot].largest = std::max(t[slot].largest, e.size);
                t[slot].entries.push_back(std::move(e));
            }
        }
        return t;
    }();
    return tables[prior ? index_of(*prior) : kNoPrior];
}

const std::array<Point2, kPointCount>& template_points() {
    static const auto pts = neutral_template().points();
    return pts;
}

const DecisionTree& surprise_tree() {
    static const DecisionTree tree = build_transition_tree(Emotion::surprise);
    return tree;
}

// Lazily normalizes only the points the rule stage asks for.
class AxisReader {
public:
    explicit AxisReader(const FaceModel& face) : face_(face), frame_(SimilarityFrame::from_face(face)) {}

    double operator()(std::size_t i) {
        const std::uint32_t bit = std::uint32_t{1} << i;
        if (!(seen_ & bit)) {
            seen_ |= bit;
            const FeaturePointId id = point_at(i);
            const Point2 d = frame_.apply(face_.points()[i]) - template_points()[i];
            cache_[i] = point_axis(id) == Axis::x ? d.x : d.y;
        }
        return cache_[i];
    }

    int read() const { return std::popcount(seen_); }

private:
    const FaceModel& face_;
    SimilarityFrame frame_;
    std::uint32_t seen_ = 0;
    std::array<double, kPointCount> cache_{};
};

bool consistent(AxisReader& read, Emotion hyp, PointSet points, double intensity, double tau) {
    const auto& kin = expected_kinematics()[index_of(hyp)];
    std::uint32_t bits = points.bits();
    while (bits) {
        const auto i = static_cast<std::size_t>(std::countr_zero(bits));
        bits &= bits - 1;
        if (std::abs(read(i) - kin[i] * intensity) > tau) return false;
    }
    return true;
}

struct RuleStage {
    const PlanEntry* entry = nullptr;  // single surviving hypothesis, if any
    EmotionSet candidates;
    int largest_considered = 0;
    int points_read = 0;
};

// Kinematic consistency of each hypothesis with its plan; several survivors
// are re-checked on the union of their plans.
RuleStage rule_stage(const TrainedBundle& b, const FaceModel& face, const PlanTable& table) {
    AxisReader read(face);
    const double I = b.intensity;
    const double tau = b.tau();
    RuleStage out;
    std::uint8_t alive = 0;
    PointSet united;
    for (std::size_t k = 0; k < table.entries.size(); ++k) {
        const auto& e = table.entries[k];
        if (consistent(read, e.hypothesis, e.points, I, tau)) {
            alive |= std::uint8_t(1u << k);
            united |= e.points;
        }
    }
    if (std::popcount(alive) > 1) {
        for (std::size_t k = 0; k < table.entries.size(); ++k) {
            if ((alive >> k & 1u) && !consistent(read, table.entries[k].hypothesis, united, I, tau)) {
                alive &= std::uint8_t(~(1u << k));
            }
        }
    }
    for (std::size_t k = 0; k < table.entries.size(); ++k) {
        if (alive >> k & 1u) {
            out.candidates.insert(table.entries[k].hypothesis);
            out.largest_considered = std::max(out.largest_considered, table.entries[k].size);
            out.entry = &table.entries[k];
        }
    }
    if (out.candidates.size() != 1) out.entry = nullptr;
    if (out.candidates.empty()) out.largest_considered = table.largest;
    out.points_read = read.read();
    return out;
}

// Stage 2 on the surviving hypothesis: the AU-level rules must agree.
bool rules_confirm(const PlanEntry& e, std::optional<Emotion> prior, const AUObservation& obs) {
    if (!prior) return classify_observation(obs).emotion() == e.hypothesis;
    if (*prior == Emotion::surprise) {
        const auto t = surprise_tree().evaluate(obs);
        return !t.indeterminate() && t.label.single() == e.hypothesis;
    }
    return e.rule->satisfied_by(obs.present());
}

void require_trained(const TrainedBundle& b) {
    if (!(b.intensity > 0.0) || b.detectors[0].weights.empty()) {
        throw InvalidInputError("model bundle is not trained");
    }
}

Image working_image(const TrainedBundle& b, const LabeledSample& s, PixelLandmarks& lm) {
    if (!s.rendered) throw InvalidInputError("image mode needs an image and pixel landmarks for every sample");
    const Image& src = s.rendered->image;
    const double fx = static_cast<double>(b.config.work_width) / src.width();
    const double fy = static_cast<double>(b.config.work_height) / src.height();
    lm = s.rendered->pixel_landmarks;
    for (auto id : all_points()) {
        const Point2 p = lm[id];
        lm[id] = {(p.x + 0.5) * fx - 0.5, (p.y + 0.5) * fy - 0.5};
    }
    return resize(src, b.config.work_width, b.config.work_height);
}

double estimate_intensity(const std::vector<LabeledSample>& data, const std::vector<std::size_t>& idx) {
    double sum = 0.0;
    std::size_t n = 0;
    const auto& tmpl = template_points();
    for (auto i : idx) {
        const Displacement k = au_kinematics(emotion_aus(data[i].emotion));
        const FaceModel f = normalize_face(data[i].expressive);
        double num = 0.0;
        double den = 0.0;
        for (std::size_t p = 0; p < kPointCount; ++p) {
            const Point2 d = f.points()[p] - tmpl[p];
            num += d.x * k.delta[p].x + d.y * k.delta[p].y;
            den += k.delta[p].x * k.delta[p].x + k.delta[p].y * k.delta[p].y;
        }
        if (den > 0.0) {
            sum += num / den;
            ++n;
        }
    }
    if (n == 0 || !(sum > 0.0)) throw InvalidInputError("training data shows no expression movement");
    return sum / static_cast<double>(n);
}

std::vector<double> image_vector_for_pca(const TrainedBundle& b, const LabeledSample& s) {
    PixelLandmarks lm;
    return image_to_vector(working_image(b, s, lm), b.config.work_width, b.config.work_height);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string_view to_string(FeatureMode m) noexcept { return m == FeatureMode::landmark ? "landmark" : "image"; }
std::string_view to_string(CannyOrder o) noexcept { return o == CannyOrder::pca_components ? "pca" : "raw"; }
std::string_view to_string(PatchSource s) noexcept { return s == PatchSource::edges ? "edges" : "luminance"; }

std::optional<FeatureMode> parse_feature_mode(std::string_view s) noexcept {
    if (s == "landmark") return FeatureMode::landmark;
    if (s == "image") return FeatureMode::image;
    return std::nullopt;
}

void BundleConfig::validate() const {
    if (work_width < 1 || work_height < 1) throw InvalidInputError("working size must be positive");
    if (components < 1) throw InvalidInputError("components must be >= 1");
    if (patch_radius < 1) throw InvalidInputError("patch radius must be >= 1");
    if (!(svm_c > 0.0)) throw InvalidInputError("SVM C must be positive");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw InvalidInputError("split ratio must lie in (0, 1)");
    if (!(tau_factor > 0.0)) throw InvalidInputError("tau factor must be positive");
    if (!(canny.low >= 0.0 && canny.high >= canny.low && canny.sigma > 0.0)) {
        throw InvalidInputError("invalid canny parameters");
    }
}

DataSplit split_dataset(const std::vector<LabeledSample>& data, double ratio, std::uint64_t seed) {
    std::array<std::vector<std::size_t>, 6> by_class;
    for (std::size_t i = 0; i < data.size(); ++i) by_class[index_of(data[i].emotion)].push_back(i);
    for (auto e : kEmotions) {
        if (by_class[index_of(e)].empty()) {
            throw InvalidInputError("dataset has no " + std::string(emotion_name(e)) + " samples");
        }
    }
    const std::size_t n = data.size();
    const auto wanted = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    const std::size_t total = std::max<std::size_t>(wanted, by_class.size());

    std::array<std::size_t, 6> take{};
    std::array<double, 6> rest{};
    std::size_t used = 0;
    for (std::size_t c = 0; c < 6; ++c) {
        const double quota = static_cast<double>(total) * by_class[c].size() / static_cast<double>(n);
        take[c] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(quota)), 1, by_class[c].size());
        rest[c] = quota - std::floor(quota);
        used += take[c];
    }
    while (used < total) {
        std::size_t best = 6;
        for (std::size_t c = 0; c < 6; ++c) {
            if (take[c] >= by_class[c].size()) continue;
            if (best == 6 || rest[c] > rest[best]) best = c;
        }
        if (best == 6) break;
        ++take[best];
        rest[best] = -1.0;
        ++used;
    }

    SplitMix64 rng(seed);
    DataSplit out;
    for (std::size_t c = 0; c < 6; ++c) {
        auto idx = by_class[c];
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.next() % i)]);
        }
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take[c]));
        out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(take[c]), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    if (out.test.empty()) throw InvalidInputError("degenerate split: no samples left for testing");
    return out;
}

std::vector<double> extract_features(const TrainedBundle& b, const LabeledSample& s, PointSet monitored) {
    if (monitored.empty()) throw InvalidInputError("extract_features: empty monitored set");
    if (b.config.mode == FeatureMode::landmark) {
        const SimilarityFrame frame = SimilarityFrame::from_face(s.expressive);
        const double inv = 1.0 / b.intensity;
        const auto& tmpl = template_points();
        std::vector<double> out;
        out.reserve(monitored.size() * 2);
        for (auto id : monitored.to_vector()) {
            const Point2 d = frame.apply(s.expressive[id]) - tmpl[index_of(id)];
            out.push_back(d.x * inv);
            out.push_back(d.y * inv);
        }
        return out;
    }

    if (!b.pca) throw InvalidInputError("image-mode bundle has no PCA model");
    PixelLandmarks lm;
    Image img = working_image(b, s, lm);
    if (b.config.canny_order == CannyOrder::pca_components) {
        const auto v = image_to_vector(img, b.config.work_width, b.config.work_height);
        const auto rec = pca_reconstruct(*b.pca, pca_project(*b.pca, v));
        img = vector_to_image(rec, b.config.work_width, b.config.work_height);
    }
    if (b.config.patch_source == PatchSource::luminance) {
        return extract_luminance_patches(img, lm, monitored, b.config.patch_radius);
    }
    return extract_patches(canny(img, b.config.canny), lm, monitored, b.config.patch_radius);
}

TrainResult train(const std::vector<LabeledSample>& data, const BundleConfig& cfg) {
    cfg.validate();
    TrainResult out;
    out.split = split_dataset(data, cfg.split_ratio, cfg.seed);
    TrainedBundle& b = out.bundle;
    b.config = cfg;
    b.intensity = estimate_intensity(data, out.split.train);

    if (cfg.mode == FeatureMode::image) {
        std::vector<Vector> vecs;
        for (auto i : out.split.train) vecs.push_back(image_vector_for_pca(b, data[i]));
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg.components), vecs.size() - 1);
        if (k < 1) throw InvalidInputError("image mode needs at least two training samples");
        b.pca = pca_fit(vecs, k);
    }

    const PointSet all = PointSet::all();
    std::vector<Vector> train_x;
    for (auto i : out.split.train) train_x.push_back(extract_features(b, data[i], all));
    std::vector<Vector> test_x;
    for (auto i : out.split.test) test_x.push_back(extract_features(b, data[i], all));

    for (auto e : kEmotions) {
        std::vector<SvmSample> samples;
        for (std::size_t j = 0; j < train_x.size(); ++j) {
            samples.push_back(SvmSample{train_x[j], data[out.split.train[j]].emotion == e ? -1 : 1});
        }
        SvmModel m = svm_train(samples, cfg.svm_c);
        m.label_map = {std::string(not_emotion_label(e)), std::string(emotion_name(e))};
        std::size_t right = 0;
        for (std::size_t j = 0; j < test_x.size(); ++j) {
            const int want = data[out.split.test[j]].emotion == e ? -1 : 1;
            if (svm_predict(m, test_x[j]).label == want) ++right;
        }
        auto& st = out.detectors[index_of(e)];
        st.correctness = test_x.empty() ? 0.0 : static_cast<double>(right) / test_x.size();
        st.sv_count = m.sv_count;
        st.margin = m.margin;
        b.detectors[index_of(e)] = std::move(m);
    }
    return out;
}

FullResult classify_full(const TrainedBundle& b, const LabeledSample& s) {
    require_trained(b);
    const auto x = extract_features(b, s, PointSet::all());
    FullResult r;
    double best = 0.0;
    for (auto e : kEmotions) {
        const double score = svm_predict(b.detectors[index_of(e)], x).score;
        r.scores[index_of(e)] = score;
        if (e == kEmotions.front() || score < best) {
            best = score;
            r.emotion = e;
        }
    }
    // No detector says "present", or the winner's evidence is no stronger than
    // its bias alone (what an expressionless input scores).
    r.low_confidence = best >= 0.0 || best >= b.detectors[index_of(r.emotion)].bias;
    return r;
}

PrunedResult classify_pruned(const TrainedBundle& b, const LabeledSample& s, std::optional<Emotion> prior) {
    require_trained(b);
    const PlanTable& table = plan_table(prior);
    const RuleStage st = rule_stage(b, s.expressive, table);
    PrunedResult r;
    r.points_read = st.points_read;
    if (st.entry) {
        r.observation = AUObservation::closed_world(st.entry->present);
        if (st.entry->confirmed) {
            r.decision = EmotionDecision::from_matches(EmotionSet{st.entry->hypothesis});
            r.emotion = st.entry->hypothesis;
            r.points_examined = st.entry->size;
            r.evidence = st.entry->rule;
            return r;
        }
    }
    const FullResult full = classify_full(b, s);
    r.fallback = true;
    r.decision = EmotionDecision::from_matches(EmotionSet{full.emotion});
    r.emotion = full.emotion;
    r.points_examined = st.largest_considered + static_cast<int>(kPointCount);
    return r;
}

std::vector<TransitionEvent> detect_transitions(const TrainedBundle& b, const Sequence& seq) {
    require_trained(b);
    if (seq.frames.size() < 2) throw InvalidInputError("transition detection needs at least two frames");
    auto frame_sample = [&](std::size_t i) {
        LabeledSample s;
        s.neutral = seq.neutral;
        s.expressive = seq.frames[i].face;
        s.rendered = seq.frames[i].rendered;
        return s;
    };

    Emotion state = *classify_pruned(b, frame_sample(0)).emotion;
    std::vector<TransitionEvent> events;
    std::optional<TransitionEvent> pending;
    for (std::size_t i = 1; i < seq.frames.size(); ++i) {
        const PlanTable& table = plan_table(state);
        const RuleStage st = rule_stage(b, seq.frames[i].face, table);
        std::optional<TransitionEvent> seen;
        if (st.entry) {
            if (st.entry->confirmed) {
                seen = TransitionEvent{i, state, st.entry->hypothesis, *st.entry->rule, st.entry->rule->derived};
            }
        }
        if (seen && pending && pending->to == seen->to) {
            events.push_back(*pending);
            state = pending->to;
            pending.reset();
        } else {
            pending = seen;
        }
    }
    return events;
}

BenchReport bench_compare(const TrainedBundle& b, const std::vector<LabeledSample>& data, int timing_repeats) {
    require_trained(b);
    if (data.empty()) throw InvalidInputError("bench: empty dataset");
    BenchReport rep;
    rep.samples = data.size();

    const PlanTable& table = plan_table(std::nullopt);
    std::array<std::vector<std::size_t>, 6> by_class;
    for (std::size_t i = 0; i < data.size(); ++i) by_class[index_of(data[i].emotion)].push_back(i);

    std::size_t right_full = 0;
    std::size_t right_pruned = 0;
    std::size_t agree = 0;
    std::size_t fallbacks = 0;
    std::array<std::size_t, 6> det_right{};
    std::array<std::size_t, 6> label_right{};
    std::array<double, 6> examined{};
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& s = data[i];
        const FullResult f = classify_full(b, s);
        const PrunedResult p = classify_pruned(b, s);
        right_full += f.emotion == s.emotion;
        right_pruned += p.emotion == s.emotion;
        agree += p.emotion == f.emotion;
        fallbacks += p.fallback;
        examined[index_of(s.emotion)] += p.points_examined;
        for (auto e : kEmotions) {
            const bool truly_not = s.emotion != e;
            det_right[index_of(e)] += (f.scores[index_of(e)] >= 0.0) == truly_not;
            label_right[index_of(e)] += (p.emotion != e) == truly_not;
        }
    }
    const double n = static_cast<double>(data.size());
    rep.accuracy_full = right_full / n;
    rep.accuracy_pruned = right_pruned / n;
    rep.agreement = agree / n;
    rep.fallback_rate = fallbacks / n;
    for (auto e : kEmotions) {
        const auto k = index_of(e);
        rep.detectors[k] = DetectorStats{det_right[k] / n, b.detectors[k].sv_count, b.detectors[k].margin};
        rep.pruned_label_correctness[k] = label_right[k] / n;
    }

    // Timing: single-threaded, each path over the same samples, best of three.
    volatile double sink = 0.0;
    auto time_path = [&](const std::vector<std::size_t>& idx, bool pruned, int repeats) {
        double best = std::numeric_limits<double>::infinity();
        for (int round = 0; round < 3; ++round) {
            const auto t0 = std::chrono::steady_clock::now();
            for (int r = 0; r < repeats; ++r) {
                for (auto i : idx) {
                    if (pruned) {
                        sink = sink + static_cast<double>(classify_pruned(b, data[i]).points_examined);
                    } else {
                        sink = sink + classify_full(b, data[i]).scores[0];
                    }
                }
            }
            best = std::min(best, seconds_since(t0));
        }
        return best / (static_cast<double>(repeats) * static_cast<double>(std::max<std::size_t>(idx.size(), 1)));
    };
    int repeats = timing_repeats;
    if (repeats <= 0) {
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& s : data) sink = sink + classify_full(b, s).scores[0];
        const double once = std::max(seconds_since(t0), 1e-9);
        repeats = static_cast<int>(std::clamp(std::ceil(0.02 / once), 1.0, 2000.0));
    }

    double full_total = 0.0;
    double pruned_total = 0.0;
    double plan_sum = 0.0;
    for (const auto& entry : table.entries) {
        BenchRow row;
        row.emotion = entry.hypothesis;
        row.pruned_points = entry.size;
        row.reduction = 1.0 - static_cast<double>(row.pruned_points) / static_cast<double>(row.full_points);
        const auto& idx = by_class[index_of(entry.hypothesis)];
        row.samples = idx.size();
        if (!idx.empty()) {
            row.mean_points_examined = examined[index_of(entry.hypothesis)] / static_cast<double>(idx.size());
            row.full_seconds_per_sample = time_path(idx, false, repeats);
            row.pruned_seconds_per_sample = time_path(idx, true, repeats);
            full_total += row.full_seconds_per_sample * idx.size();
            pruned_total += row.pruned_seconds_per_sample * idx.size();
        }
        plan_sum += row.reduction;
        rep.rows.push_back(row);
    }
    rep.mean_reduction = plan_sum / static_cast<double>(rep.rows.size());
    rep.full_seconds_per_sample = full_total / n;
    rep.pruned_seconds_per_sample = pruned_total / n;
    return rep;
}

std::string BenchReport::to_tsv() const {
    std::ostringstream o;
    o << "emotion\tfull_points\tpruned_points\treduction\tmean_points_examined\tfull_s_per_sample\tpruned_s_per_sample\tsamples\n";
    for (const auto& r : rows) {
        o << emotion_name(r.emotion) << '\t' << r.full_points << '\t' << r.pruned_points << '\t'
          << format_real(r.reduction) << '\t' << format_real(r.mean_points_examined) << '\t'
          << format_real(r.full_seconds_per_sample) << '\t' << format_real(r.pruned_seconds_per_sample) << '\t'
          << r.samples << '\n';
    }
    o << "\ndetector\tsv_number\tmargin\tcorrectness_svm\tcorrectness_pruned\n";
    for (auto e : kEmotions) {
        const auto k = index_of(e);
        o << not_emotion_label(e) << '\t' << detectors[k].sv_count << '\t' << format_real(detectors[k].margin) << '\t'
          << format_real(detectors[k].correctness) << '\t' << format_real(pruned_label_correctness[k]) << '\n';
    }
    o << "\nmetric\tvalue\n";
    o << "samples\t" << samples << '\n';
    o << "mean_reduction\t" << format_real(mean_reduction) << '\n';
    o << "accuracy_full\t" << format_real(accuracy_full) << '\n';
    o << "accuracy_pruned\t" << format_real(accuracy_pruned) << '\n';
    o << "agreement\t" << format_real(agreement) << '\n';
    o << "fallback_rate\t" << format_real(fallback_rate) << '\n';
    o << "full_s_per_sample\t" << format_real(full_seconds_per_sample) << '\n';
    o << "pruned_s_per_sample\t" << format_real(pruned_seconds_per_sample) << '\n';
    return o.str();
}

std::string BenchReport::summary() const {
    char buf[256];
    std::string out = "Emotion recognition using just SVM / using proposed method\n";
    std::snprintf(buf, sizeof buf, "%-8s %10s %8s %14s %16s\n", "Emotions", "SV number", "Margin", "Correctness", "Correctness (pruned)");
    out += buf;
    for (auto e : kEmotions) {
        const auto k = index_of(e);
        std::snprintf(buf, sizeof buf, "%-8s %10d %8.3f %13.1f%% %15.1f%%\n", std::string(not_emotion_label(e)).c_str(),
                      detectors[k].sv_count, detectors[k].margin, 100.0 * detectors[k].correctness,
                      100.0 * pruned_label_correctness[k]);
        out += buf;
    }
    out += "\nExecution efficiency\n";
    std::snprintf(buf, sizeof buf, "%-9s %6s %7s %9s %18s %18s\n", "Emotion", "Full", "Pruned", "Reduction",
                  "Time old (us)", "Time new (us)");
    out += buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-9s %6d %7d %8.1f%% %18.3f %18.3f\n", std::string(emotion_name(r.emotion)).c_str(),
                      r.full_points, r.pruned_points, 100.0 * r.reduction, 1e6 * r.full_seconds_per_sample,
                      1e6 * r.pruned_seconds_per_sample);
        out += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "\nmean point reduction %.1f%%, time ratio pruned/full %.3f\n"
                  "accuracy full %.1f%%, pruned %.1f%%, agreement %.1f%%, fallback %.1f%% over %zu samples\n",
                  100.0 * mean_reduction,
                  full_seconds_per_sample > 0 ? pruned_seconds_per_sample / full_seconds_per_sample : 0.0,
                  100.0 * accuracy_full, 100.0 * accuracy_pruned, 100.0 * agreement, 100.0 * fallback_rate, samples);
    out += buf;
    return out;
}

}  // namespace faup
