#include "faup/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "faup/error.hpp"

namespace faup {

namespace fs = std::filesystem;
using P = FeaturePointId;

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

void SynthConfig::validate() const {
    if (per_class < 1) throw InvalidInputError("per-class count must be >= 1");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InvalidInputError("noise sigma must be >= 0");
    if (!(intensity > 0.0) || !std::isfinite(intensity)) throw InvalidInputError("intensity must be > 0");
    if (render_width < 1 || render_height < 1) throw InvalidInputError("render size must be positive");
}

PixelMapping PixelMapping::for_canvas(int w, int h) {
    return PixelMapping{w / 2.0, 0.4 * h, 0.3 * std::min(w, h)};
}

FaceModel PixelMapping::to_pixels(const FaceModel& f) const {
    FaceModel out = f;
    for (auto id : all_points()) out[id] = to_pixel(f[id]);
    return out;
}

FaceModel PixelMapping::from_pixels(const FaceModel& f) const {
    FaceModel out = f;
    for (auto id : all_points()) out[id] = from_pixel(f[id]);
    return out;
}

std::vector<std::size_t> Sequence::boundaries() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < frames.size(); ++i)
        if (frames[i].boundary) out.push_back(i);
    return out;
}

FaceModel neutral_template() {
    FaceModel f;
    // Left half; the right half mirrors it.
    const std::array<std::pair<P, Point2>, 7> left = {{
        {P::bl1, {-0.35, 0.45}},
        {P::bl2, {-0.75, 0.55}},
        {P::bl3, {-1.15, 0.45}},
        {P::el1, {-0.5, 0.0}},
        {P::el2, {-1.1, 0.0}},
        {P::el3, {-0.8, 0.12}},
        {P::el4, {-0.8, -0.12}},
    }};
    const std::array<P, 7> right = {P::br1, P::br2, P::br3, P::er1, P::er2, P::er3, P::er4};
    for (std::size_t i = 0; i < left.size(); ++i) {
        f[left[i].first] = left[i].second;
        f[right[i]] = {-left[i].second.x, left[i].second.y};
    }
    f[P::ml1] = {-0.45, -1.3};
    f[P::ml2] = {-0.2, -1.2};
    f[P::ml3] = {-0.2, -1.42};
    f[P::mr1] = {0.45, -1.3};
    f[P::mr2] = {0.2, -1.2};
    f[P::mr3] = {0.2, -1.42};
    f[P::mm1] = {0.0, -1.15};
    f[P::mm2] = {0.0, -1.25};
    f[P::mm3] = {0.0, -1.35};
    f[P::mm4] = {0.0, -1.45};
    return f;
}

FaceModel apply_aus(const FaceModel& face, AUSet aus, double intensity) {
    if (!(intensity > 0.0)) throw InvalidInputError("apply_aus: intensity must be > 0");
    const Displacement k = au_kinematics(aus);
    FaceModel out = face;
    for (auto id : all_points()) out[id] = face[id] + k[id] * intensity;
    return out;
}

namespace {

void add_noise(FaceModel& f, double sigma, SplitMix64& rng) {
    if (sigma == 0.0) return;
    for (auto id : all_points()) {
        if (point_role(id) != PointRole::active) continue;
        const double dx = rng.gaussian() * sigma;
        const double dy = rng.gaussian() * sigma;
        f[id] = f[id] + Point2{dx, dy};
    }
}

FaceModel expressive_face(Emotion e, double intensity) {
    return apply_aus(neutral_template(), emotion_aus(e), intensity);
}

FaceModel lerp(const FaceModel& a, const FaceModel& b, double t) {
    FaceModel out = a;
    for (auto id : all_points()) out[id] = a[id] + (b[id] - a[id]) * t;
    return out;
}

std::string index_name(std::size_t i) {
    std::string s = std::to_string(i);
    return std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InvalidInputError("cannot write " + p.string());
    out << text;
}

void write_rendered(const fs::path& stem, const RenderedFace& r) {
    write_pgm(fs::path(stem).concat(".pgm"), r.image);
    write_landmarks(fs::path(stem).concat(".pixlandmarks"), r.pixel_landmarks);
}

std::optional<RenderedFace> read_rendered(const fs::path& stem) {
    const auto pgm = fs::path(stem).concat(".pgm");
    const auto pix = fs::path(stem).concat(".pixlandmarks");
    if (!fs::exists(pgm) || !fs::exists(pix)) return std::nullopt;
    return RenderedFace{read_pgm(pgm), read_landmarks(pix)};
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) out.push_back(cell);
    return out;
}

}  // namespace

std::vector<LabeledSample> generate_dataset(const SynthConfig& cfg) {
    cfg.validate();
    SplitMix64 rng(cfg.seed);
    const FaceModel neutral = neutral_template();
    std::vector<LabeledSample> out;
    out.reserve(kEmotions.size() * static_cast<std::size_t>(cfg.per_class));
    for (auto e : kEmotions) {
        const FaceModel base = expressive_face(e, cfg.intensity);
        for (int i = 0; i < cfg.per_class; ++i) {
            LabeledSample s;
            s.neutral = neutral;
            s.expressive = base;
            s.emotion = e;
            add_noise(s.expressive, cfg.noise_sigma, rng);
            if (cfg.render) s.rendered = render_face(s.expressive, cfg.render_width, cfg.render_height);
            out.push_back(std::move(s));
        }
    }
    return out;
}

Sequence generate_sequence(const std::vector<Emotion>& path, int frames_per_state, const SynthConfig& cfg) {
    cfg.validate();
    if (path.empty()) throw InvalidInputError("generate_sequence: empty path");
    if (frames_per_state < 2) throw InvalidInputError("generate_sequence: frames per state must be >= 2");
    SplitMix64 rng(cfg.seed);
    Sequence seq;
    seq.neutral = neutral_template();
    for (std::size_t k = 0; k < path.size(); ++k) {
        const FaceModel target = expressive_face(path[k], cfg.intensity);
        const FaceModel from = k == 0 ? target : expressive_face(path[k - 1], cfg.intensity);
        for (int i = 0; i < frames_per_state; ++i) {
            SequenceFrame fr;
            const double t = k == 0 ? 1.0 : std::min(1.0, static_cast<double>(i + 1) / kRampFrames);
            fr.face = lerp(from, target, t);
            add_noise(fr.face, cfg.noise_sigma, rng);
            fr.face.set_frame_tag(static_cast<int>(seq.frames.size()));
            fr.state = path[k];
            fr.boundary = k > 0 && i == 0;
            if (cfg.render) fr.rendered = render_face(fr.face, cfg.render_width, cfg.render_height);
            seq.frames.push_back(std::move(fr));
        }
    }
    return seq;
}

RenderedFace render_face(const FaceModel& face, int w, int h) {
    const PixelMapping map = PixelMapping::for_canvas(w, h);
    RenderedFace out{Image(w, h, 255), map.to_pixels(face)};
    const FaceModel& px = out.pixel_landmarks;

    static const std::vector<std::vector<P>> strokes = {
        {P::bl3, P::bl2, P::bl1},
        {P::br1, P::br2, P::br3},
        {P::el1, P::el3, P::el2, P::el4, P::el1},
        {P::er1, P::er3, P::er2, P::er4, P::er1},
        {P::ml1, P::ml2, P::mm1, P::mr2, P::mr1, P::mr3, P::mm4, P::ml3, P::ml1},
        {P::ml1, P::mm2, P::mr1},
        {P::ml1, P::mm3, P::mr1},
    };
    constexpr double kHalfWidth = 1.5;
    for (const auto& stroke : strokes) {
        for (std::size_t s = 0; s + 1 < stroke.size(); ++s) {
            const Point2 a = px[stroke[s]];
            const Point2 b = px[stroke[s + 1]];
            const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - 2)));
            const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + 2)));
            const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - 2)));
            const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + 2)));
            const Point2 ab = b - a;
            const double len2 = ab.x * ab.x + ab.y * ab.y;
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    const Point2 ap = Point2{static_cast<double>(x), static_cast<double>(y)} - a;
                    const double t = len2 > 0 ? std::clamp((ap.x * ab.x + ap.y * ab.y) / len2, 0.0, 1.0) : 0.0;
                    const Point2 d = ap - ab * t;
                    const double dark = std::clamp(kHalfWidth - std::hypot(d.x, d.y), 0.0, 1.0);
                    const auto v = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - dark)));
                    out.image.at(x, y) = std::min(out.image.at(x, y), v);
                }
        }
    }
    return out;
}

void write_dataset(const fs::path& root, const std::vector<LabeledSample>& samples, std::uint64_t seed) {
    fs::create_directories(root);
    std::string manifest = "sample\temotion\tseed\n";
    std::array<std::size_t, kEmotions.size()> counters{};
    for (const auto& s : samples) {
        const auto dir = std::string(emotion_dir_name(s.emotion));
        fs::create_directories(root / dir);
        const std::string name = index_name(counters[index_of(s.emotion)]++);
        const fs::path stem = root / dir / name;
        write_landmarks(fs::path(stem).concat(".landmarks"), s.expressive);
        if (s.rendered) write_rendered(stem, *s.rendered);
        manifest += dir + "/" + name + ".landmarks\t" + std::string(emotion_name(s.emotion)) + "\t" +
                    std::to_string(seed) + "\n";
    }
    write_text(root / "manifest.tsv", manifest);
}

LabeledSample read_sample(const fs::path& path) {
    fs::path stem = path;
    if (stem.extension() == ".landmarks" || stem.extension() == ".pgm" || stem.extension() == ".pixlandmarks") {
        stem.replace_extension();
    }
    LabeledSample s;
    s.neutral = neutral_template();
    s.expressive = read_landmarks(fs::path(stem).concat(".landmarks"));
    s.rendered = read_rendered(stem);
    s.source = path;
    if (auto e = parse_emotion(stem.parent_path().filename().string())) s.emotion = *e;
    return s;
}

std::vector<LabeledSample> read_dataset(const fs::path& root) {
    std::ifstream in(root / "manifest.tsv");
    if (!in) throw InvalidInputError("no manifest.tsv in " + root.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<LabeledSample> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_tabs(line);
        if (cells.size() < 2) throw ParseError("manifest: expected sample and emotion columns", line_no);
        const auto e = parse_emotion(cells[1]);
        if (!e) throw ParseError("manifest: unknown emotion '" + cells[1] + "'", line_no);
        LabeledSample s = read_sample(root / cells[0]);
        s.emotion = *e;
        out.push_back(std::move(s));
    }
    return out;
}

void write_sequence(const fs::path& dir, const Sequence& seq) {
    fs::create_directories(dir);
    write_landmarks(dir / "neutral.landmarks", seq.neutral);
    std::string index = "frame\tstate\tboundary\n";
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        const auto& fr = seq.frames[i];
        const fs::path stem = dir / ("frame_" + index_name(i));
        write_landmarks(fs::path(stem).concat(".landmarks"), fr.face);
        if (fr.rendered) write_rendered(stem, *fr.rendered);
        index += stem.filename().string() + "\t" + std::string(emotion_name(fr.state)) + "\t" +
                 (fr.boundary ? "1" : "0") + "\n";
    }
    write_text(dir / "sequence.tsv", index);
}

Sequence read_sequence(const fs::path& dir) {
    std::ifstream in(dir / "sequence.tsv");
    if (!in) throw InvalidInputError("no sequence.tsv in " + dir.string());
    Sequence seq;
    seq.neutral = fs::exists(dir / "neutral.landmarks") ? read_landmarks(dir / "neutral.landmarks") : neutral_template();
    std::string line;
    std::getline(in, line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_tabs(line);
        if (cells.size() < 3) throw ParseError("sequence: expected frame, state, boundary", line_no);
        const auto e = parse_emotion(cells[1]);
        if (!e) throw ParseError("sequence: unknown state '" + cells[1] + "'", line_no);
        SequenceFrame fr;
        const fs::path stem = dir / cells[0];
        fr.face = read_landmarks(fs::path(stem).concat(".landmarks"));
        fr.face.set_frame_tag(static_cast<int>(seq.frames.size()));
        fr.rendered = read_rendered(stem);
        fr.state = *e;
        fr.boundary = cells[2] == "1";
        seq.frames.push_back(std::move(fr));
    }
    return seq;
}

}  // namespace faup
