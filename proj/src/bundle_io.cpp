#include <charconv>
#include <fstream>
#include <sstream>

#include "faup/error.hpp"
#include "faup/pipeline.hpp"

namespace faup {

namespace {

constexpr std::string_view kMagic = "FAUPMODEL";
constexpr int kVersion = 1;
constexpr std::string_view kChecksumTag = "[CHECKSUM]\n";

std::string hex(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
    return std::string(buf, r.ptr);
}

void put_vector(std::string& out, std::string_view key, std::span<const double> v) {
    out += key;
    for (double x : v) {
        out += ' ';
        out += hex(x);
    }
    out += '\n';
}

class Lines {
public:
    explicit Lines(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    std::size_t line_no() const { return line_; }

    std::string_view next() {
        if (done()) throw ModelFormatError("model: unexpected end of file");
        const auto end = text_.find('\n', pos_);
        const auto stop = end == std::string_view::npos ? text_.size() : end;
        const auto line = text_.substr(pos_, stop - pos_);
        pos_ = stop + 1;
        ++line_;
        return line;
    }

    std::string_view peek() const {
        const auto end = text_.find('\n', pos_);
        return text_.substr(pos_, (end == std::string_view::npos ? text_.size() : end) - pos_);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

std::vector<std::string_view> words(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        const auto start = i;
        while (i < line.size() && line[i] != ' ') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

[[noreturn]] void bad(const Lines& in, const std::string& what) {
    throw ModelFormatError("model line " + std::to_string(in.line_no()) + ": " + what);
}

double parse_hex(const Lines& in, std::string_view w) {
    double v = 0.0;
    const auto r = std::from_chars(w.data(), w.data() + w.size(), v, std::chars_format::hex);
    if (r.ec != std::errc() || r.ptr != w.data() + w.size()) bad(in, "bad real '" + std::string(w) + "'");
    return v;
}

long long parse_int(const Lines& in, std::string_view w) {
    long long v = 0;
    const auto r = std::from_chars(w.data(), w.data() + w.size(), v);
    if (r.ec != std::errc() || r.ptr != w.data() + w.size()) bad(in, "bad integer '" + std::string(w) + "'");
    return v;
}

// "key v1 v2 ..." with the expected key.
std::vector<std::string_view> keyed(Lines& in, std::string_view key, std::size_t min_values = 1) {
    auto w = words(in.next());
    if (w.empty() || w[0] != key) bad(in, "expected '" + std::string(key) + "'");
    w.erase(w.begin());
    if (w.size() < min_values) bad(in, "missing value for '" + std::string(key) + "'");
    return w;
}

double keyed_real(Lines& in, std::string_view key) { return parse_hex(in, keyed(in, key)[0]); }
long long keyed_int(Lines& in, std::string_view key) { return parse_int(in, keyed(in, key)[0]); }

Vector keyed_vector(Lines& in, std::string_view key, std::size_t n) {
    auto w = keyed(in, key, 0);
    if (w.size() != n) bad(in, "'" + std::string(key) + "' has " + std::to_string(w.size()) + " values, expected " + std::to_string(n));
    Vector v;
    v.reserve(n);
    for (auto x : w) v.push_back(parse_hex(in, x));
    return v;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string serialize_bundle(const TrainedBundle& b) {
    const auto& c = b.config;
    std::string out = std::string(kMagic) + " " + std::to_string(kVersion) + "\n";
    out += "[CONFIG]\n";
    out += "mode " + std::string(to_string(c.mode)) + "\n";
    out += "work_size " + std::to_string(c.work_width) + " " + std::to_string(c.work_height) + "\n";
    out += "components " + std::to_string(c.components) + "\n";
    out += "patch_radius " + std::to_string(c.patch_radius) + "\n";
    out += "patch_source " + std::string(to_string(c.patch_source)) + "\n";
    out += "canny " + hex(c.canny.low) + " " + hex(c.canny.high) + " " + hex(c.canny.sigma) + "\n";
    out += "canny_order " + std::string(to_string(c.canny_order)) + "\n";
    out += "svm_c " + hex(c.svm_c) + "\n";
    out += "split_ratio " + hex(c.split_ratio) + "\n";
    out += "seed " + std::to_string(c.seed) + "\n";
    out += "tau_factor " + hex(c.tau_factor) + "\n";
    out += "intensity " + hex(b.intensity) + "\n";
    if (b.pca) {
        const auto& p = *b.pca;
        out += "[PCA]\n";
        out += "dims " + std::to_string(p.dims()) + "\n";
        out += "k " + std::to_string(p.k()) + "\n";
        out += std::string("truncated ") + (p.truncated ? "1" : "0") + "\n";
        put_vector(out, "mean", p.mean);
        put_vector(out, "eigenvalues", p.eigenvalues);
        for (const auto& comp : p.components) put_vector(out, "component", comp);
    }
    for (auto e : kEmotions) {
        const auto& d = b.detectors[index_of(e)];
        out += "[DETECTOR " + std::string(not_emotion_label(e)) + "]\n";
        out += "C " + hex(d.C) + "\n";
        out += "bias " + hex(d.bias) + "\n";
        out += "dims " + std::to_string(d.weights.size()) + "\n";
        put_vector(out, "weights", d.weights);
        out += "sv_count " + std::to_string(d.sv_count) + "\n";
        out += "margin " + hex(d.margin) + "\n";
    }
    char sum[17];
    std::snprintf(sum, sizeof sum, "%016llx", static_cast<unsigned long long>(fnv1a64(out)));
    out += std::string(kChecksumTag) + sum + "\n";
    return out;
}

TrainedBundle parse_bundle(std::string_view text) {
    {
        const auto first = text.substr(0, text.find('\n'));
        const auto w = words(first);
        if (w.size() != 2 || w[0] != kMagic) throw ModelFormatError("model: missing FAUPMODEL header");
        long long v = 0;
        const auto r = std::from_chars(w[1].data(), w[1].data() + w[1].size(), v);
        if (r.ec != std::errc() || r.ptr != w[1].data() + w[1].size()) throw ModelFormatError("model: bad version");
        if (v != kVersion) {
            throw UnsupportedVersionError("model: unsupported version " + std::string(w[1]) + " (this build reads " +
                                          std::to_string(kVersion) + ")");
        }
    }
    const auto at = text.rfind(kChecksumTag);
    if (at == std::string_view::npos || (at != 0 && text[at - 1] != '\n')) {
        throw ChecksumError("model: checksum section missing (file truncated?)");
    }
    const auto body = text.substr(0, at);
    auto stored = text.substr(at + kChecksumTag.size());
    if (!stored.empty() && stored.back() == '\n') stored.remove_suffix(1);
    char expect[17];
    std::snprintf(expect, sizeof expect, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
    if (stored != std::string_view(expect)) throw ChecksumError("model: checksum mismatch");

    Lines in(body);
    in.next();  // header, checked above
    if (in.next() != "[CONFIG]") bad(in, "expected [CONFIG]");
    TrainedBundle b;
    auto& c = b.config;
    {
        const auto m = parse_feature_mode(keyed(in, "mode")[0]);
        if (!m) bad(in, "unknown mode");
        c.mode = *m;
        const auto ws = keyed(in, "work_size", 2);
        c.work_width = static_cast<int>(parse_int(in, ws[0]));
        c.work_height = static_cast<int>(parse_int(in, ws[1]));
        c.components = static_cast<int>(keyed_int(in, "components"));
        c.patch_radius = static_cast<int>(keyed_int(in, "patch_radius"));
        const auto ps = keyed(in, "patch_source")[0];
        if (ps != "edges" && ps != "luminance") bad(in, "unknown patch source");
        c.patch_source = ps == "edges" ? PatchSource::edges : PatchSource::luminance;
        const auto cp = keyed(in, "canny", 3);
        c.canny = CannyParams{parse_hex(in, cp[0]), parse_hex(in, cp[1]), parse_hex(in, cp[2])};
        const auto co = keyed(in, "canny_order")[0];
        if (co != "pca" && co != "raw") bad(in, "unknown canny order");
        c.canny_order = co == "pca" ? CannyOrder::pca_components : CannyOrder::raw;
        c.svm_c = keyed_real(in, "svm_c");
        c.split_ratio = keyed_real(in, "split_ratio");
        c.seed = static_cast<std::uint64_t>(keyed_int(in, "seed"));
        c.tau_factor = keyed_real(in, "tau_factor");
        b.intensity = keyed_real(in, "intensity");
    }
    if (in.peek() == "[PCA]") {
        in.next();
        PcaModel p;
        const auto dims = static_cast<std::size_t>(keyed_int(in, "dims"));
        const auto k = static_cast<std::size_t>(keyed_int(in, "k"));
        p.truncated = keyed_int(in, "truncated") != 0;
        p.mean = keyed_vector(in, "mean", dims);
        p.eigenvalues = keyed_vector(in, "eigenvalues", k);
        for (std::size_t i = 0; i < k; ++i) p.components.push_back(keyed_vector(in, "component", dims));
        b.pca = std::move(p);
    }
    for (auto e : kEmotions) {
        const std::string tag = "[DETECTOR " + std::string(not_emotion_label(e)) + "]";
        if (in.next() != tag) bad(in, "expected " + tag);
        SvmModel& d = b.detectors[index_of(e)];
        d.C = keyed_real(in, "C");
        d.bias = keyed_real(in, "bias");
        const auto dims = static_cast<std::size_t>(keyed_int(in, "dims"));
        d.weights = keyed_vector(in, "weights", dims);
        d.sv_count = static_cast<int>(keyed_int(in, "sv_count"));
        d.margin = keyed_real(in, "margin");
        d.label_map = {std::string(not_emotion_label(e)), std::string(emotion_name(e))};
    }
    if (!in.done()) bad(in, "unexpected trailing content");
    if (c.mode == FeatureMode::image && !b.pca) throw ModelFormatError("model: image-mode bundle without [PCA]");
    return b;
}

void save_bundle(const TrainedBundle& b, const std::filesystem::path& path) {
    const auto text = serialize_bundle(b);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw InvalidInputError("failed writing " + path.string());
}

TrainedBundle load_bundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_bundle(ss.str());
}

}  // namespace faup
