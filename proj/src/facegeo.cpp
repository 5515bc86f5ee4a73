#include "faup/facegeo.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "faup/error.hpp"

namespace faup {

namespace {

constexpr std::array<std::string_view, kPointCount> kNames = {
    "bl1", "bl2", "bl3", "br1", "br2", "br3",
    "el1", "el2", "el3", "el4", "er1", "er2", "er3", "er4",
    "ml1", "ml2", "ml3", "mm1", "mm2", "mm3", "mm4", "mr1", "mr2", "mr3",
};

constexpr std::array<FeaturePointId, kPointCount> make_all_points() {
    std::array<FeaturePointId, kPointCount> out{};
    for (std::size_t i = 0; i < kPointCount; ++i) out[i] = point_at(i);
    return out;
}

constexpr auto kAllPoints = make_all_points();

void require_distinct_corners(const FaceModel& face) {
    const Point2 l = face[FeaturePointId::el1];
    const Point2 r = face[FeaturePointId::er1];
    const double d = std::hypot(r.x - l.x, r.y - l.y);
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw DegenerateGeometryError("inner eye corners el1 and er1 coincide");
    }
}

template <typename F>
FaceModel map_points(const FaceModel& face, F&& f) {
    std::array<Point2, kPointCount> out;
    for (std::size_t i = 0; i < kPointCount; ++i) out[i] = f(face.points()[i]);
    return FaceModel(out, face.frame_tag());
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view point_name(FeaturePointId id) noexcept { return kNames[index_of(id)]; }

std::optional<FeaturePointId> parse_point_id(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kPointCount; ++i) {
        if (kNames[i] == name) return point_at(i);
    }
    return std::nullopt;
}

PointRole point_role(FeaturePointId id) noexcept {
    using enum FeaturePointId;
    switch (id) {
        case er1:
        case el1:
            return PointRole::stable;
        case er4:
        case el4:
        case mr2:
        case ml2:
            return PointRole::passive;
        default:
            return PointRole::active;
    }
}

Axis point_axis(FeaturePointId id) noexcept {
    using enum FeaturePointId;
    switch (id) {
        case mr1:
        case ml1:
            return Axis::x;
        default:
            return Axis::y;
    }
}

int point_side(FeaturePointId id) noexcept {
    const auto name = point_name(id);
    if (name[1] == 'r') return 1;
    if (name[1] == 'l') return -1;
    return 0;
}

const std::array<FeaturePointId, kPointCount>& all_points() noexcept { return kAllPoints; }

std::vector<FeaturePointId> PointSet::to_vector() const {
    std::vector<FeaturePointId> out;
    out.reserve(size());
    for (auto id : kAllPoints) {
        if (contains(id)) out.push_back(id);
    }
    return out;
}

Displacement Displacement::operator-() const {
    Displacement out;
    for (std::size_t i = 0; i < kPointCount; ++i) out.delta[i] = {-delta[i].x, -delta[i].y};
    return out;
}

std::string_view to_string(MuscleChange c) noexcept {
    switch (c) {
        case MuscleChange::elongation: return "elongation";
        case MuscleChange::contraction: return "contraction";
        case MuscleChange::neutral: return "neutral";
    }
    return "neutral";
}

FaceModel translate_points(const FaceModel& face) {
    require_distinct_corners(face);
    const Point2 l = face[FeaturePointId::el1];
    const Point2 r = face[FeaturePointId::er1];
    const Point2 mid{(l.x + r.x) / 2.0, (l.y + r.y) / 2.0};
    return map_points(face, [&](Point2 p) { return p - mid; });
}

FaceModel rotate_points(const FaceModel& face) {
    require_distinct_corners(face);
    const Point2 l = face[FeaturePointId::el1];
    const Point2 r = face[FeaturePointId::er1];
    // Rotating by -theta maps the el1->er1 direction onto +x, so er1 ends up
    // with positive x even for upside-down input.
    const double theta = std::atan2(r.y - l.y, r.x - l.x);
    const double c = std::cos(-theta);
    const double s = std::sin(-theta);
    FaceModel out = map_points(face, [&](Point2 p) { return Point2{c * p.x - s * p.y, s * p.x + c * p.y}; });
    // Pin the corners exactly on the axis; trig round-off leaves ~1e-17 in y.
    out[FeaturePointId::el1].y = 0.0;
    out[FeaturePointId::er1].y = 0.0;
    return out;
}

FaceModel scale_points(const FaceModel& face) {
    const double xr = face[FeaturePointId::er1].x;
    const double d = 2.0 * xr;
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw DegenerateGeometryError("inter-ocular distance must be positive after rotation");
    }
    return map_points(face, [&](Point2 p) { return Point2{p.x / d, p.y / d}; });
}

FaceModel normalize_face(const FaceModel& face) {
    return scale_points(rotate_points(translate_points(face)));
}

SimilarityFrame SimilarityFrame::from_face(const FaceModel& face) {
    require_distinct_corners(face);
    const Point2 l = face[FeaturePointId::el1];
    const Point2 r = face[FeaturePointId::er1];
    SimilarityFrame f;
    f.origin_ = {(l.x + r.x) / 2.0, (l.y + r.y) / 2.0};
    // Rotation by -atan2(dy, dx), written without trigonometry.
    const double len = std::hypot(r.x - l.x, r.y - l.y);
    f.cos_ = (r.x - l.x) / len;
    f.sin_ = -(r.y - l.y) / len;
    f.inv_scale_ = 1.0 / len;
    return f;
}

Point2 SimilarityFrame::apply(Point2 p) const {
    const Point2 t = p - origin_;
    return Point2{(cos_ * t.x - sin_ * t.y) * inv_scale_, (sin_ * t.x + cos_ * t.y) * inv_scale_};
}

Displacement displacement(const FaceModel& expressive, const FaceModel& neutral) {
    Displacement out;
    for (std::size_t i = 0; i < kPointCount; ++i) {
        out.delta[i] = expressive.points()[i] - neutral.points()[i];
    }
    return out;
}

std::vector<double> coordinate_series(const FaceModel& face, Axis axis) {
    std::vector<double> out;
    out.reserve(kPointCount);
    for (const auto& p : face.points()) out.push_back(axis == Axis::x ? p.x : p.y);
    return out;
}

DiffResult cumulative_diff(std::span<const double> expressive, std::span<const double> neutral) {
    if (expressive.size() != neutral.size()) {
        throw InvalidInputError("cumulative_diff: series lengths differ");
    }
    if (expressive.size() < 2) {
        throw InvalidInputError("cumulative_diff: need at least two values per series");
    }
    double e = 0.0;
    double n = 0.0;
    for (std::size_t i = 0; i + 1 < expressive.size(); ++i) {
        e += expressive[i + 1] - expressive[i];
        n += neutral[i + 1] - neutral[i];
    }
    DiffResult r;
    r.value = e - n;
    r.interpretation = r.value > 0.0   ? MuscleChange::elongation
                       : r.value < 0.0 ? MuscleChange::contraction
                                       : MuscleChange::neutral;
    return r;
}

std::string format_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

FaceModel parse_landmarks(std::string_view text) {
    std::array<Point2, kPointCount> pts{};
    std::array<bool, kPointCount> seen{};
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const auto line = trim(text.substr(pos, eol - pos));
        ++line_no;
        pos = eol + 1;
        if (line.empty() || line.front() == '#') continue;

        std::istringstream in{std::string(line)};
        std::string name;
        std::string xs;
        std::string ys;
        std::string extra;
        if (!(in >> name >> xs >> ys) || (in >> extra)) {
            throw ParseError("landmarks: expected '<id> <x> <y>'", line_no);
        }
        const auto id = parse_point_id(name);
        if (!id) throw ParseError("landmarks: unknown point id '" + name + "'", line_no);
        const auto i = index_of(*id);
        if (seen[i]) throw ParseError("landmarks: duplicate point id '" + name + "'", line_no);
        auto parse_num = [&](const std::string& s) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) {
                throw ParseError("landmarks: bad coordinate '" + s + "'", line_no);
            }
            return v;
        };
        pts[i] = {parse_num(xs), parse_num(ys)};
        seen[i] = true;
    }
    for (std::size_t i = 0; i < kPointCount; ++i) {
        if (!seen[i]) {
            throw ParseError("landmarks: missing point '" + std::string(kNames[i]) + "'", line_no);
        }
    }
    return FaceModel(pts);
}

std::string format_landmarks(const FaceModel& face) {
    std::string out;
    for (auto id : kAllPoints) {
        const auto& p = face[id];
        out += point_name(id);
        out += ' ';
        out += format_real(p.x);
        out += ' ';
        out += format_real(p.y);
        out += '\n';
    }
    return out;
}

FaceModel read_landmarks(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open landmark file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_landmarks(ss.str());
}

void write_landmarks(const std::filesystem::path& path, const FaceModel& face) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot write landmark file " + path.string());
    out << format_landmarks(face);
}

}  // namespace faup
