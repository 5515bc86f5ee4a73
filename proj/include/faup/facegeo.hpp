#pragma once

// 24-point geometric face model, similarity normalization on the inner eye
// corners, and the cumulative elongation/contraction measure.

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace faup {

// Canonical point order; every per-point vector in the toolkit follows it.
enum class FeaturePointId : std::uint8_t {
    bl1, bl2, bl3,
    br1, br2, br3,
    el1, el2, el3, el4,
    er1, er2, er3, er4,
    ml1, ml2, ml3,
    mm1, mm2, mm3, mm4,
    mr1, mr2, mr3,
};

inline constexpr std::size_t kPointCount = 24;

enum class PointRole { stable, passive, active };

// Displacement axis a point is observed along: brows, eye mid points and the
// mouth midline move vertically; the lip corners stretch or tighten sideways.
enum class Axis { x, y };

constexpr std::size_t index_of(FeaturePointId id) noexcept { return static_cast<std::size_t>(id); }
constexpr FeaturePointId point_at(std::size_t i) noexcept { return static_cast<FeaturePointId>(i); }

std::string_view point_name(FeaturePointId id) noexcept;
std::optional<FeaturePointId> parse_point_id(std::string_view name) noexcept;
PointRole point_role(FeaturePointId id) noexcept;
Axis point_axis(FeaturePointId id) noexcept;
// +1 for points on the right half of the face (er*, br*, mr*), -1 for the
// left half, 0 on the midline (mm*).
int point_side(FeaturePointId id) noexcept;

const std::array<FeaturePointId, kPointCount>& all_points() noexcept;

// Small bit set over the 24 feature points, iterated in canonical order.
class PointSet {
public:
    constexpr PointSet() = default;
    constexpr PointSet(std::initializer_list<FeaturePointId> ids) {
        for (auto id : ids) insert(id);
    }

    static constexpr PointSet all() {
        PointSet s;
        s.bits_ = (std::uint32_t{1} << kPointCount) - 1;
        return s;
    }

    constexpr void insert(FeaturePointId id) { bits_ |= bit(id); }
    constexpr bool contains(FeaturePointId id) const { return (bits_ & bit(id)) != 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::uint32_t bits() const { return bits_; }

    constexpr PointSet operator|(PointSet o) const { return from_bits(bits_ | o.bits_); }
    constexpr PointSet operator&(PointSet o) const { return from_bits(bits_ & o.bits_); }
    constexpr PointSet& operator|=(PointSet o) { bits_ |= o.bits_; return *this; }
    constexpr bool operator==(const PointSet&) const = default;

    std::vector<FeaturePointId> to_vector() const;

private:
    static constexpr std::uint32_t bit(FeaturePointId id) { return std::uint32_t{1} << index_of(id); }
    static constexpr PointSet from_bits(std::uint32_t b) {
        PointSet s;
        s.bits_ = b;
        return s;
    }
    std::uint32_t bits_ = 0;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
    constexpr Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
    constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Point2&) const = default;
};

class FaceModel {
public:
    FaceModel() = default;
    explicit FaceModel(const std::array<Point2, kPointCount>& points,
                       std::optional<int> frame_tag = std::nullopt)
        : points_(points), frame_tag_(frame_tag) {}

    const Point2& operator[](FeaturePointId id) const { return points_[index_of(id)]; }
    Point2& operator[](FeaturePointId id) { return points_[index_of(id)]; }

    const std::array<Point2, kPointCount>& points() const { return points_; }
    std::optional<int> frame_tag() const { return frame_tag_; }
    void set_frame_tag(std::optional<int> tag) { frame_tag_ = tag; }

    bool operator==(const FaceModel&) const = default;

private:
    std::array<Point2, kPointCount> points_{};
    std::optional<int> frame_tag_;
};

// Per-point (dx, dy) of an expressive face relative to a neutral one.
struct Displacement {
    std::array<Point2, kPointCount> delta{};

    const Point2& operator[](FeaturePointId id) const { return delta[index_of(id)]; }
    Displacement operator-() const;
};

enum class MuscleChange { elongation, contraction, neutral };

struct DiffResult {
    double value = 0.0;
    MuscleChange interpretation = MuscleChange::neutral;
};

std::string_view to_string(MuscleChange c) noexcept;

FaceModel translate_points(const FaceModel& face);
FaceModel rotate_points(const FaceModel& face);
FaceModel scale_points(const FaceModel& face);
FaceModel normalize_face(const FaceModel& face);

// The same normalization as a reusable map, for callers that only need a
// handful of points (the pruned classifier).
class SimilarityFrame {
public:
    static SimilarityFrame from_face(const FaceModel& face);
    Point2 apply(Point2 p) const;

private:
    Point2 origin_;
    double cos_ = 1.0;
    double sin_ = 0.0;
    double inv_scale_ = 1.0;
};

Displacement displacement(const FaceModel& expressive, const FaceModel& neutral);

// Scalar series of one coordinate across the 24 points in canonical order.
std::vector<double> coordinate_series(const FaceModel& face, Axis axis);

DiffResult cumulative_diff(std::span<const double> expressive, std::span<const double> neutral);

// Landmark text format: one "<id> <x> <y>" line per point, 24 lines, any
// order, '#' comment lines and blank lines ignored.
FaceModel parse_landmarks(std::string_view text);
std::string format_landmarks(const FaceModel& face);
FaceModel read_landmarks(const std::filesystem::path& path);
void write_landmarks(const std::filesystem::path& path, const FaceModel& face);

// Shortest round-trip decimal representation.
std::string format_real(double v);

}  // namespace faup
