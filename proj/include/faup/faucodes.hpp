#pragma once

// Action-unit vocabulary and the static emotion/AU tables: the AU sets of the
// six basic emotions, their unique and absence subsets, the transitions out of
// surprise, and the AU -> feature-point mapping.

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faup/facegeo.hpp"

namespace faup {

// FACS ids modeled here; anything else is rejected.
inline constexpr std::array<int, 16> kModeledAUs = {1, 2, 4, 5, 6, 7, 9, 10, 12, 14, 15, 16, 17, 20, 23, 26};

constexpr bool is_modeled_au(int id) noexcept {
    for (int a : kModeledAUs) {
        if (a == id) return true;
    }
    return false;
}

class ActionUnit {
public:
    explicit ActionUnit(int id);
    constexpr int id() const noexcept { return id_; }
    constexpr auto operator<=>(const ActionUnit&) const = default;

private:
    int id_;
};

// Set of modeled AUs as a bit mask indexed by FACS id.
class AUSet {
public:
    constexpr AUSet() = default;
    AUSet(std::initializer_list<int> ids);

    static AUSet all_modeled();

    void insert(int id);
    constexpr bool contains(int id) const noexcept {
        return id >= 0 && id < 32 && (bits_ & (std::uint32_t{1} << id)) != 0;
    }
    constexpr std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool empty() const noexcept { return bits_ == 0; }

    constexpr AUSet operator|(AUSet o) const noexcept { return from_bits(bits_ | o.bits_); }
    constexpr AUSet operator&(AUSet o) const noexcept { return from_bits(bits_ & o.bits_); }
    // Set difference.
    constexpr AUSet operator-(AUSet o) const noexcept { return from_bits(bits_ & ~o.bits_); }
    constexpr AUSet& operator|=(AUSet o) noexcept { bits_ |= o.bits_; return *this; }
    constexpr bool subset_of(AUSet o) const noexcept { return (bits_ & ~o.bits_) == 0; }
    constexpr bool intersects(AUSet o) const noexcept { return (bits_ & o.bits_) != 0; }
    constexpr bool operator==(const AUSet&) const = default;
    constexpr std::uint32_t bits() const noexcept { return bits_; }

    std::vector<int> ids() const;
    std::string to_string() const;  // "{1, 2, 5}"

private:
    static constexpr AUSet from_bits(std::uint32_t b) noexcept {
        AUSet s;
        s.bits_ = b;
        return s;
    }
    std::uint32_t bits_ = 0;
};

enum class Emotion : std::uint8_t { surprise, fear, disgust, anger, happiness, sadness };

inline constexpr std::array<Emotion, 6> kEmotions = {
    Emotion::surprise, Emotion::fear, Emotion::disgust, Emotion::anger, Emotion::happiness, Emotion::sadness,
};

constexpr std::size_t index_of(Emotion e) noexcept { return static_cast<std::size_t>(e); }

std::string_view emotion_name(Emotion e) noexcept;       // "Surprise"
std::string_view emotion_dir_name(Emotion e) noexcept;   // "surprise"
std::string_view not_emotion_label(Emotion e) noexcept;  // "NSur"
std::optional<Emotion> parse_emotion(std::string_view s) noexcept;  // case-insensitive

class EmotionSet {
public:
    constexpr EmotionSet() = default;
    constexpr EmotionSet(std::initializer_list<Emotion> es) {
        for (auto e : es) insert(e);
    }
    constexpr void insert(Emotion e) noexcept { bits_ |= bit(e); }
    constexpr bool contains(Emotion e) const noexcept { return (bits_ & bit(e)) != 0; }
    constexpr std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr std::uint8_t bits() const noexcept { return bits_; }
    constexpr bool operator==(const EmotionSet&) const = default;
    static constexpr EmotionSet from_bits(std::uint8_t b) noexcept {
        EmotionSet s;
        s.bits_ = b;
        return s;
    }

    std::vector<Emotion> to_vector() const;
    std::optional<Emotion> single() const;
    std::string to_string() const;

private:
    static constexpr std::uint8_t bit(Emotion e) noexcept { return static_cast<std::uint8_t>(1u << index_of(e)); }
    std::uint8_t bits_ = 0;
};

struct AUPattern {
    enum class Kind { single, composite };

    Kind kind = Kind::single;
    AUSet units;

    static AUPattern single(int au);
    static AUPattern composite(std::initializer_list<int> aus);
    static AUPattern all_of(AUSet aus);  // single or composite depending on size

    // A composite matches only when all of its units are present.
    bool matches(AUSet present) const noexcept { return units.subset_of(present); }
    std::string to_string() const;  // "16" or "(4, 5)"
    bool operator==(const AUPattern&) const = default;
};

bool any_matches(std::span<const AUPattern> patterns, AUSet present) noexcept;
AUSet units_of(std::span<const AUPattern> patterns);

struct TransitionRule {
    Emotion from = Emotion::surprise;
    Emotion to = Emotion::fear;
    std::vector<AUPattern> present;  // any-of across patterns
    AUSet absent;
    bool derived = false;

    bool satisfied_by(AUSet present_aus) const noexcept {
        return any_matches(present, present_aus) && !absent.intersects(present_aus);
    }
};

enum class AUAction { up, down, pull, dimple, tight, wrinkle, stretch };
enum class PointAction { up, down, stretch, tight };

std::string_view to_string(AUAction a) noexcept;
std::string_view to_string(PointAction a) noexcept;

struct AUFeatureBinding {
    int au = 0;
    AUAction au_action = AUAction::up;
    PointSet points;
    PointAction point_action = PointAction::up;
};

// Table lookups.
AUSet emotion_aus(Emotion e);
const std::vector<AUPattern>& unique_patterns(Emotion e);
AUSet absence_aus(Emotion e);

// Only surprise has a published transition table; other sources throw
// UnsupportedTransitionError.
TransitionRule transition_rule(Emotion from, Emotion to);
TransitionRule derive_transition_rule(Emotion from, Emotion to);

// nullopt marks an AU with no geometric binding (10 and 15).
std::optional<AUFeatureBinding> au_binding(const ActionUnit& au);
bool is_observable(int au);
AUSet observable_aus();

struct MonitoredPoints {
    PointSet points;
    // Set when every AU in the patterns lacks a geometric binding.
    bool unobservable_warning = false;
};

MonitoredPoints features_to_monitor(std::span<const AUPattern> patterns);
PointSet features_of(AUSet aus);

// Net unit displacement of every feature point when the given AUs are active,
// summed additively over AUs that share points. Non-observable AUs contribute
// nothing.
Displacement au_kinematics(AUSet aus);

// Plain-text dump of all tables, one block per table.
std::string format_rule_tables();

}  // namespace faup
