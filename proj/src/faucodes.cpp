#include "faup/faucodes.hpp"

#include <algorithm>
#include <cctype>

#include "faup/error.hpp"

namespace faup {

namespace {

using enum FeaturePointId;

struct EmotionTables {
    AUSet full;
    std::vector<AUPattern> unique;
    AUSet absent;
};

const std::array<EmotionTables, 6>& tables() {
    static const std::array<EmotionTables, 6> t = {{
        {{1, 2, 5, 15, 16, 20, 26}, {AUPattern::single(16)}, {4, 6, 23}},
        {{1, 2, 4, 5, 15, 20, 26}, {AUPattern::composite({4, 5})}, {6, 9, 16, 23}},
        {{2, 4, 9, 15, 17}, {AUPattern::single(17)}, {1, 7}},
        {{2, 4, 7, 9, 10, 20, 26}, {AUPattern::single(10)}, {1, 5, 23}},
        {{1, 6, 12, 14}, {AUPattern::single(6), AUPattern::single(12), AUPattern::single(14)},
         {2, 4, 5, 9, 10, 16, 17, 20}},
        {{1, 4, 15, 23}, {AUPattern::single(23)}, {2, 5, 6, 9, 10, 16, 20}},
    }};
    return t;
}

// AU26 is printed against "mm_3, ml_3" in the source table; it is bound to the
// mm3/mm4 midline pair like AUs 16 and 17.
const std::vector<AUFeatureBinding>& bindings() {
    static const std::vector<AUFeatureBinding> b = {
        {1, AUAction::up, {br1, bl1}, PointAction::up},
        {2, AUAction::up, {br3, bl3}, PointAction::up},
        {4, AUAction::down, {br1, bl1}, PointAction::down},
        {5, AUAction::up, {mm1, mm2}, PointAction::up},
        {6, AUAction::up, {mr1, ml1}, PointAction::stretch},
        {7, AUAction::tight, {mr1, ml1}, PointAction::tight},
        {9, AUAction::wrinkle, {br1, bl1}, PointAction::down},
        {12, AUAction::pull, {mr1, ml1}, PointAction::stretch},
        {14, AUAction::dimple, {mr1, ml1}, PointAction::stretch},
        {16, AUAction::down, {mm3, mm4}, PointAction::down},
        {17, AUAction::up, {mm3, mm4}, PointAction::up},
        {20, AUAction::stretch, {mr1, ml1}, PointAction::stretch},
        {23, AUAction::tight, {mr1, ml1}, PointAction::tight},
        {26, AUAction::down, {mm3, mm4}, PointAction::down},
    };
    return b;
}

const AUFeatureBinding* find_binding(int au) {
    for (const auto& b : bindings()) {
        if (b.au == au) return &b;
    }
    return nullptr;
}

std::string join_patterns(std::span<const AUPattern> ps, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) out += sep;
        out += ps[i].to_string();
    }
    return out;
}

}  // namespace

ActionUnit::ActionUnit(int id) : id_(id) {
    if (!is_modeled_au(id)) throw InvalidInputError("unknown action unit " + std::to_string(id));
}

AUSet::AUSet(std::initializer_list<int> ids) {
    for (int id : ids) insert(id);
}

AUSet AUSet::all_modeled() {
    AUSet s;
    for (int a : kModeledAUs) s.insert(a);
    return s;
}

void AUSet::insert(int id) {
    if (!is_modeled_au(id)) throw InvalidInputError("unknown action unit " + std::to_string(id));
    bits_ |= std::uint32_t{1} << id;
}

std::vector<int> AUSet::ids() const {
    std::vector<int> out;
    for (int a : kModeledAUs) {
        if (contains(a)) out.push_back(a);
    }
    return out;
}

std::string AUSet::to_string() const {
    std::string out = "{";
    bool first = true;
    for (int a : ids()) {
        if (!first) out += ", ";
        out += std::to_string(a);
        first = false;
    }
    return out + "}";
}

std::string_view emotion_name(Emotion e) noexcept {
    static constexpr std::array<std::string_view, 6> n = {"Surprise", "Fear", "Disgust", "Anger", "Happiness", "Sadness"};
    return n[index_of(e)];
}

std::string_view emotion_dir_name(Emotion e) noexcept {
    static constexpr std::array<std::string_view, 6> n = {"surprise", "fear", "disgust", "anger", "happiness", "sadness"};
    return n[index_of(e)];
}

std::string_view not_emotion_label(Emotion e) noexcept {
    static constexpr std::array<std::string_view, 6> n = {"NSur", "NF", "ND", "NA", "NH", "NSad"};
    return n[index_of(e)];
}

std::optional<Emotion> parse_emotion(std::string_view s) noexcept {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (auto e : kEmotions) {
        if (emotion_dir_name(e) == lower) return e;
    }
    return std::nullopt;
}

std::vector<Emotion> EmotionSet::to_vector() const {
    std::vector<Emotion> out;
    for (auto e : kEmotions) {
        if (contains(e)) out.push_back(e);
    }
    return out;
}

std::optional<Emotion> EmotionSet::single() const {
    if (size() != 1) return std::nullopt;
    return to_vector().front();
}

std::string EmotionSet::to_string() const {
    std::string out = "{";
    bool first = true;
    for (auto e : to_vector()) {
        if (!first) out += ", ";
        out += emotion_name(e);
        first = false;
    }
    return out + "}";
}

AUPattern AUPattern::single(int au) { return {Kind::single, AUSet{au}}; }

AUPattern AUPattern::composite(std::initializer_list<int> aus) {
    AUPattern p{Kind::composite, AUSet(aus)};
    if (p.units.size() < 2) throw InvalidInputError("composite AU pattern needs at least two units");
    return p;
}

AUPattern AUPattern::all_of(AUSet aus) {
    if (aus.empty()) throw InvalidInputError("AU pattern must not be empty");
    return {aus.size() == 1 ? Kind::single : Kind::composite, aus};
}

std::string AUPattern::to_string() const {
    if (kind == Kind::single) return std::to_string(units.ids().front());
    auto s = units.to_string();
    s.front() = '(';
    s.back() = ')';
    return s;
}

bool any_matches(std::span<const AUPattern> patterns, AUSet present) noexcept {
    return std::any_of(patterns.begin(), patterns.end(), [&](const AUPattern& p) { return p.matches(present); });
}

AUSet units_of(std::span<const AUPattern> patterns) {
    AUSet out;
    for (const auto& p : patterns) out |= p.units;
    return out;
}

std::string_view to_string(AUAction a) noexcept {
    switch (a) {
        case AUAction::up: return "up";
        case AUAction::down: return "down";
        case AUAction::pull: return "pull";
        case AUAction::dimple: return "dimple";
        case AUAction::tight: return "tight";
        case AUAction::wrinkle: return "wrinkle";
        case AUAction::stretch: return "stretch";
    }
    return "?";
}

std::string_view to_string(PointAction a) noexcept {
    switch (a) {
        case PointAction::up: return "up";
        case PointAction::down: return "down";
        case PointAction::stretch: return "stretch";
        case PointAction::tight: return "tight";
    }
    return "?";
}

AUSet emotion_aus(Emotion e) { return tables()[index_of(e)].full; }
const std::vector<AUPattern>& unique_patterns(Emotion e) { return tables()[index_of(e)].unique; }
AUSet absence_aus(Emotion e) { return tables()[index_of(e)].absent; }

TransitionRule transition_rule(Emotion from, Emotion to) {
    if (from != Emotion::surprise) {
        throw UnsupportedTransitionError("no published transition table from " + std::string(emotion_name(from)) +
                                         "; use derive_transition_rule for a heuristic rule");
    }
    TransitionRule r;
    r.from = from;
    r.to = to;
    switch (to) {
        case Emotion::surprise:
            throw UnsupportedTransitionError("no transition rule from a state to itself");
        case Emotion::fear:
            r.present = {AUPattern::single(4)};
            r.absent = {7, 9, 10, 17, 23};
            break;
        case Emotion::disgust:
            // The source row also lists 9 as absent; presence wins.
            r.present = {AUPattern::composite({4, 9, 17})};
            r.absent = {10, 23};
            break;
        case Emotion::anger:
            r.present = {AUPattern::composite({4, 7, 9, 10})};
            r.absent = {17, 23};
            break;
        case Emotion::happiness:
            r.present = {AUPattern::single(6), AUPattern::single(12), AUPattern::single(14)};
            r.absent = {4};
            break;
        case Emotion::sadness:
            r.present = {AUPattern::composite({4, 23})};
            r.absent = {7, 9, 10, 17};
            break;
    }
    return r;
}

TransitionRule derive_transition_rule(Emotion from, Emotion to) {
    if (from == to) throw UnsupportedTransitionError("no transition rule from a state to itself");
    TransitionRule r;
    r.from = from;
    r.to = to;
    r.derived = true;
    const AUSet gained = emotion_aus(to) - emotion_aus(from);
    if (!gained.empty()) r.present.push_back(AUPattern::all_of(gained));
    for (const auto& p : unique_patterns(to)) {
        if (std::find(r.present.begin(), r.present.end(), p) == r.present.end()) r.present.push_back(p);
    }
    AUSet others;
    for (auto e : kEmotions) {
        if (e != to) others |= units_of(unique_patterns(e));
    }
    r.absent = others - emotion_aus(to);
    return r;
}

std::optional<AUFeatureBinding> au_binding(const ActionUnit& au) {
    if (const auto* b = find_binding(au.id())) return *b;
    return std::nullopt;
}

bool is_observable(int au) { return find_binding(au) != nullptr; }

AUSet observable_aus() {
    AUSet s;
    for (const auto& b : bindings()) s.insert(b.au);
    return s;
}

MonitoredPoints features_to_monitor(std::span<const AUPattern> patterns) {
    MonitoredPoints out;
    out.points = features_of(units_of(patterns));
    out.unobservable_warning = out.points.empty();
    return out;
}

PointSet features_of(AUSet aus) {
    PointSet pts;
    for (const auto& b : bindings()) {
        if (aus.contains(b.au)) pts |= b.points;
    }
    return pts;
}

Displacement au_kinematics(AUSet aus) {
    Displacement d;
    for (const auto& b : bindings()) {
        if (!aus.contains(b.au)) continue;
        for (auto id : b.points.to_vector()) {
            Point2 unit;
            switch (b.point_action) {
                case PointAction::up: unit = {0.0, 1.0}; break;
                case PointAction::down: unit = {0.0, -1.0}; break;
                case PointAction::stretch: unit = {static_cast<double>(point_side(id)), 0.0}; break;
                case PointAction::tight: unit = {-static_cast<double>(point_side(id)), 0.0}; break;
            }
            d.delta[index_of(id)] = d.delta[index_of(id)] + unit;
        }
    }
    return d;
}

std::string format_rule_tables() {
    std::string out;
    out += "# AUs needed for basic emotions\n";
    for (auto e : kEmotions) {
        out += std::string(emotion_name(e)) + "\t" + emotion_aus(e).to_string() + "\n";
    }
    out += "\n# Unique AU subsets (any pattern suffices; (a, b) = all of a and b)\n";
    for (auto e : kEmotions) {
        out += std::string(emotion_name(e)) + "\t{" + join_patterns(unique_patterns(e), ", ") + "}\n";
    }
    out += "\n# AUs absent in basic emotions\n";
    for (auto e : kEmotions) {
        out += std::string(not_emotion_label(e)) + "\t" + absence_aus(e).to_string() + "\n";
    }
    out += "\n# Transitions from Surprise (P = present, A = absent; '/' = any of)\n";
    for (auto to : kEmotions) {
        if (to == Emotion::surprise) continue;
        const auto r = transition_rule(Emotion::surprise, to);
        std::string p;
        if (r.present.size() == 1) {
            p = r.present.front().units.to_string();
        } else {
            p = "{" + join_patterns(r.present, " / ") + "}";
        }
        out += "Surprise -> " + std::string(emotion_name(to)) + "\tP: " + p + "; A: " + r.absent.to_string() + "\n";
    }
    out += "\n# AU to feature-point mapping (AU10 and AU15 have no geometric binding)\n";
    for (const auto& b : bindings()) {
        std::string pts;
        for (auto id : b.points.to_vector()) {
            if (!pts.empty()) pts += ", ";
            pts += point_name(id);
        }
        out += "AU" + std::to_string(b.au) + "\t" + std::string(to_string(b.au_action)) + "\t" + pts + "\t" +
               std::string(to_string(b.point_action)) + "\n";
    }
    out += "AU10\tnon-observable\nAU15\tnon-observable\n";
    return out;
}

}  // namespace faup
