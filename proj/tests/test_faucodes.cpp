#include <doctest.h>

#include <algorithm>
#include <map>

#include "faup/error.hpp"
#include "faup/faucodes.hpp"

using namespace faup;
using E = Emotion;
using P = FeaturePointId;

namespace {

PointSet points(std::initializer_list<P> ids) {
    PointSet s;
    for (auto id : ids) s.insert(id);
    return s;
}

}  // namespace

TEST_CASE("action units outside the modeled set are rejected") {
    CHECK(ActionUnit(26).id() == 26);
    CHECK_THROWS_AS(ActionUnit(3), InvalidInputError);
    CHECK_THROWS_AS(AUSet({1, 66}), InvalidInputError);
}

TEST_CASE("AUs needed for each basic emotion") {
    const std::map<E, AUSet> golden = {
        {E::surprise, {1, 2, 5, 15, 16, 20, 26}}, {E::fear, {1, 2, 4, 5, 15, 20, 26}},
        {E::disgust, {2, 4, 9, 15, 17}},          {E::anger, {2, 4, 7, 9, 10, 20, 26}},
        {E::happiness, {1, 6, 12, 14}},           {E::sadness, {1, 4, 15, 23}},
    };
    for (const auto& [e, set] : golden) CHECK(emotion_aus(e) == set);
    for (auto a : kEmotions)
        for (auto b : kEmotions)
            if (a != b) CHECK(emotion_aus(a) != emotion_aus(b));
}

TEST_CASE("unique AU subsets") {
    CHECK(unique_patterns(E::surprise) == std::vector{AUPattern::single(16)});
    CHECK(unique_patterns(E::fear) == std::vector{AUPattern::composite({4, 5})});
    CHECK(unique_patterns(E::disgust) == std::vector{AUPattern::single(17)});
    CHECK(unique_patterns(E::anger) == std::vector{AUPattern::single(10)});
    CHECK(unique_patterns(E::happiness) ==
          std::vector{AUPattern::single(6), AUPattern::single(12), AUPattern::single(14)});
    CHECK(unique_patterns(E::sadness) == std::vector{AUPattern::single(23)});
    CHECK(AUPattern::composite({4, 5}).to_string() == "(4, 5)");
    CHECK(AUPattern::composite({4, 5}).matches(AUSet{4, 5, 9}));
    CHECK_FALSE(AUPattern::composite({4, 5}).matches(AUSet{4}));
}

TEST_CASE("unique single AUs occur in no other emotion") {
    for (auto e : kEmotions) {
        for (const auto& p : unique_patterns(e)) {
            CHECK(p.units.subset_of(emotion_aus(e)));
            if (p.kind != AUPattern::Kind::single) continue;
            for (auto o : kEmotions)
                if (o != e) CHECK_FALSE(p.units.subset_of(emotion_aus(o)));
        }
    }
}

TEST_CASE("absence subsets") {
    CHECK(absence_aus(E::surprise) == AUSet{4, 6, 23});
    CHECK(absence_aus(E::fear) == AUSet{6, 9, 16, 23});
    CHECK(absence_aus(E::disgust) == AUSet{1, 7});
    CHECK(absence_aus(E::anger) == AUSet{1, 5, 23});
    CHECK(absence_aus(E::happiness) == AUSet{2, 4, 5, 9, 10, 16, 17, 20});
    CHECK(absence_aus(E::sadness) == AUSet{2, 5, 6, 9, 10, 16, 20});
    for (auto e : kEmotions) CHECK_FALSE(absence_aus(e).intersects(emotion_aus(e)));
}

TEST_CASE("transitions out of surprise") {
    auto r = transition_rule(E::surprise, E::fear);
    CHECK(r.present == std::vector{AUPattern::single(4)});
    CHECK(r.absent == AUSet{7, 9, 10, 17, 23});
    CHECK_FALSE(r.derived);

    r = transition_rule(E::surprise, E::disgust);
    CHECK(units_of(r.present) == AUSet{4, 9, 17});
    CHECK(r.absent == AUSet{10, 23});

    r = transition_rule(E::surprise, E::anger);
    CHECK(units_of(r.present) == AUSet{4, 7, 9, 10});
    CHECK(r.absent == AUSet{17, 23});

    r = transition_rule(E::surprise, E::happiness);
    CHECK(r.present == std::vector{AUPattern::single(6), AUPattern::single(12), AUPattern::single(14)});
    CHECK(r.absent == AUSet{4});
    CHECK(r.satisfied_by(AUSet{12}));
    CHECK_FALSE(r.satisfied_by(AUSet{12, 4}));

    r = transition_rule(E::surprise, E::sadness);
    CHECK(units_of(r.present) == AUSet{4, 23});
    CHECK(r.absent == AUSet{7, 9, 10, 17});

    CHECK_THROWS_AS(transition_rule(E::surprise, E::surprise), UnsupportedTransitionError);
    CHECK_THROWS_AS(transition_rule(E::fear, E::surprise), UnsupportedTransitionError);
}

TEST_CASE("derived transition rules") {
    const auto sf = derive_transition_rule(E::surprise, E::fear);
    CHECK(sf.derived);
    CHECK(AUSet{4}.subset_of(units_of(sf.present)));
    CHECK(sf.absent != transition_rule(E::surprise, E::fear).absent);

    const auto fs = derive_transition_rule(E::fear, E::surprise);
    CHECK(AUSet{16}.subset_of(units_of(fs.present)));
    for (auto a : kEmotions)
        for (auto b : kEmotions) {
            if (a == b) continue;
            const auto r = derive_transition_rule(a, b);
            CHECK(r.satisfied_by(emotion_aus(b)));
        }
}

TEST_CASE("AU to feature-point mapping") {
    const std::map<int, std::pair<PointSet, PointAction>> golden = {
        {1, {points({P::br1, P::bl1}), PointAction::up}},      {2, {points({P::br3, P::bl3}), PointAction::up}},
        {4, {points({P::br1, P::bl1}), PointAction::down}},    {5, {points({P::mm1, P::mm2}), PointAction::up}},
        {6, {points({P::mr1, P::ml1}), PointAction::stretch}}, {7, {points({P::mr1, P::ml1}), PointAction::tight}},
        {9, {points({P::br1, P::bl1}), PointAction::down}},    {12, {points({P::mr1, P::ml1}), PointAction::stretch}},
        {14, {points({P::mr1, P::ml1}), PointAction::stretch}}, {16, {points({P::mm3, P::mm4}), PointAction::down}},
        {17, {points({P::mm3, P::mm4}), PointAction::up}},     {20, {points({P::mr1, P::ml1}), PointAction::stretch}},
        {23, {points({P::mr1, P::ml1}), PointAction::tight}},  {26, {points({P::mm3, P::mm4}), PointAction::down}},
    };
    const std::map<int, AUAction> au_actions = {
        {1, AUAction::up},      {2, AUAction::up},      {4, AUAction::down},    {5, AUAction::up},
        {6, AUAction::up},      {7, AUAction::tight},   {9, AUAction::wrinkle}, {12, AUAction::pull},
        {14, AUAction::dimple}, {16, AUAction::down},   {17, AUAction::up},     {20, AUAction::stretch},
        {23, AUAction::tight},  {26, AUAction::down},
    };
    for (int au : kModeledAUs) {
        const auto b = au_binding(ActionUnit(au));
        if (au == 10 || au == 15) {
            CHECK_FALSE(b.has_value());
            CHECK_FALSE(is_observable(au));
            continue;
        }
        REQUIRE(b.has_value());
        CHECK(b->points == golden.at(au).first);
        CHECK(b->point_action == golden.at(au).second);
        CHECK(b->au_action == au_actions.at(au));
    }
}

TEST_CASE("features_to_monitor") {
    auto m = features_to_monitor(std::vector{AUPattern::single(16)});
    CHECK(m.points == points({P::mm3, P::mm4}));
    CHECK_FALSE(m.unobservable_warning);
    m = features_to_monitor(std::vector{AUPattern::composite({4, 5})});
    CHECK(m.points == points({P::br1, P::bl1, P::mm1, P::mm2}));
    m = features_to_monitor(std::vector{AUPattern::single(10)});
    CHECK(m.points.empty());
    CHECK(m.unobservable_warning);
    for (auto e : kEmotions) {
        if (e == E::anger) continue;
        CHECK(features_to_monitor(unique_patterns(e)).points.size() <= 4);
    }
}

TEST_CASE("kinematics compose additively") {
    const auto six = au_kinematics({6});
    const auto both = au_kinematics({6, 12});
    CHECK(both[P::mr1].x == 2 * six[P::mr1].x);
    CHECK(six[P::mr1].x == 1.0);
    CHECK(six[P::ml1].x == -1.0);
    CHECK(au_kinematics({10, 15})[P::mr1] == Point2{0, 0});
    // Up and down on the same points cancel.
    CHECK(au_kinematics({1, 4})[P::br1] == Point2{0, 0});
}

TEST_CASE("rule table dump lists every table") {
    const auto text = format_rule_tables();
    CHECK(text.find("Surprise\t{1, 2, 5, 15, 16, 20, 26}") != std::string::npos);
    CHECK(text.find("(4, 5)") != std::string::npos);
    CHECK(text.find("NSur") != std::string::npos);
}
