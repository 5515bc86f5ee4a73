#pragma once

// AU-set classification, induced decision trees over AU presence, and the
// monitoring planner that prunes which feature points need to be observed.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "faup/faucodes.hpp"

namespace faup {

// AUs seen present or absent; every other AU is unknown.
class AUObservation {
public:
    AUObservation() = default;
    AUObservation(AUSet present, AUSet absent);

    // Present AUs given, every other modeled AU taken as absent.
    static AUObservation closed_world(AUSet present);

    AUSet present() const { return present_; }
    AUSet absent() const { return absent_; }
    AUSet unknown() const { return AUSet::all_modeled() - present_ - absent_; }

private:
    AUSet present_;
    AUSet absent_;
};

struct EmotionDecision {
    enum class Kind { single, ambiguous, indeterminate };

    Kind kind = Kind::indeterminate;
    EmotionSet candidates;

    static EmotionDecision from_matches(EmotionSet matches);
    std::optional<Emotion> emotion() const { return candidates.single(); }
    std::string to_string() const;
};

EmotionDecision classify_observation(const AUObservation& obs);
EmotionSet absent_emotions(const AUObservation& obs);

struct TreeOutcome {
    EmotionSet label;       // empty = indeterminate leaf
    bool undecided = false;  // the path hit an AU the observation does not decide

    bool indeterminate() const { return undecided || label.empty(); }
};

// Binary tree over AU presence. Leaves carry a set of emotion labels (the
// emotions ruled out for the absence tree, the target state for a transition
// tree); an empty set reads as "indeterminate".
class DecisionTree {
public:
    struct Node {
        int au = 0;  // 0 marks a leaf
        int on_absent = -1;
        int on_present = -1;
        EmotionSet label;
    };

    using Labeler = std::function<EmotionSet(AUSet present)>;

    // Greedy information-gain induction over every truth assignment of the
    // attribute set; ties go to the lowest AU id.
    static DecisionTree induce(AUSet attributes, const Labeler& label_of, std::string leaf_prefix = "");

    static DecisionTree leaf(EmotionSet label);

    AUSet attributes() const { return attributes_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t depth() const;

    TreeOutcome evaluate(const AUObservation& obs) const;

    std::string to_text() const;
    std::string to_dot(std::string_view name) const;

private:
    int grow(const std::vector<AUSet>& rows, const std::vector<EmotionSet>& labels, AUSet remaining);

    AUSet attributes_;
    std::vector<Node> nodes_;
    std::string leaf_prefix_;
};

// Attribute set of the absence tree.
AUSet absence_tree_attributes();
// Attribute set of the transition tree out of surprise.
AUSet transition_tree_attributes();

DecisionTree build_absence_tree();
DecisionTree build_transition_tree(Emotion from = Emotion::surprise);
TreeOutcome evaluate_tree(const DecisionTree& tree, const AUObservation& obs);

// The labels the induced trees must reproduce, exposed for verification.
EmotionSet absence_tree_label(AUSet present);
EmotionSet transition_tree_label(AUSet present);

struct MonitoringPlan {
    Emotion hypothesis = Emotion::surprise;
    std::optional<Emotion> prior;
    std::vector<AUPattern> aus_to_check;
    PointSet points;
    // The hypothesis' unique AUs cannot be seen geometrically, so the plan
    // monitors the mapped part of its full AU set instead.
    bool fallback_full = false;
};

// One plan per emotion without a prior; one per reachable target with one.
std::vector<MonitoringPlan> plan_monitoring(std::optional<Emotion> prior = std::nullopt);

}  // namespace faup
