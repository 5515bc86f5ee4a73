#include "faup/ruleengine.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "faup/error.hpp"

namespace faup {

namespace {

double entropy(const std::vector<EmotionSet>& labels, const std::vector<std::size_t>& idx) {
    if (idx.empty()) return 0.0;
    std::map<std::uint8_t, std::size_t> counts;
    for (auto i : idx) ++counts[labels[i].bits()];
    double h = 0.0;
    const double n = static_cast<double>(idx.size());
    for (const auto& [_, c] : counts) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

std::string label_text(EmotionSet s, bool not_labels) {
    if (s.empty()) return "indeterminate";
    std::string out;
    for (auto e : s.to_vector()) {
        if (!out.empty()) out += ", ";
        out += not_labels ? not_emotion_label(e) : emotion_name(e);
    }
    return out;
}

}  // namespace

AUObservation::AUObservation(AUSet present, AUSet absent) : present_(present), absent_(absent) {
    if (present.intersects(absent)) {
        throw InvalidInputError("AU observation lists " + (present & absent).to_string() + " as both present and absent");
    }
}

AUObservation AUObservation::closed_world(AUSet present) {
    return AUObservation(present, AUSet::all_modeled() - present);
}

EmotionDecision EmotionDecision::from_matches(EmotionSet matches) {
    EmotionDecision d;
    d.candidates = matches;
    d.kind = matches.empty() ? Kind::indeterminate : matches.size() == 1 ? Kind::single : Kind::ambiguous;
    return d;
}

std::string EmotionDecision::to_string() const {
    switch (kind) {
        case Kind::single: return std::string(emotion_name(*emotion()));
        case Kind::ambiguous: return "ambiguous " + candidates.to_string();
        case Kind::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

EmotionDecision classify_observation(const AUObservation& obs) {
    EmotionSet matches;
    for (auto e : kEmotions) {
        if (any_matches(unique_patterns(e), obs.present()) && !absence_aus(e).intersects(obs.present())) {
            matches.insert(e);
        }
    }
    return EmotionDecision::from_matches(matches);
}

EmotionSet absent_emotions(const AUObservation& obs) {
    EmotionSet out;
    for (auto e : kEmotions) {
        if (absence_aus(e).intersects(obs.present())) out.insert(e);
    }
    return out;
}

DecisionTree DecisionTree::leaf(EmotionSet label) {
    DecisionTree t;
    t.nodes_.push_back(Node{0, -1, -1, label});
    return t;
}

DecisionTree DecisionTree::induce(AUSet attributes, const Labeler& label_of, std::string leaf_prefix) {
    DecisionTree t;
    t.attributes_ = attributes;
    t.leaf_prefix_ = std::move(leaf_prefix);
    const auto ids = attributes.ids();
    const std::size_t rows_n = std::size_t{1} << ids.size();
    std::vector<AUSet> rows;
    std::vector<EmotionSet> labels;
    rows.reserve(rows_n);
    for (std::size_t mask = 0; mask < rows_n; ++mask) {
        AUSet present;
        for (std::size_t b = 0; b < ids.size(); ++b) {
            if (mask & (std::size_t{1} << b)) present.insert(ids[b]);
        }
        rows.push_back(present);
        labels.push_back(label_of(present));
    }
    t.grow(rows, labels, attributes);
    return t;
}

int DecisionTree::grow(const std::vector<AUSet>& rows, const std::vector<EmotionSet>& labels, AUSet remaining) {
    std::vector<std::size_t> all(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) all[i] = i;

    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{});

    const bool pure = std::all_of(labels.begin(), labels.end(), [&](EmotionSet l) { return l == labels.front(); });
    if (pure || remaining.empty()) {
        // Exhaustive rows with no attributes left always hold a single
        // assignment, so a non-pure leaf cannot arise.
        nodes_[self].label = labels.front();
        return self;
    }

    const double base = entropy(labels, all);
    int best_au = 0;
    double best_gain = -1.0;
    for (int au : remaining.ids()) {
        std::vector<std::size_t> on, off;
        for (std::size_t i = 0; i < rows.size(); ++i) (rows[i].contains(au) ? on : off).push_back(i);
        if (on.empty() || off.empty()) continue;
        const double n = static_cast<double>(rows.size());
        const double gain = base - (static_cast<double>(on.size()) / n) * entropy(labels, on) -
                            (static_cast<double>(off.size()) / n) * entropy(labels, off);
        if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best_au = au;
        }
    }

    std::vector<AUSet> rows_on, rows_off;
    std::vector<EmotionSet> lab_on, lab_off;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].contains(best_au)) {
            rows_on.push_back(rows[i]);
            lab_on.push_back(labels[i]);
        } else {
            rows_off.push_back(rows[i]);
            lab_off.push_back(labels[i]);
        }
    }
    const AUSet rest = remaining - AUSet{best_au};
    const int off_child = grow(rows_off, lab_off, rest);
    const int on_child = grow(rows_on, lab_on, rest);
    nodes_[self].au = best_au;
    nodes_[self].on_absent = off_child;
    nodes_[self].on_present = on_child;
    return self;
}

std::size_t DecisionTree::depth() const {
    std::function<std::size_t(int)> rec = [&](int i) -> std::size_t {
        const auto& n = nodes_[i];
        if (n.au == 0) return 0;
        return 1 + std::max(rec(n.on_absent), rec(n.on_present));
    };
    return nodes_.empty() ? 0 : rec(0);
}

TreeOutcome DecisionTree::evaluate(const AUObservation& obs) const {
    int i = 0;
    while (nodes_[i].au != 0) {
        const int au = nodes_[i].au;
        if (obs.present().contains(au)) {
            i = nodes_[i].on_present;
        } else if (obs.absent().contains(au)) {
            i = nodes_[i].on_absent;
        } else {
            return TreeOutcome{{}, true};
        }
    }
    return TreeOutcome{nodes_[i].label, false};
}

std::string DecisionTree::to_text() const {
    const bool not_labels = leaf_prefix_ == "N";
    std::string out;
    std::function<void(int, int)> rec = [&](int i, int indent) {
        const auto& n = nodes_[i];
        const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
        if (n.au == 0) {
            out += pad + "-> " + label_text(n.label, not_labels) + "\n";
            return;
        }
        out += pad + "AU" + std::to_string(n.au) + " present?\n";
        out += pad + "  yes:\n";
        rec(n.on_present, indent + 2);
        out += pad + "  no:\n";
        rec(n.on_absent, indent + 2);
    };
    if (!nodes_.empty()) rec(0, 0);
    return out;
}

std::string DecisionTree::to_dot(std::string_view name) const {
    const bool not_labels = leaf_prefix_ == "N";
    std::string out = "digraph " + std::string(name) + " {\n";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        const auto id = "n" + std::to_string(i);
        if (n.au == 0) {
            out += "  " + id + " [shape=box,label=\"" + label_text(n.label, not_labels) + "\"];\n";
        } else {
            out += "  " + id + " [label=\"AU" + std::to_string(n.au) + "\"];\n";
            out += "  " + id + " -> n" + std::to_string(n.on_present) + " [label=\"P\"];\n";
            out += "  " + id + " -> n" + std::to_string(n.on_absent) + " [label=\"A\"];\n";
        }
    }
    return out + "}\n";
}

AUSet absence_tree_attributes() { return {1, 2, 4, 5, 6, 7, 9}; }
AUSet transition_tree_attributes() { return {4, 6, 7, 10, 17, 23}; }

EmotionSet absence_tree_label(AUSet present) {
    const AUSet seen = present & absence_tree_attributes();
    EmotionSet out;
    for (auto e : kEmotions) {
        if ((absence_aus(e) & absence_tree_attributes()).intersects(seen)) out.insert(e);
    }
    return out;
}

EmotionSet transition_tree_label(AUSet present) {
    const AUSet attrs = transition_tree_attributes();
    const AUSet seen = present & attrs;
    EmotionSet out;
    for (auto to : kEmotions) {
        if (to == Emotion::surprise) continue;
        const auto rule = transition_rule(Emotion::surprise, to);
        bool any = false;
        for (const auto& p : rule.present) {
            const AUSet restricted = p.units & attrs;
            if (!restricted.empty() && restricted.subset_of(seen)) any = true;
        }
        if (any && !(rule.absent & attrs).intersects(seen)) out.insert(to);
    }
    return out;
}

DecisionTree build_absence_tree() {
    return DecisionTree::induce(absence_tree_attributes(), absence_tree_label, "N");
}

DecisionTree build_transition_tree(Emotion from) {
    if (from != Emotion::surprise) {
        throw UnsupportedTransitionError("transition tree is only defined out of Surprise");
    }
    return DecisionTree::induce(transition_tree_attributes(), transition_tree_label);
}

TreeOutcome evaluate_tree(const DecisionTree& tree, const AUObservation& obs) { return tree.evaluate(obs); }

std::vector<MonitoringPlan> plan_monitoring(std::optional<Emotion> prior) {
    std::vector<MonitoringPlan> plans;
    for (auto e : kEmotions) {
        if (prior && e == *prior) continue;
        MonitoringPlan p;
        p.hypothesis = e;
        p.prior = prior;
        if (!prior) {
            p.aus_to_check = unique_patterns(e);
        } else if (*prior == Emotion::surprise) {
            p.aus_to_check = transition_rule(*prior, e).present;
        } else {
            p.aus_to_check = derive_transition_rule(*prior, e).present;
        }
        const auto monitored = features_to_monitor(p.aus_to_check);
        if (monitored.unobservable_warning) {
            p.fallback_full = true;
            p.points = features_of(emotion_aus(e));
        } else {
            p.points = monitored.points;
        }
        plans.push_back(std::move(p));
    }
    return plans;
}

}  // namespace faup
