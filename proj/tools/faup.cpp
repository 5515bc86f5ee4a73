// faup: command-line front end for the facial action unit toolkit.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "faup/error.hpp"
#include "faup/pipeline.hpp"
#include "faup/ruleengine.hpp"

namespace fs = std::filesystem;
using namespace faup;

namespace {

std::vector<Emotion> parse_path(const std::string& text) {
    std::vector<Emotion> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto e = parse_emotion(item);
        if (!e) throw CLI::ValidationError("--sequence", "unknown emotion '" + item + "'");
        out.push_back(*e);
    }
    if (out.empty()) throw CLI::ValidationError("--sequence", "empty path");
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"faup: facial action unit rules, pruned recognition and benchmarks"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // synth
    SynthConfig synth;
    std::string synth_out;
    std::string seq_path;
    int seq_frames = 5;
    auto* s = app.add_subcommand("synth", "Generate a synthetic dataset or expression sequence");
    s->add_option("--out", synth_out, "Output directory")->required();
    s->add_option("--per-class", synth.per_class, "Samples per emotion")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--noise", synth.noise_sigma, "Gaussian noise sigma on active points (normalized units)")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
    s->add_option("--intensity", synth.intensity, "AU displacement magnitude (normalized units)")
        ->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    s->add_flag("--render", synth.render, "Also write PGM drawings and pixel landmarks");
    s->add_option("--width", synth.render_width, "Render width")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--height", synth.render_height, "Render height")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--sequence", seq_path, "Write a sequence instead, e.g. surprise,happiness");
    s->add_option("--frames", seq_frames, "Frames per state in a sequence")->capture_default_str()->check(CLI::Range(2, 100000));

    // train
    BundleConfig cfg;
    std::string data_dir;
    std::string model_out;
    std::string mode = "landmark";
    std::string canny_order = "pca";
    std::string patch_source = "edges";
    auto* t = app.add_subcommand("train", "Train the six not-emotion detectors");
    t->add_option("--data", data_dir, "Dataset directory (with manifest.tsv)")->required();
    t->add_option("--out", model_out, "Model file to write")->required();
    t->add_option("--mode", mode, "Feature mode")->capture_default_str()->check(CLI::IsMember({"landmark", "image"}));
    t->add_option("--components", cfg.components, "PCA components (image mode)")->capture_default_str()->check(CLI::PositiveNumber);
    t->add_option("--svm-c", cfg.svm_c, "Soft-margin C")->capture_default_str()->check(CLI::PositiveNumber);
    t->add_option("--seed", cfg.seed, "Split seed")->capture_default_str();
    t->add_option("--split", cfg.split_ratio, "Training fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    t->add_option("--tau-factor", cfg.tau_factor, "AU-presence tolerance as a fraction of intensity")
        ->capture_default_str()->check(CLI::PositiveNumber);
    t->add_option("--work-width", cfg.work_width, "Working image width")->capture_default_str()->check(CLI::PositiveNumber);
    t->add_option("--work-height", cfg.work_height, "Working image height")->capture_default_str()->check(CLI::PositiveNumber);
    t->add_option("--patch-radius", cfg.patch_radius, "Patch radius in pixels")->capture_default_str()->check(CLI::PositiveNumber);
    t->add_option("--patch-source", patch_source, "Patch values")->capture_default_str()->check(CLI::IsMember({"edges", "luminance"}));
    t->add_option("--canny-order", canny_order, "Canny on PCA reconstruction or raw image")
        ->capture_default_str()->check(CLI::IsMember({"pca", "raw"}));
    t->add_option("--canny-low", cfg.canny.low, "Low threshold (fraction of max gradient)")->capture_default_str();
    t->add_option("--canny-high", cfg.canny.high, "High threshold (fraction of max gradient)")->capture_default_str();
    t->add_option("--canny-sigma", cfg.canny.sigma, "Gaussian sigma")->capture_default_str()->check(CLI::PositiveNumber);

    // classify
    std::string model_path;
    std::string input;
    std::string prior_text;
    bool pruned = false;
    auto* c = app.add_subcommand("classify", "Classify one sample");
    c->add_option("--model", model_path, "Model file")->required();
    c->add_option("--input", input, "Sample .landmarks file")->required();
    c->add_option("--prior", prior_text, "Known previous emotion");
    c->add_flag("--pruned", pruned, "Use the rule-pruned path");

    // bench
    std::string report_path;
    auto* bnch = app.add_subcommand("bench", "Compare the full and pruned paths");
    bnch->add_option("--model", model_path, "Model file")->required();
    bnch->add_option("--data", data_dir, "Dataset directory")->required();
    bnch->add_option("--report", report_path, "Tab-separated report file")->required();

    // transitions
    std::string seq_dir;
    auto* tr = app.add_subcommand("transitions", "Detect emotion transitions in a sequence");
    tr->add_option("--model", model_path, "Model file")->required();
    tr->add_option("--sequence", seq_dir, "Sequence directory")->required();

    // rules
    bool dump = false;
    bool dot = false;
    std::string tree;
    auto* r = app.add_subcommand("rules", "Print rule tables or induced decision trees");
    auto* dump_opt = r->add_flag("--dump", dump, "Print all rule tables");
    auto* tree_opt = r->add_option("--tree", tree, "Print an induced tree")->check(CLI::IsMember({"absence", "transition"}));
    r->add_flag("--dot", dot, "Tree in Graphviz dot format");
    dump_opt->excludes(tree_opt);

    if (argc <= 1) {
        std::cerr << app.help();
        return 1;
    }
    try {
        app.parse(argc, argv);
        if (r->parsed() && !dump && tree.empty()) {
            throw CLI::RequiredError("rules needs --dump or --tree");
        }
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (s->parsed()) {
            synth.validate();
            if (!seq_path.empty()) {
                const auto seq = generate_sequence(parse_path(seq_path), seq_frames, synth);
                write_sequence(synth_out, seq);
                std::cout << "wrote " << seq.frames.size() << " frames to " << synth_out << "\n";
            } else {
                const auto data = generate_dataset(synth);
                write_dataset(synth_out, data, synth.seed);
                std::cout << "wrote " << data.size() << " samples to " << synth_out << "\n";
            }
        } else if (t->parsed()) {
            cfg.mode = *parse_feature_mode(mode);
            cfg.canny_order = canny_order == "pca" ? CannyOrder::pca_components : CannyOrder::raw;
            cfg.patch_source = patch_source == "edges" ? PatchSource::edges : PatchSource::luminance;
            const auto data = read_dataset(data_dir);
            const auto res = train(data, cfg);
            save_bundle(res.bundle, model_out);
            std::cout << "trained on " << res.split.train.size() << " samples, held out " << res.split.test.size()
                      << "\n";
            std::cout << "detector\tsv_number\tmargin\tcorrectness\n";
            for (auto e : kEmotions) {
                const auto& d = res.detectors[index_of(e)];
                std::cout << not_emotion_label(e) << '\t' << d.sv_count << '\t' << fmt(d.margin) << '\t'
                          << fmt(d.correctness) << "\n";
            }
        } else if (c->parsed()) {
            const auto bundle = load_bundle(model_path);
            const auto sample = read_sample(input);
            std::optional<Emotion> prior;
            if (!prior_text.empty()) {
                prior = parse_emotion(prior_text);
                if (!prior) {
                    std::cerr << "unknown emotion '" << prior_text << "'\n";
                    return 1;
                }
            }
            if (pruned || prior) {
                const auto res = classify_pruned(bundle, sample, prior);
                std::cout << "emotion\t" << res.decision.to_string() << "\n";
                std::cout << "points_examined\t" << res.points_examined << "\n";
                std::cout << "fallback\t" << (res.fallback ? "yes" : "no") << "\n";
                if (!res.fallback) std::cout << "present_aus\t" << res.observation.present().to_string() << "\n";
            } else {
                const auto res = classify_full(bundle, sample);
                std::cout << "emotion\t" << emotion_name(res.emotion) << (res.low_confidence ? " (low confidence)" : "")
                          << "\n";
                for (auto e : kEmotions) {
                    std::cout << not_emotion_label(e) << '\t' << fmt(res.scores[index_of(e)]) << "\n";
                }
            }
        } else if (bnch->parsed()) {
            const auto bundle = load_bundle(model_path);
            const auto data = read_dataset(data_dir);
            const auto rep = bench_compare(bundle, data);
            std::ofstream out(report_path);
            if (!out) throw InvalidInputError("cannot write " + report_path);
            out << rep.to_tsv();
            std::cout << rep.summary();
        } else if (tr->parsed()) {
            const auto bundle = load_bundle(model_path);
            const auto seq = read_sequence(seq_dir);
            const auto events = detect_transitions(bundle, seq);
            std::cout << "frame\tfrom\tto\tevidence\n";
            for (const auto& ev : events) {
                std::string present;
                for (const auto& p : ev.evidence.present) present += (present.empty() ? "" : " ") + p.to_string();
                std::cout << ev.frame << '\t' << emotion_name(ev.from) << '\t' << emotion_name(ev.to) << "\tP: "
                          << present << " A: " << ev.evidence.absent.to_string() << (ev.heuristic ? " (derived)" : "")
                          << "\n";
            }
            if (events.empty()) std::cout << "no transitions\n";
        } else if (r->parsed()) {
            if (dump) {
                std::cout << format_rule_tables();
            } else {
                const auto t = tree == "absence" ? build_absence_tree() : build_transition_tree();
                std::cout << (dot ? t.to_dot(tree == "absence" ? "absence" : "transition") : t.to_text());
            }
        }
    } catch (const faup::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
