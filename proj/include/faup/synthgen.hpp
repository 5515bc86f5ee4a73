#pragma once

// Deterministic synthetic stand-in for a posed-expression corpus: a fixed
// neutral face, AU-driven displacements, Gaussian noise and optional line
// drawings of each face.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "faup/faucodes.hpp"
#include "faup/facegeo.hpp"
#include "faup/imaging.hpp"

namespace faup {

// SplitMix64: state += 0x9E3779B97F4A7C15, then
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z ^= z >> 31
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double uniform();   // [0, 1), 53 bits
    double gaussian();  // Box-Muller, one draw per call (two uniforms)

private:
    std::uint64_t state_;
};

struct SynthConfig {
    int per_class = 10;
    double noise_sigma = 0.01;
    double intensity = 0.05;
    std::uint64_t seed = 42;
    bool render = false;
    int render_width = kWorkingWidth;
    int render_height = kWorkingHeight;

    void validate() const;
};

// Maps normalized face coordinates (y up, eye line at 0) onto a canvas.
struct PixelMapping {
    double cx = 0.0;
    double cy = 0.0;
    double scale = 1.0;

    static PixelMapping for_canvas(int w, int h);
    Point2 to_pixel(Point2 p) const { return {cx + p.x * scale, cy - p.y * scale}; }
    Point2 from_pixel(Point2 q) const { return {(q.x - cx) / scale, (cy - q.y) / scale}; }
    FaceModel to_pixels(const FaceModel& f) const;
    FaceModel from_pixels(const FaceModel& f) const;
};

struct RenderedFace {
    Image image;
    FaceModel pixel_landmarks;
};

struct LabeledSample {
    FaceModel neutral;
    FaceModel expressive;
    Emotion emotion = Emotion::surprise;
    std::optional<RenderedFace> rendered;
    std::filesystem::path source;  // set when read from disk
};

struct SequenceFrame {
    FaceModel face;
    Emotion state = Emotion::surprise;
    bool boundary = false;  // first frame of a new state
    std::optional<RenderedFace> rendered;
};

struct Sequence {
    FaceModel neutral;
    std::vector<SequenceFrame> frames;

    std::vector<std::size_t> boundaries() const;
};

FaceModel neutral_template();

FaceModel apply_aus(const FaceModel& face, AUSet aus, double intensity);

std::vector<LabeledSample> generate_dataset(const SynthConfig& cfg);

// Each state after the first ramps in over two frames (halfway, then fully
// there) and holds for the rest of its block.
inline constexpr int kRampFrames = 2;
Sequence generate_sequence(const std::vector<Emotion>& path, int frames_per_state, const SynthConfig& cfg);

RenderedFace render_face(const FaceModel& face, int w = kWorkingWidth, int h = kWorkingHeight);

// <root>/<emotion>/<index>.landmarks [+ .pgm + .pixlandmarks], manifest.tsv.
void write_dataset(const std::filesystem::path& root, const std::vector<LabeledSample>& samples, std::uint64_t seed);
std::vector<LabeledSample> read_dataset(const std::filesystem::path& root);

// A single sample from either a .landmarks file (sibling .pgm/.pixlandmarks
// picked up when present) or a sample path without extension. The emotion is
// taken from the parent directory name when it names one.
LabeledSample read_sample(const std::filesystem::path& path);

// <dir>/frame_<i>.landmarks [+ .pgm + .pixlandmarks], sequence.tsv.
void write_sequence(const std::filesystem::path& dir, const Sequence& seq);
Sequence read_sequence(const std::filesystem::path& dir);

}  // namespace faup
