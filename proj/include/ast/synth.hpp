#pragma once

// Deterministic synthetic sequences with known ground truth: a textured
// block moving over a noisy textured background, with optional global
// illumination drift, per-frame sensor noise and a mid-sequence occluder.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "ast/appearance.hpp"
#include "ast/error.hpp"
#include "ast/io.hpp"
#include "ast/numerics.hpp"

namespace ast {

enum class Trajectory { linear, sinusoidal };

struct SynthSpec {
  std::size_t length = 120;
  int frame_w = 320;
  int frame_h = 240;
  int object_w = 40;
  int object_h = 40;
  Trajectory trajectory = Trajectory::linear;
  double start_x = 60.0;
  double start_y = 80.0;
  double end_x = 220.0;
  double end_y = 120.0;
  double wave_amplitude = 30.0;  ///< vertical swing of the sinusoidal path, pixels
  double illumination = 0.0;     ///< gain amplitude a in 1 + a sin(2 pi t / length)
  bool occluder = false;
  double noise_std = 0.0;
  std::uint64_t seed = 1;
};

struct SynthSequence {
  std::vector<Frame> frames;
  std::vector<GroundTruthBox> truth;
};

inline constexpr std::size_t kOccluderFrames = 10;
inline constexpr std::uint8_t kOccluderGray = 128;

/// First and last (1-based, inclusive) occluded frame.
inline std::pair<std::size_t, std::size_t> occluder_span(std::size_t length) {
  const std::size_t half = length / 2;
  const std::size_t first = half > 4 ? half - 4 : 1;
  const std::size_t last = std::min(length, first + kOccluderFrames - 1);
  return {first, last};
}

inline std::vector<GroundTruthBox> synth_trajectory(const SynthSpec& spec) {
  if (spec.length < 1) throw InvalidInput("synthetic sequence needs at least one frame");
  if (spec.frame_w < 2 || spec.frame_h < 2 || spec.object_w < 1 || spec.object_h < 1) {
    throw InvalidInput("synthetic frame and object sizes must be positive");
  }
  std::vector<GroundTruthBox> boxes;
  boxes.reserve(spec.length);
  for (std::size_t t = 1; t <= spec.length; ++t) {
    const double u = spec.length == 1 ? 0.0 : static_cast<double>(t - 1) / static_cast<double>(spec.length - 1);
    double x = spec.start_x + u * (spec.end_x - spec.start_x);
    double y = spec.start_y + u * (spec.end_y - spec.start_y);
    if (spec.trajectory == Trajectory::sinusoidal) y += spec.wave_amplitude * std::sin(2.0 * std::numbers::pi * u);
    GroundTruthBox b{static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y)), spec.object_w,
                     spec.object_h};
    if (b.x < 0 || b.y < 0 || b.x + b.w > spec.frame_w || b.y + b.h > spec.frame_h) {
      throw InvalidInput("object leaves the frame at frame " + std::to_string(t));
    }
    boxes.push_back(b);
  }
  return boxes;
}

inline SynthSequence generate_synthetic(const SynthSpec& spec) {
  if (!(spec.noise_std >= 0.0) || !std::isfinite(spec.noise_std)) throw InvalidInput("noise_std must be >= 0");
  if (!std::isfinite(spec.illumination)) throw InvalidInput("illumination amplitude must be finite");
  SynthSequence seq;
  seq.truth = synth_trajectory(spec);

  RandomSource rng(spec.seed);
  auto level = [&rng] { return static_cast<double>(std::min(255, static_cast<int>(rng.next_uniform() * 256.0))); };
  std::vector<double> texture(static_cast<std::size_t>(spec.object_w) * spec.object_h);
  for (double& v : texture) v = level();
  std::vector<double> background(static_cast<std::size_t>(spec.frame_w) * spec.frame_h);
  for (double& v : background) v = level();

  const auto [occ_first, occ_last] = occluder_span(spec.length);
  std::vector<double> scene(background.size());
  seq.frames.reserve(spec.length);
  for (std::size_t t = 1; t <= spec.length; ++t) {
    const GroundTruthBox& b = seq.truth[t - 1];
    scene = background;
    for (int r = 0; r < b.h; ++r)
      for (int c = 0; c < b.w; ++c)
        scene[static_cast<std::size_t>(b.y + r) * spec.frame_w + b.x + c] =
            texture[static_cast<std::size_t>(r) * b.w + c];
    if (spec.occluder && t >= occ_first && t <= occ_last) {
      for (int r = b.h / 2; r < b.h; ++r)
        for (int c = 0; c < b.w; ++c)
          scene[static_cast<std::size_t>(b.y + r) * spec.frame_w + b.x + c] = kOccluderGray;
    }

    const double gain =
        1.0 + spec.illumination * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / spec.length);
    Frame f(spec.frame_w, spec.frame_h, 0, t);
    for (std::size_t i = 0; i < scene.size(); ++i) {
      const double noisy = scene[i] + rng.next_gaussian(0.0, spec.noise_std);
      f.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::round(gain * noisy), 0.0, 255.0));
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

/// frame_NNNN.pgm files plus groundtruth.txt.
inline constexpr const char* kGroundTruthFile = "groundtruth.txt";

inline SynthSequence write_synthetic(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  SynthSequence seq = generate_synthetic(spec);
  std::filesystem::create_directories(out_dir);
  const int digits = std::max(4, static_cast<int>(std::to_string(spec.length).size()));
  for (const Frame& f : seq.frames) {
    char name[64];
    std::snprintf(name, sizeof name, "frame_%0*zu.pgm", digits, f.index);
    write_pgm(out_dir / name, f);
  }
  save_ground_truth(out_dir / kGroundTruthFile, seq.truth);
  return seq;
}

}  // namespace ast
