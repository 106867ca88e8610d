#pragma once

// Command-line front end: track, eval and synth subcommands.
// Exit codes: 0 success, 1 usage error, 2 data or format error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ast/error.hpp"
#include "ast/eval.hpp"
#include "ast/io.hpp"
#include "ast/synth.hpp"
#include "ast/tracker.hpp"

namespace ast::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Thrown for flag values that parse but make no sense.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<double> parse_list(const std::string& text, std::size_t expected, const std::string& flag) {
  const auto parts = detail::split(text, ',');
  std::vector<double> values;
  for (auto p : parts) {
    double v = 0.0;
    if (!detail::parse_number(p, v)) throw UsageError(flag + ": cannot parse '" + text + "'");
    values.push_back(v);
  }
  if (values.size() != expected) {
    throw UsageError(flag + ": expected " + std::to_string(expected) + " comma-separated values");
  }
  return values;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Affine subspace object tracker"};
  app.name("ast");
  app.require_subcommand(1);

  // track
  auto* track = app.add_subcommand("track", "Track an object through a directory of PGM frames");
  std::string frames_dir;
  std::string init_box;
  std::string out_file;
  std::string motion_std;
  std::string scale_range;
  std::string distance = "affine";
  std::string overlay_dir;
  std::string dump_bag_dir;
  bool raw_pixels = false;
  TrackerConfig config;
  track->add_option("--frames", frames_dir, "Directory of .pgm frames")->required();
  track->add_option("--init", init_box, "Initial box X,Y,W,H (top-left corner)")->required();
  track->add_option("--out", out_file, "Result CSV")->required();
  track->add_option("--particles", config.motion.n_particles, "Number of particles")->capture_default_str();
  track->add_option("--history", config.history, "Accepted patches per subspace (P)")->capture_default_str();
  track->add_option("--subdim", config.subspace_dim, "Subspace dimension (n)")->capture_default_str();
  track->add_option("--bag-size", config.bag_size, "Models kept in the bag (k)")->capture_default_str();
  track->add_option("--update-every", config.update_period, "Frames between bag updates (W)")->capture_default_str();
  track->add_option("--alpha", config.alpha, "Weight of the origin term")->capture_default_str();
  track->add_option("--sigma", config.sigma, "Likelihood scale")->capture_default_str();
  track->add_option("--motion-std", motion_std, "Diffusion std SX,SY,SS");
  track->add_option("--scale-range", scale_range, "Scale clamp MIN,MAX");
  track->add_option("--seed", config.seed, "Random seed")->capture_default_str();
  track->add_option("--distance", distance, "Subspace distance")->check(CLI::IsMember({"affine", "kl"}))->capture_default_str();
  track->add_option("--kl-sigma2", config.kl_sigma2, "Noise variance of the KL distance")->capture_default_str();
  track->add_option("--overlay", overlay_dir, "Write frames with the estimated box drawn");
  track->add_option("--dump-bag", dump_bag_dir, "Write the final bag of models");
  track->add_flag("--raw-pixels", raw_pixels, "Use raw 0..255 features instead of dividing by 255");

  // eval
  auto* eval = app.add_subcommand("eval", "Score a result CSV against ground truth");
  std::string records_file;
  std::string truth_file;
  double threshold = 20.0;
  eval->add_option("--records", records_file, "Result CSV")->required();
  eval->add_option("--truth", truth_file, "Ground truth (x,y,w,h per line)")->required();
  eval->add_option("--threshold", threshold, "Precision threshold in pixels")->capture_default_str();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence with ground truth");
  SynthSpec spec;
  std::string synth_out;
  std::string object_size;
  std::string start;
  std::string end;
  std::string trajectory = "linear";
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--length", spec.length, "Number of frames")->required();
  synth->add_option("--seed", spec.seed, "Random seed")->required();
  synth->add_option("--width", spec.frame_w, "Frame width")->capture_default_str();
  synth->add_option("--height", spec.frame_h, "Frame height")->capture_default_str();
  synth->add_option("--object-size", object_size, "Object W,H (default 40,40)");
  synth->add_option("--trajectory", trajectory, "Path shape")
      ->check(CLI::IsMember({"linear", "sinusoidal"}))
      ->capture_default_str();
  synth->add_option("--start", start, "Start corner X,Y (default 60,80)");
  synth->add_option("--end", end, "End corner X,Y (default 220,120)");
  synth->add_option("--wave-amp", spec.wave_amplitude, "Sinusoidal swing in pixels")->capture_default_str();
  synth->add_option("--illumination", spec.illumination, "Gain drift amplitude")->capture_default_str();
  synth->add_flag("--occluder", spec.occluder, "Half-occlude the object for 10 mid-sequence frames");
  synth->add_option("--noise-std", spec.noise_std, "Per-pixel Gaussian noise std")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (*track) {
      const auto box = parse_list(init_box, 4, "--init");
      if (!motion_std.empty()) {
        const auto v = parse_list(motion_std, 3, "--motion-std");
        config.motion.std_x = v[0];
        config.motion.std_y = v[1];
        config.motion.std_s = v[2];
      }
      if (!scale_range.empty()) {
        const auto v = parse_list(scale_range, 2, "--scale-range");
        config.motion.s_min = v[0];
        config.motion.s_max = v[1];
      }
      config.distance = distance == "kl" ? DistanceKind::kl : DistanceKind::affine;
      config.patch.normalize = !raw_pixels;
      BoxState init{box[0], box[1], 1.0, static_cast<int>(std::lround(box[2])), static_cast<int>(std::lround(box[3]))};
      try {
        config.validate();
      } catch (const InvalidInput& e) {
        throw UsageError(e.what());
      }
      if (!init.valid()) throw UsageError("--init: box must be at least 2x2");

      const std::vector<Frame> frames = load_frames(frames_dir);
      TrackState state(init, config);
      if (frames.size() < config.history) throw InvalidInput("fewer frames than the warm-up length");
      std::vector<TrackRecord> records;
      records.reserve(frames.size());
      for (const Frame& f : frames) records.push_back(process_frame(state, f, config));
      save_records(std::filesystem::path(out_file), records);
      if (!overlay_dir.empty()) {
        std::filesystem::create_directories(overlay_dir);
        const auto names = list_frame_files(frames_dir);
        for (std::size_t i = 0; i < frames.size(); ++i) {
          write_pgm(std::filesystem::path(overlay_dir) / names[i].filename(), draw_box(frames[i], records[i]));
        }
      }
      if (!dump_bag_dir.empty()) dump_bag(dump_bag_dir, state.bag);
      out << "frames=" << records.size() << " out=" << out_file << '\n';
    } else if (*eval) {
      const auto records = load_records(std::filesystem::path(records_file));
      const auto truth = load_ground_truth(std::filesystem::path(truth_file));
      const MetricsReport m = evaluate(records, truth, threshold);
      out << "mean_cle=" << detail::fixed6(m.mean_cle) << " precision=" << detail::fixed6(m.precision) << '\n';
    } else if (*synth) {
      if (!object_size.empty()) {
        const auto v = parse_list(object_size, 2, "--object-size");
        spec.object_w = static_cast<int>(std::lround(v[0]));
        spec.object_h = static_cast<int>(std::lround(v[1]));
      }
      if (!start.empty()) {
        const auto v = parse_list(start, 2, "--start");
        spec.start_x = v[0];
        spec.start_y = v[1];
      }
      if (!end.empty()) {
        const auto v = parse_list(end, 2, "--end");
        spec.end_x = v[0];
        spec.end_y = v[1];
      }
      spec.trajectory = trajectory == "sinusoidal" ? Trajectory::sinusoidal : Trajectory::linear;
      const SynthSequence seq = write_synthetic(spec, synth_out);
      const auto& b = seq.truth.front();
      out << "frames=" << seq.frames.size() << " init=" << b.x << ',' << b.y << ',' << b.w << ',' << b.h << '\n';
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace ast::cli
