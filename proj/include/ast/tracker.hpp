#pragma once

// The affine subspace tracking loop.
//
// Frames 1..P hold the user-supplied box and collect the bootstrap patches.
// From frame P+1 on, every frame: resample, diffuse, cut one patch per
// particle, fit a candidate affine subspace to the accepted history plus
// that patch, score the candidate against each model in the bag, sum the
// per-model likelihoods and take the argmax as the estimate.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "ast/appearance.hpp"
#include "ast/bag.hpp"
#include "ast/error.hpp"
#include "ast/grassmann.hpp"
#include "ast/motion.hpp"
#include "ast/numerics.hpp"

namespace ast {

enum class DistanceKind { affine, kl };

struct TrackerConfig {
  std::size_t history = 5;       ///< P, accepted patches kept
  std::size_t subspace_dim = 3;  ///< n
  std::size_t bag_size = 10;     ///< k
  std::size_t update_period = 5; ///< W
  double alpha = 1.0;
  double sigma = 0.1;
  MotionParams motion;
  std::uint64_t seed = 1;
  DistanceKind distance = DistanceKind::affine;
  double kl_sigma2 = 1.0;
  PatchOptions patch;

  void validate() const {
    if (history < 2) throw InvalidInput("history length must be >= 2");
    if (subspace_dim < 1 || subspace_dim + 1 > history) {
      throw InvalidInput("subspace dimension must satisfy 1 <= n <= P - 1");
    }
    if (bag_size < 1 || update_period < 1) throw InvalidInput("bag size and update period must be >= 1");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("alpha must be finite and >= 0");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("sigma must be finite and > 0");
    if (!(kl_sigma2 > 0.0) || !std::isfinite(kl_sigma2)) throw InvalidInput("KL sigma^2 must be > 0");
    if (patch.width < 1 || patch.height < 1) throw InvalidInput("patch size must be positive");
    motion.validate();
  }
};

/// One line of tracker output.
struct TrackRecord {
  std::size_t frame = 0;
  double x = 0.0;
  double y = 0.0;
  double s = 1.0;
  int w = 0;
  int h = 0;
  double score = 0.0;

  static TrackRecord from_state(std::size_t frame, const BoxState& st, double score) {
    return TrackRecord{frame, st.x, st.y, st.s, st.width(), st.height(), score};
  }

  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

inline double subspace_distance(const AffineSubspace& a, const AffineSubspace& b,
                                const TrackerConfig& config) {
  return config.distance == DistanceKind::kl ? kl_distance(a, b, config.kl_sigma2)
                                             : affine_distance(a, b, config.alpha);
}

/// Affine subspace of the history patches (oldest first) followed by the candidate.
inline AffineSubspace candidate_subspace(std::span<const Patch> history, const Patch& candidate,
                                         std::size_t n) {
  std::vector<const Vector*> samples;
  samples.reserve(history.size() + 1);
  for (const Patch& p : history) samples.push_back(&p.features);
  samples.push_back(&candidate.features);
  return fit_affine_subspace(samples, n);
}

inline AffineSubspace candidate_subspace(const std::deque<Patch>& history, const Patch& candidate,
                                         std::size_t n) {
  std::vector<const Vector*> samples;
  samples.reserve(history.size() + 1);
  for (const Patch& p : history) samples.push_back(&p.features);
  samples.push_back(&candidate.features);
  return fit_affine_subspace(samples, n);
}

/// exp(-d / sigma), normalized over the candidates. Shifted by the smallest
/// distance first so large distances cannot underflow the whole vector.
/// Non-finite distances get zero mass; if none is finite the result is uniform.
inline Vector likelihoods_from_distances(std::span<const double> distances, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("sigma must be finite and > 0");
  if (distances.empty()) throw InvalidInput("no candidates to score");
  double best = std::numeric_limits<double>::infinity();
  for (double d : distances)
    if (std::isfinite(d) && d < best) best = d;

  const std::size_t n = distances.size();
  if (!std::isfinite(best)) return Vector(n, 1.0 / static_cast<double>(n));

  Vector p(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::isfinite(distances[i]) ? std::exp(-(distances[i] - best) / sigma) : 0.0;
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

inline Vector likelihoods(std::span<const AffineSubspace> candidates, const AffineSubspace& model,
                          const TrackerConfig& config) {
  Vector d(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) d[i] = subspace_distance(candidates[i], model, config);
  return likelihoods_from_distances(d, config.sigma);
}

/// Sum rule across models.
inline Vector aggregate(std::span<const Vector> per_model) {
  if (per_model.empty()) throw InvalidState("no models to aggregate; the bag is empty");
  Vector out(per_model.front().size(), 0.0);
  for (const Vector& v : per_model) {
    if (v.size() != out.size()) throw InvalidInput("likelihood vectors differ in length");
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v[i];
  }
  return out;
}

/// Index of the largest entry; the lowest index wins ties.
inline std::size_t estimate(std::span<const double> aggregated) {
  if (aggregated.empty()) throw InvalidInput("estimate: empty likelihood vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < aggregated.size(); ++i)
    if (aggregated[i] > aggregated[best]) best = i;
  return best;
}

struct TrackState {
  std::deque<Patch> history;  ///< accepted patches, oldest first
  std::vector<Particle> particles;
  ModelBag bag;
  RandomSource rng;
  BoxState estimate;
  std::size_t frame_index = 0;  ///< last processed frame (1-based)

  TrackState(const BoxState& init, const TrackerConfig& config)
      : bag(config.bag_size, config.update_period), rng(config.seed), estimate(init) {}

  bool warmed_up(const TrackerConfig& config) const noexcept {
    return history.size() == config.history && !bag.empty();
  }
};

/// Frames 1..P: hold the initial box, collect its patch; at frame P the
/// bootstrap model seeds the bag and the particle set is created.
inline TrackRecord warm_up(TrackState& state, const Frame& frame, const TrackerConfig& config) {
  if (state.warmed_up(config)) throw InvalidState("warm-up already complete");
  ++state.frame_index;
  state.history.push_back(extract_patch(frame, state.estimate, config.patch));
  if (state.history.size() == config.history) {
    state.bag.maybe_update(build_affine_subspace(std::vector<Patch>(state.history.begin(), state.history.end()),
                                                 config.subspace_dim),
                           state.frame_index);
    state.particles = init_particles(state.estimate, config.motion);
  }
  return TrackRecord::from_state(state.frame_index, state.estimate, 0.0);
}

/// One iteration of the tracking loop on a frame after warm-up.
inline TrackRecord step(TrackState& state, const Frame& frame, const TrackerConfig& config) {
  if (!state.warmed_up(config)) throw InvalidState("step called before warm-up completed");
  if (!frame.valid()) throw InvalidInput("frame is malformed");
  ++state.frame_index;

  // All randomness is consumed here, before any per-particle evaluation.
  std::vector<Particle> particles = resample(state.particles, state.rng);
  diffuse(particles, config.motion, FrameBounds{frame.width, frame.height}, state.rng);

  const auto& models = state.bag.all_models();
  const std::size_t n_particles = particles.size();
  std::vector<Patch> patches(n_particles);
  std::vector<Vector> distances(models.size(), Vector(n_particles));
  for (std::size_t i = 0; i < n_particles; ++i) {
    patches[i] = extract_patch(frame, particles[i].state, config.patch);
    const AffineSubspace candidate = candidate_subspace(state.history, patches[i], config.subspace_dim);
    for (std::size_t j = 0; j < models.size(); ++j) {
      distances[j][i] = subspace_distance(candidate, models[j], config);
    }
  }

  std::vector<Vector> per_model;
  per_model.reserve(models.size());
  for (const Vector& d : distances) per_model.push_back(likelihoods_from_distances(d, config.sigma));
  const Vector agg = aggregate(per_model);
  const std::size_t best = estimate(agg);

  double total = 0.0;
  for (double v : agg) total += v;
  for (std::size_t i = 0; i < n_particles; ++i) particles[i].weight = agg[i] / total;

  AffineSubspace accepted = candidate_subspace(state.history, patches[best], config.subspace_dim);
  state.history.push_back(std::move(patches[best]));
  state.history.pop_front();
  state.bag.maybe_update(std::move(accepted), state.frame_index);

  state.estimate = particles[best].state;
  state.particles = std::move(particles);
  return TrackRecord::from_state(state.frame_index, state.estimate, agg[best]);
}

/// Warm-up or step, whichever the state calls for.
inline TrackRecord process_frame(TrackState& state, const Frame& frame, const TrackerConfig& config) {
  return state.warmed_up(config) ? step(state, frame, config) : warm_up(state, frame, config);
}

/// Tracks the whole sequence and returns one record per frame.
inline std::vector<TrackRecord> run(std::span<const Frame> frames, const BoxState& init,
                                    const TrackerConfig& config) {
  config.validate();
  if (!init.valid()) throw InvalidInput("initial box is invalid");
  if (frames.size() < config.history) throw InvalidInput("fewer frames than the warm-up length");
  TrackState state(init, config);
  std::vector<TrackRecord> records;
  records.reserve(frames.size());
  for (const Frame& f : frames) records.push_back(process_frame(state, f, config));
  return records;
}

}  // namespace ast
