#pragma once

// Condensation particle filter over (x, y, s).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ast/appearance.hpp"
#include "ast/error.hpp"
#include "ast/numerics.hpp"

namespace ast {

struct Particle {
  BoxState state;
  double weight = 0.0;
};

struct MotionParams {
  double std_x = 4.0;
  double std_y = 4.0;
  double std_s = 0.01;
  std::size_t n_particles = 600;
  double s_min = 0.5;
  double s_max = 2.0;

  void validate() const {
    if (!(std_x >= 0.0 && std_y >= 0.0 && std_s >= 0.0) || !std::isfinite(std_x) ||
        !std::isfinite(std_y) || !std::isfinite(std_s)) {
      throw InvalidInput("motion standard deviations must be finite and >= 0");
    }
    if (n_particles < 1) throw InvalidInput("at least one particle is required");
    if (!(s_min > 0.0 && s_min <= s_max) || !std::isfinite(s_max)) {
      throw InvalidInput("scale range must satisfy 0 < s_min <= s_max");
    }
  }
};

/// Width and height of the frame the particles live in.
struct FrameBounds {
  int width = 0;
  int height = 0;
};

inline std::vector<Particle> init_particles(const BoxState& seed, const MotionParams& params) {
  params.validate();
  const double w = 1.0 / static_cast<double>(params.n_particles);
  return std::vector<Particle>(params.n_particles, Particle{seed, w});
}

/// Multinomial resampling: one uniform per draw, located in the cumulative
/// weight array by binary search. Output weights are uniform.
inline std::vector<Particle> resample(std::span<const Particle> particles, RandomSource& rng) {
  if (particles.empty()) return {};
  std::vector<double> cdf(particles.size());
  double total = 0.0;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const double w = particles[i].weight;
    if (!(w >= 0.0) || !std::isfinite(w)) throw DegenerateWeights("particle weight is negative or not finite");
    total += w;
    cdf[i] = total;
  }
  if (!(total > 0.0) || !std::isfinite(total)) throw DegenerateWeights("particle weights sum to zero");

  const std::size_t n = particles.size();
  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<Particle> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double target = rng.next_uniform() * total;
    auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), n - 1);
    out.push_back(Particle{particles[idx].state, uniform});
  }
  return out;
}

/// Independent Gaussian step on x, y and s (drawn in that order, particle by
/// particle). Scale is clamped to [s_min, s_max]; the corner is clamped so
/// the box keeps at least one pixel inside the frame.
inline void diffuse(std::span<Particle> particles, const MotionParams& params, FrameBounds bounds,
                    RandomSource& rng) {
  params.validate();
  for (Particle& p : particles) {
    BoxState& st = p.state;
    st.x = rng.next_gaussian(st.x, params.std_x);
    st.y = rng.next_gaussian(st.y, params.std_y);
    st.s = std::clamp(rng.next_gaussian(st.s, params.std_s), params.s_min, params.s_max);
    if (bounds.width > 0 && bounds.height > 0) {
      st.x = std::clamp(st.x, 1.0 - st.width(), bounds.width - 1.0);
      st.y = std::clamp(st.y, 1.0 - st.height(), bounds.height - 1.0);
    }
  }
}

}  // namespace ast
