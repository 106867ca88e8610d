#pragma once

// Patch extraction and affine-subspace fitting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ast/error.hpp"
#include "ast/grassmann.hpp"
#include "ast/numerics.hpp"

namespace ast {

/// 8-bit grayscale image, row-major. `index` is the 1-based frame number.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  std::size_t index = 1;

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0, std::size_t idx = 1)
      : width(w), height(h), pixels(static_cast<std::size_t>(std::max(w, 0)) * std::max(h, 0), fill),
        index(idx) {}

  bool valid() const noexcept {
    return width > 0 && height > 0 &&
           pixels.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  std::uint8_t at(int x, int y) const noexcept {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) noexcept { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Object state: top-left corner and a scale multiplier on a fixed base box.
struct BoxState {
  double x = 0.0;
  double y = 0.0;
  double s = 1.0;
  int base_w = 0;
  int base_h = 0;

  int width() const noexcept { return static_cast<int>(std::lround(base_w * s)); }
  int height() const noexcept { return static_cast<int>(std::lround(base_h * s)); }
  int anchor_x() const noexcept { return static_cast<int>(std::lround(x)); }
  int anchor_y() const noexcept { return static_cast<int>(std::lround(y)); }

  bool valid() const noexcept {
    return s > 0.0 && std::isfinite(s) && std::isfinite(x) && std::isfinite(y) && width() >= 2 &&
           height() >= 2;
  }

  friend bool operator==(const BoxState&, const BoxState&) = default;
};

struct Patch {
  Vector features;
};

struct PatchOptions {
  int width = 32;
  int height = 32;
  /// Divide pixel values by 255. Turning this off keeps raw 0..255 values.
  bool normalize = true;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(width) * height; }
};

/// Cuts the box (round(base*s) pixels, anchored at the rounded corner) and
/// bilinearly resamples it to the patch size. Samples use half-pixel
/// centres; source coordinates are clamped to the frame (replicated border).
inline Patch extract_patch(const Frame& frame, const BoxState& state, const PatchOptions& opts = {}) {
  if (!frame.valid()) throw InvalidInput("extract_patch: frame is malformed");
  if (frame.width < 2 || frame.height < 2) throw InvalidInput("extract_patch: frame smaller than 2x2");
  if (!state.valid()) throw InvalidInput("extract_patch: box state is invalid");
  if (opts.width < 1 || opts.height < 1) throw InvalidInput("extract_patch: empty patch size");

  const double region_w = state.width();
  const double region_h = state.height();
  const double ax = state.anchor_x();
  const double ay = state.anchor_y();
  const double max_x = frame.width - 1;
  const double max_y = frame.height - 1;
  const double denom = opts.normalize ? 255.0 : 1.0;

  // Column sample positions are shared by every row.
  std::vector<int> x0(opts.width);
  std::vector<int> x1(opts.width);
  std::vector<double> fx(opts.width);
  for (int j = 0; j < opts.width; ++j) {
    const double sx = std::clamp(ax + (j + 0.5) * region_w / opts.width - 0.5, 0.0, max_x);
    x0[j] = static_cast<int>(std::floor(sx));
    x1[j] = std::min(x0[j] + 1, frame.width - 1);
    fx[j] = sx - x0[j];
  }

  Patch patch{Vector(opts.dim())};
  for (int i = 0; i < opts.height; ++i) {
    const double sy = std::clamp(ay + (i + 0.5) * region_h / opts.height - 0.5, 0.0, max_y);
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, frame.height - 1);
    const double fy = sy - y0;
    for (int j = 0; j < opts.width; ++j) {
      const double top = (1.0 - fx[j]) * frame.at(x0[j], y0) + fx[j] * frame.at(x1[j], y0);
      const double bottom = (1.0 - fx[j]) * frame.at(x0[j], y1) + fx[j] * frame.at(x1[j], y1);
      patch.features[static_cast<std::size_t>(i) * opts.width + j] =
          ((1.0 - fy) * top + fy * bottom) / denom;
    }
  }
  return patch;
}

/// Fits an affine subspace to a set of equally sized feature vectors: the
/// origin is their mean and the basis holds the leading left-singular
/// vectors of the centred stack, at most `n` of them and never more than the
/// numerical rank.
inline AffineSubspace fit_affine_subspace(std::span<const Vector* const> samples, std::size_t n) {
  if (samples.empty()) throw InvalidInput("fit_affine_subspace: no samples");
  if (n == 0) throw InvalidInput("fit_affine_subspace: subspace dimension must be >= 1");
  const std::size_t dim = samples.front()->size();
  const std::size_t m = samples.size();
  double raw_norm2 = 0.0;
  for (const Vector* v : samples) {
    if (v->size() != dim) throw InvalidInput("fit_affine_subspace: samples differ in length");
    if (!all_finite(*v)) throw InvalidInput("fit_affine_subspace: non-finite sample");
    raw_norm2 += squared_norm(*v);
  }

  Vector mean(dim, 0.0);
  for (const Vector* v : samples)
    for (std::size_t r = 0; r < dim; ++r) mean[r] += (*v)[r];
  for (double& x : mean) x /= static_cast<double>(m);

  Matrix centred(dim, m);
  for (std::size_t r = 0; r < dim; ++r) {
    auto row = centred.row(r);
    for (std::size_t c = 0; c < m; ++c) row[c] = (*samples[c])[r] - mean[r];
  }

  Matrix left;
  Vector sing;
  if (dim >= m) {
    ThinSvd svd = thin_svd(centred, n);
    left = std::move(svd.u);
    sing = std::move(svd.s);
  } else {
    // More samples than dimensions: eigenvectors of the D x D scatter.
    SymEig eig = sym_eig(gram(centred.transposed()));
    left = std::move(eig.vectors);
    sing = std::move(eig.values);
    for (double& s : sing) s = std::sqrt(std::max(s, 0.0));
  }

  // Variation at the rounding level of the raw data is not structure.
  const double s_max = sing.empty() ? 0.0 : sing.front();
  const double tol = kRankTolerance * std::max(s_max, std::sqrt(raw_norm2));
  std::size_t rank = 0;
  while (rank < sing.size() && rank < n && sing[rank] > tol) ++rank;

  Matrix basis(dim, rank);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < rank; ++c) basis(r, c) = left(r, c);
  return AffineSubspace(std::move(mean), LinearSubspace(std::move(basis)));
}

inline AffineSubspace build_affine_subspace(std::span<const Patch> patches, std::size_t n) {
  std::vector<const Vector*> samples;
  samples.reserve(patches.size());
  for (const Patch& p : patches) samples.push_back(&p.features);
  return fit_affine_subspace(samples, n);
}

}  // namespace ast
