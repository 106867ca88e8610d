#pragma once

// Distances between linear and affine subspaces.
//
// A linear subspace is a point on the Grassmann manifold, held as a D x r
// matrix with orthonormal columns. An affine subspace adds an origin.
// Every quadratic form below is evaluated matrix-free; nothing D x D is
// ever materialized.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <utility>

#include "ast/error.hpp"
#include "ast/numerics.hpp"

namespace ast {

class LinearSubspace {
 public:
  /// Empty subspace (rank 0) of the given ambient dimension.
  explicit LinearSubspace(std::size_t ambient_dim = 0) : basis_(ambient_dim, 0) {}

  /// Takes ownership of an orthonormal D x r basis; checks orthonormality to 1e-8.
  explicit LinearSubspace(Matrix basis) : basis_(std::move(basis)) {
    if (basis_.cols() > basis_.rows()) throw InvalidInput("subspace rank exceeds ambient dimension");
    if (!all_finite(basis_.data())) throw InvalidInput("subspace basis has non-finite entries");
    const Matrix g = gram(basis_);
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j)
        if (std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) > 1e-8) {
          throw InvalidInput("subspace basis is not orthonormal");
        }
  }

  std::size_t ambient_dim() const noexcept { return basis_.rows(); }
  std::size_t rank() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }

 private:
  Matrix basis_;
};

class AffineSubspace {
 public:
  AffineSubspace() = default;

  AffineSubspace(Vector origin, LinearSubspace subspace)
      : origin_(std::move(origin)), subspace_(std::move(subspace)) {
    if (origin_.size() != subspace_.ambient_dim()) {
      throw InvalidInput("affine subspace origin and basis dimensions differ");
    }
    if (!all_finite(origin_)) throw InvalidInput("affine subspace origin has non-finite entries");
  }

  std::size_t ambient_dim() const noexcept { return origin_.size(); }
  std::size_t rank() const noexcept { return subspace_.rank(); }
  const Vector& origin() const noexcept { return origin_; }
  const LinearSubspace& subspace() const noexcept { return subspace_; }
  const Matrix& basis() const noexcept { return subspace_.basis(); }

 private:
  Vector origin_;
  LinearSubspace subspace_;
};

namespace detail {

inline void require_same_ambient(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidInput("subspaces live in different ambient dimensions");
}

// Singular values (descending) of a small matrix, from the eigenvectors of
// its Gram matrix. Each value is recomputed as |A v| rather than taken as
// sqrt(lambda), which keeps values near zero accurate to about eps |A|.
inline Vector singular_values(const Matrix& a) {
  const Matrix v = sym_eig(gram(a)).vectors;
  const Matrix av = a * v;
  Vector values(av.cols(), 0.0);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    auto row = av.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) values[j] += row[j] * row[j];
  }
  for (double& x : values) x = std::sqrt(x);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

}  // namespace detail

/// Principal angles between two linear subspaces, ascending, each in [0, pi/2].
///
/// Cosines come from the singular values of X^T Y. For angles below pi/4
/// the cosine is too flat to invert accurately, so those angles are taken
/// from the sines instead: singular values of the component of the
/// lower-rank basis orthogonal to the other span.
inline Vector principal_angles(const LinearSubspace& x, const LinearSubspace& y) {
  detail::require_same_ambient(x.ambient_dim(), y.ambient_dim());
  const Matrix* big = &x.basis();
  const Matrix* small = &y.basis();
  if (big->cols() < small->cols()) std::swap(big, small);
  const std::size_t l = small->cols();
  if (l == 0) return {};

  const Matrix c = cross(*big, *small);  // rb x l
  Vector cosines = detail::singular_values(c);

  Vector angles(l);
  const bool any_small = std::any_of(cosines.begin(), cosines.end(),
                                     [](double v) { return v * v > 0.5; });
  Vector sines;
  if (any_small) {
    // Component of the smaller basis orthogonal to the larger span.
    Matrix resid = (*big) * c;
    auto rd = resid.data();
    auto sd = small->data();
    for (std::size_t i = 0; i < rd.size(); ++i) rd[i] = sd[i] - rd[i];
    sines = detail::singular_values(resid);
    std::reverse(sines.begin(), sines.end());  // ascending, pairs with descending cosines
  }

  for (std::size_t i = 0; i < l; ++i) {
    const double cs = std::clamp(cosines[i], 0.0, 1.0);
    if (any_small && cs * cs > 0.5) {
      angles[i] = std::asin(std::clamp(sines[i], 0.0, 1.0));
    } else {
      angles[i] = std::acos(cs);
    }
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

/// Grassmann geodesic distance, the 2-norm of the principal-angle vector.
inline double geodesic_distance(const LinearSubspace& x, const LinearSubspace& y) {
  double acc = 0.0;
  for (double t : principal_angles(x, y)) acc += t * t;
  return std::sqrt(acc);
}

/// Projection distance, the 2-norm of the sines of the principal angles.
inline double projection_distance(const LinearSubspace& x, const LinearSubspace& y) {
  double acc = 0.0;
  for (double t : principal_angles(x, y)) {
    const double s = std::sin(t);
    acc += s * s;
  }
  return std::sqrt(acc);
}

/// delta^T (2I - Ua Ua^T - Ub Ub^T) delta with delta = mu_a - mu_b.
inline double origin_mahalanobis(const AffineSubspace& a, const AffineSubspace& b) {
  detail::require_same_ambient(a.ambient_dim(), b.ambient_dim());
  const std::size_t dim = a.ambient_dim();
  const Matrix& ua = a.basis();
  const Matrix& ub = b.basis();
  Vector pa(ua.cols(), 0.0);
  Vector pb(ub.cols(), 0.0);
  double dd = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    const double d = a.origin()[r] - b.origin()[r];
    dd += d * d;
    auto ra = ua.row(r);
    for (std::size_t j = 0; j < ra.size(); ++j) pa[j] += ra[j] * d;
    auto rb = ub.row(r);
    for (std::size_t j = 0; j < rb.size(); ++j) pb[j] += rb[j] * d;
  }
  const double value = 2.0 * dd - (squared_norm(pa) + squared_norm(pb));
  return std::max(value, 0.0);
}

/// Geodesic distance between the bases plus alpha times the origin Mahalanobis term.
inline double affine_distance(const AffineSubspace& a, const AffineSubspace& b, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("alpha must be finite and >= 0");
  detail::require_same_ambient(a.ambient_dim(), b.ambient_dim());
  const double geo = geodesic_distance(a.subspace(), b.subspace());
  if (alpha == 0.0) return geo;
  return geo + alpha * origin_mahalanobis(a, b);
}

/// Symmetric KL divergence between N(mu_i, sigma2 I + U_i U_i^T), in the
/// orthonormal-basis closed form. Both bases must have the same rank.
inline double kl_distance(const AffineSubspace& a, const AffineSubspace& b, double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw InvalidInput("kl_distance: sigma^2 must be > 0");
  detail::require_same_ambient(a.ambient_dim(), b.ambient_dim());
  if (a.rank() != b.rank()) throw InvalidInput("kl_distance: basis ranks differ");
  const double n = static_cast<double>(a.rank());
  const Matrix c = cross(a.basis(), b.basis());
  const double trace = squared_norm(c.data());
  const double quad = origin_mahalanobis(a, b);
  return quad / (2.0 * sigma2) + (2.0 * n - 2.0 * trace) / (2.0 * sigma2 * (sigma2 + 1.0));
}

}  // namespace ast
