#pragma once

// Small dense linear algebra and the deterministic random source.
//
// Sizes here are tiny in one dimension (k <= ~11 columns) and moderate in
// the other (D = 1024 rows), so the tall SVD goes through the k x k Gram
// matrix and a cyclic Jacobi eigensolver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <numeric>
#include <type_traits>
#include <span>
#include <utility>
#include <vector>

#include "ast/error.hpp"

namespace ast {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw InvalidInput("matrix entry count does not match its shape");
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> entries;
    entries.reserve(r * c);
    for (const auto& row : rows) {
      if (row.size() != c) throw InvalidInput("ragged matrix rows");
      entries.insert(entries.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(entries));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  Vector col(std::size_t c) const {
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  void set_col(std::size_t c, std::span<const double> values) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double squared_norm(std::span<const double> a) { return dot(a, a); }

namespace detail {

// The kernels below are dominated by tall matrices with a handful of
// columns. Column counts up to kFixedCols are turned into compile-time
// constants so the per-row inner loops unroll; 0 means "use the runtime value".
inline constexpr std::size_t kFixedCols = 8;

template <std::size_t N = 1, typename F>
decltype(auto) with_cols(std::size_t n, F&& f) {
  if constexpr (N > kFixedCols) {
    return f(std::integral_constant<std::size_t, 0>{});
  } else {
    if (n == N) return f(std::integral_constant<std::size_t, N>{});
    return with_cols<N + 1>(n, std::forward<F>(f));
  }
}

template <std::size_t KA, std::size_t KB>
void product_kernel(const Matrix& a, const Matrix& b, Matrix& out) {
  const std::size_t ka = KA ? KA : a.cols();
  const std::size_t kb = KB ? KB : b.cols();
  const double* __restrict pa = a.data().data();
  const double* __restrict pb = b.data().data();
  double* __restrict po = out.data().data();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = 0; p < ka; ++p) {
      const double aip = pa[i * ka + p];
      for (std::size_t j = 0; j < kb; ++j) po[i * kb + j] += aip * pb[p * kb + j];
    }
  }
}

template <std::size_t KA, std::size_t KB>
void cross_kernel(const Matrix& a, const Matrix& b, double* __restrict out) {
  const std::size_t ka = KA ? KA : a.cols();
  const std::size_t kb = KB ? KB : b.cols();
  const double* __restrict pa = a.data().data();
  const double* __restrict pb = b.data().data();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t i = 0; i < ka; ++i) {
      const double ai = pa[r * ka + i];
      for (std::size_t j = 0; j < kb; ++j) out[i * kb + j] += ai * pb[r * kb + j];
    }
  }
}

template <std::size_t K>
void gram_kernel(const Matrix& a, double* __restrict out) {
  const std::size_t k = K ? K : a.cols();
  const double* __restrict pa = a.data().data();
  // Full square accumulation unrolls better than the triangle; the caller
  // mirrors the upper half so the result is exactly symmetric.
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      const double ai = pa[r * k + i];
      for (std::size_t j = 0; j < k; ++j) out[i * k + j] += ai * pa[r * k + j];
    }
  }
}

}  // namespace detail

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("matrix product shape mismatch");
  Matrix out(a.rows(), b.cols());
  detail::with_cols(a.cols(), [&](auto ka) {
    detail::with_cols(b.cols(), [&](auto kb) { detail::product_kernel<ka, kb>(a, b, out); });
  });
  return out;
}

/// a^T * b without forming the transpose. Rows are streamed once, so this is
/// the cheap way to multiply two tall D x r bases.
inline Matrix cross(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw InvalidInput("cross product row mismatch");
  std::vector<double> acc(a.cols() * b.cols(), 0.0);
  detail::with_cols(a.cols(), [&](auto ka) {
    detail::with_cols(b.cols(), [&](auto kb) { detail::cross_kernel<ka, kb>(a, b, acc.data()); });
  });
  return Matrix(a.cols(), b.cols(), std::move(acc));
}

/// a^T * a, exactly symmetric.
inline Matrix gram(const Matrix& a) {
  const std::size_t k = a.cols();
  std::vector<double> acc(k * k, 0.0);
  detail::with_cols(k, [&](auto kk) { detail::gram_kernel<kk>(a, acc.data()); });
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j) acc[i * k + j] = acc[j * k + i];
  return Matrix(k, k, std::move(acc));
}

/// a^T * v.
inline Vector transpose_times(const Matrix& a, std::span<const double> v) {
  if (a.rows() != v.size()) throw InvalidInput("transpose_times shape mismatch");
  Vector out(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto ar = a.row(r);
    const double vr = v[r];
    for (std::size_t j = 0; j < ar.size(); ++j) out[j] += ar[j] * vr;
  }
  return out;
}

namespace detail {

// Flip column c of each listed matrix so that the largest-magnitude entry of
// `ref` column c is positive (first occurrence wins ties).
inline bool leading_entry_negative(const Matrix& ref, std::size_t c) {
  double best = 0.0;
  for (std::size_t r = 0; r < ref.rows(); ++r) {
    if (std::abs(ref(r, c)) > std::abs(best)) best = ref(r, c);
  }
  return best < 0.0;
}

inline void negate_col(Matrix& m, std::size_t c) {
  for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = -m(r, c);
}

inline void swap_cols(Matrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t r = 0; r < m.rows(); ++r) std::swap(m(r, a), m(r, b));
}

}  // namespace detail

struct SymEig {
  Matrix vectors;  ///< eigenvectors as columns
  Vector values;   ///< descending
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
inline SymEig sym_eig(const Matrix& s) {
  if (s.rows() != s.cols()) throw InvalidInput("sym_eig: matrix is not square");
  if (!all_finite(s.data())) throw InvalidInput("sym_eig: non-finite entry");
  const std::size_t n = s.rows();

  double max_abs = 0.0;
  for (double v : s.data()) max_abs = std::max(max_abs, std::abs(v));
  const double sym_tol = 1e-12 * std::max(1.0, max_abs);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(s(i, j) - s(j, i)) > sym_tol) {
        throw InvalidInput("sym_eig: matrix is not symmetric");
      }

  Matrix a = s;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
  Matrix q = Matrix::identity(n);

  double frob = 0.0;
  for (double v : a.data()) frob += v * v;
  frob = std::sqrt(frob);

  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t r = p + 1; r < n; ++r) off += a(p, r) * a(p, r);
    if (off == 0.0 || std::sqrt(off) <= 1e-15 * frob) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apr = a(p, r);
        if (apr == 0.0) continue;
        const double app = a(p, p);
        const double arr = a(r, r);
        // Negligible against both diagonal entries: drop it.
        const double g = 100.0 * std::abs(apr);
        if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(arr) + g == std::abs(arr)) {
          a(p, r) = a(r, p) = 0.0;
          continue;
        }
        const double theta = (arr - app) / (2.0 * apr);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akr = a(k, r);
          a(k, p) = c * akp - sn * akr;
          a(k, r) = sn * akp + c * akr;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double ark = a(r, k);
          a(p, k) = c * apk - sn * ark;
          a(r, k) = sn * apk + c * ark;
        }
        a(p, r) = a(r, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double qkp = q(k, p);
          const double qkr = q(k, r);
          q(k, p) = c * qkp - sn * qkr;
          q(k, r) = sn * qkp + c * qkr;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymEig out{Matrix(n, n), Vector(n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = q(r, order[c]);
    if (detail::leading_entry_negative(out.vectors, c)) detail::negate_col(out.vectors, c);
  }
  return out;
}

struct ThinSvd {
  Matrix u;  ///< m x q, orthonormal columns
  Vector s;  ///< q values, descending, >= 0
  Matrix v;  ///< k x q, orthonormal columns
};

namespace detail {

// Orthogonalize column c of `u` against columns [0, c) twice; returns the
// remaining norm after the second pass (column is left unnormalized).
inline double orthogonalize_column(Matrix& u, std::size_t c) {
  const std::size_t m = u.rows();
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < c; ++j) {
      double proj = 0.0;
      for (std::size_t r = 0; r < m; ++r) proj += u(r, j) * u(r, c);
      for (std::size_t r = 0; r < m; ++r) u(r, c) -= proj * u(r, j);
    }
  }
  double norm = 0.0;
  for (std::size_t r = 0; r < m; ++r) norm += u(r, c) * u(r, c);
  return std::sqrt(norm);
}

}  // namespace detail

/// Rank tolerance relative to the largest singular value.
inline constexpr double kRankTolerance = 1e-10;

/// Thin SVD of a tall matrix (rows >= cols) via the Gram matrix.
///
/// Singular values are taken as |A v_j| rather than sqrt(lambda_j) since that
/// keeps small values accurate. Values below kRankTolerance * s_max are set
/// to zero and their U columns completed to an orthonormal set. When
/// `max_rank` is given only that many leading triplets are returned.
inline ThinSvd thin_svd(const Matrix& a, std::size_t max_rank = std::numeric_limits<std::size_t>::max()) {
  if (!all_finite(a.data())) throw InvalidInput("thin_svd: non-finite entry");
  const std::size_t m = a.rows();
  const std::size_t k = a.cols();
  if (m < k) throw InvalidInput("thin_svd: matrix must have rows >= cols");
  const std::size_t q = std::min(k, max_rank);

  const SymEig eig = sym_eig(gram(a));
  const Matrix w = a * eig.vectors;
  Vector norms(k, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    auto wr = w.row(r);
    for (std::size_t j = 0; j < k; ++j) norms[j] += wr[j] * wr[j];
  }
  for (double& n : norms) n = std::sqrt(n);
  // Gram eigen order and |A v| order can disagree at the noise floor.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

  ThinSvd out{Matrix(m, q), Vector(q), Matrix(k, q)};
  const double s_max = k == 0 ? 0.0 : norms[order[0]];
  const double tol = kRankTolerance * s_max;
  std::size_t rank = 0;
  while (rank < q && s_max > 0.0 && norms[order[rank]] > tol) ++rank;

  for (std::size_t j = 0; j < q; ++j) {
    out.s[j] = j < rank ? norms[order[j]] : 0.0;
    for (std::size_t r = 0; r < k; ++r) out.v(r, j) = eig.vectors(r, order[j]);
  }
  Vector inv(rank);
  for (std::size_t j = 0; j < rank; ++j) inv[j] = 1.0 / out.s[j];
  for (std::size_t r = 0; r < m; ++r) {
    auto src = w.row(r);
    auto dst = out.u.row(r);
    for (std::size_t j = 0; j < rank; ++j) dst[j] = src[order[j]] * inv[j];
  }

  // Columns from small singular values can lose orthogonality; repair only then.
  const Matrix uu = gram(out.u);
  bool orthonormal = true;
  for (std::size_t i = 0; i < rank && orthonormal; ++i)
    for (std::size_t j = 0; j < rank; ++j)
      if (std::abs(uu(i, j) - (i == j ? 1.0 : 0.0)) > 1e-13) {
        orthonormal = false;
        break;
      }
  if (!orthonormal) {
    for (std::size_t j = 0; j < rank; ++j) {
      const double norm = detail::orthogonalize_column(out.u, j);
      for (std::size_t r = 0; r < m; ++r) out.u(r, j) /= norm;
    }
  }

  // Complete the null columns from the standard basis.
  std::size_t candidate = 0;
  for (std::size_t j = rank; j < q; ++j) {
    for (;; ++candidate) {
      for (std::size_t r = 0; r < m; ++r) out.u(r, j) = r == candidate ? 1.0 : 0.0;
      const double norm = detail::orthogonalize_column(out.u, j);
      if (norm > 0.5) {
        for (std::size_t r = 0; r < m; ++r) out.u(r, j) /= norm;
        ++candidate;
        break;
      }
    }
  }

  for (std::size_t j = 0; j < q; ++j) {
    if (detail::leading_entry_negative(out.u, j)) {
      detail::negate_col(out.u, j);
      detail::negate_col(out.v, j);
    }
  }
  return out;
}

/// splitmix64 stream. Single owner; never share across threads.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed = 0) noexcept : state_(seed) {}

  std::uint64_t state() const noexcept { return state_; }

  std::uint64_t next_u64() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in the open interval (0, 1).
  double next_uniform() noexcept {
    constexpr double kScale = 0x1.0p-53;
    const std::uint64_t bits = next_u64() >> 11;
    return bits == 0 ? kScale : static_cast<double>(bits) * kScale;
  }

  /// Box-Muller, cosine branch only. Always consumes two uniforms.
  double next_gaussian(double mean, double stddev) {
    if (!(stddev >= 0.0) || !std::isfinite(stddev)) {
      throw InvalidInput("next_gaussian: standard deviation must be finite and >= 0");
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    if (stddev == 0.0) return mean;
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
  }

 private:
  std::uint64_t state_;
};

}  // namespace ast
