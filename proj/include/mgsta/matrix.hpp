/**
 * @file matrix.hpp
 * @brief Small dense vector/matrix kernel for low-dimensional control math.
 *
 * Everything here targets n <= 6. Correctness and numerical robustness win
 * over speed: the symmetric eigensolver is a cyclic Jacobi iteration with a
 * fixed off-diagonal tolerance, and inversion is Gauss-Jordan with partial
 * pivoting and a relative singularity threshold.
 */
#pragma once

#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "mgsta/errors.hpp"

namespace mgsta {

/// Dense real vector of fixed runtime length.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vec(std::initializer_list<double> init) : data_(init) {}

  std::size_t size() const noexcept { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  Vec& operator+=(const Vec& rhs);
  Vec& operator-=(const Vec& rhs);
  Vec& operator*=(double s);

  friend Vec operator+(Vec lhs, const Vec& rhs) { return lhs += rhs; }
  friend Vec operator-(Vec lhs, const Vec& rhs) { return lhs -= rhs; }
  friend Vec operator*(double s, Vec v) { return v *= s; }
  friend Vec operator*(Vec v, double s) { return v *= s; }
  friend Vec operator-(Vec v) { return v *= -1.0; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

 private:
  std::vector<double> data_;
};

/// Euclidean inner product. Throws input_error on size mismatch.
double dot(const Vec& a, const Vec& b);
/// Euclidean norm.
double norm(const Vec& v);
/// Max-abs norm.
double norm_inf(const Vec& v);
/// True if every entry is finite.
bool all_finite(const Vec& v);

/// Dense real square matrix of fixed runtime dimension, row-major.
class Mat {
 public:
  Mat() = default;
  explicit Mat(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  /// Builds from nested initializer lists; all rows must share the length.
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  /// Diagonal matrix from a vector.
  static Mat diag(const Vec& d);

  std::size_t dim() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }

  Mat transpose() const;

  Mat& operator+=(const Mat& rhs);
  Mat& operator-=(const Mat& rhs);
  Mat& operator*=(double s);

  friend Mat operator+(Mat lhs, const Mat& rhs) { return lhs += rhs; }
  friend Mat operator-(Mat lhs, const Mat& rhs) { return lhs -= rhs; }
  friend Mat operator*(double s, Mat m) { return m *= s; }
  friend Mat operator*(Mat m, double s) { return m *= s; }
  friend Mat operator-(Mat m) { return m *= -1.0; }

  friend Mat operator*(const Mat& a, const Mat& b);
  friend Vec operator*(const Mat& a, const Vec& x);

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Rank-one product a * b^T.
Mat outer(const Vec& a, const Vec& b);
/// Frobenius norm.
double norm_fro(const Mat& m);
/// Max absolute entry.
double max_abs(const Mat& m);
/// True if every entry is finite.
bool all_finite(const Mat& m);

/**
 * Square matrix with an exactly-symmetric invariant: entry (i,j) == (j,i)
 * bit-for-bit, enforced by construction. Obtain instances through sym(),
 * gram(), or from_checked().
 */
class SymMat {
 public:
  /// Validates near-symmetry of `m` (tolerance relative to its magnitude),
  /// then stores the exactly symmetrized matrix. Throws input_error if the
  /// asymmetry exceeds the tolerance.
  static SymMat from_checked(const Mat& m, double rel_tol = 1e-9);

  std::size_t dim() const noexcept { return m_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Mat& mat() const noexcept { return m_; }

  friend SymMat sym(const Mat& m);
  friend SymMat gram(const Mat& m);

 private:
  explicit SymMat(Mat m) : m_(std::move(m)) {}
  Mat m_;
};

/// Symmetric part (M + M^T) / 2. Exactly symmetric in floating point.
SymMat sym(const Mat& m);
/// Gram matrix M^T M. Exactly symmetric, positive semidefinite.
SymMat gram(const Mat& m);

/// Full sorted (ascending) spectrum of a symmetric matrix, via cyclic Jacobi
/// rotations driven to off-diagonal magnitude <= 1e-14 * ||S||_F.
std::vector<double> eig_sym(const SymMat& s);

/// Extreme eigenvalues (min, max) of a symmetric matrix.
std::pair<double, double> eig_sym_extremes(const SymMat& s);

/**
 * Matrix inverse via Gauss-Jordan elimination with partial pivoting.
 * A pivot below rel_tol * max|M| raises singular_matrix_error carrying the
 * determinant estimate accumulated so far.
 */
Mat invert(const Mat& m, double rel_tol = 1e-12);

/// Determinant via the same pivoted elimination (no singularity throw).
double det(const Mat& m);

/// Spectral norm ||M||_2 = sqrt(lambda_max(M^T M)).
double norm2(const Mat& m);

}  // namespace mgsta
