#include "mgsta/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mgsta {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw input_error(std::string(where) + ": size mismatch (" +
                      std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Vec& Vec::operator+=(const Vec& rhs) {
  require_same_size(size(), rhs.size(), "Vec::operator+=");
  for (std::size_t i = 0; i < size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& rhs) {
  require_same_size(size(), rhs.size(), "Vec::operator-=");
  for (std::size_t i = 0; i < size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

Vec& Vec::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

double dot(const Vec& a, const Vec& b) {
  require_same_size(a.size(), b.size(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const Vec& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m = std::max(m, std::fabs(v[i]));
  return m;
}

bool all_finite(const Vec& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()), data_() {
  data_.reserve(n_ * n_);
  for (const auto& row : rows) {
    if (row.size() != n_) {
      throw input_error("Mat: initializer rows must form a square matrix");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diag(const Vec& d) {
  Mat m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Mat Mat::transpose() const {
  Mat t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Mat& Mat::operator+=(const Mat& rhs) {
  require_same_size(n_, rhs.n_, "Mat::operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& rhs) {
  require_same_size(n_, rhs.n_, "Mat::operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
  require_same_size(a.n_, b.n_, "Mat::operator*");
  const std::size_t n = a.n_;
  Mat c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vec operator*(const Mat& a, const Vec& x) {
  require_same_size(a.n_, x.size(), "Mat*Vec");
  Vec y(a.n_);
  for (std::size_t i = 0; i < a.n_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.n_; ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

Mat outer(const Vec& a, const Vec& b) {
  require_same_size(a.size(), b.size(), "outer");
  Mat m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
  return m;
}

double norm_fro(const Mat& m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) acc += m(i, j) * m(i, j);
  return std::sqrt(acc);
}

double max_abs(const Mat& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      best = std::max(best, std::fabs(m(i, j)));
  return best;
}

bool all_finite(const Mat& m) {
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      if (!std::isfinite(m(i, j))) return false;
  return true;
}

SymMat SymMat::from_checked(const Mat& m, double rel_tol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i + 1; j < m.dim(); ++j)
      worst = std::max(worst, std::fabs(m(i, j) - m(j, i)));
  const double scale = std::max(max_abs(m), 1.0);
  if (worst > rel_tol * scale) {
    throw input_error("SymMat::from_checked: matrix is not symmetric (max "
                      "asymmetry " + std::to_string(worst) + ")");
  }
  Mat s(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    s(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < m.dim(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return SymMat(std::move(s));
}

SymMat sym(const Mat& m) {
  Mat s(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    s(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < m.dim(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return SymMat(std::move(s));
}

SymMat gram(const Mat& m) {
  const std::size_t n = m.dim();
  Mat g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += m(k, i) * m(k, j);
      g(i, j) = acc;
      g(j, i) = acc;
    }
  }
  return SymMat(std::move(g));
}

std::vector<double> eig_sym(const SymMat& s) {
  const std::size_t n = s.dim();
  Mat a = s.mat();
  if (n == 0) return {};
  if (n == 1) return {a(0, 0)};

  // Fixed absolute target derived from the input magnitude; zero matrices
  // are already diagonal.
  const double tol = 1e-14 * norm_fro(a);

  auto off_diag = [&a, n]() {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) acc += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(acc);
  };

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps && off_diag() > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= tol / (n * n)) continue;
        // Classic Jacobi rotation annihilating a(p,q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eigs(n);
  for (std::size_t i = 0; i < n; ++i) eigs[i] = a(i, i);
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

std::pair<double, double> eig_sym_extremes(const SymMat& s) {
  if (s.dim() == 0) throw input_error("eig_sym_extremes: empty matrix");
  const auto eigs = eig_sym(s);
  return {eigs.front(), eigs.back()};
}

Mat invert(const Mat& m, double rel_tol) {
  const std::size_t n = m.dim();
  if (n == 0) throw input_error("invert: empty matrix");
  Mat a = m;
  Mat inv = Mat::identity(n);
  const double scale = max_abs(m);
  const double threshold = rel_tol * (scale > 0.0 ? scale : 1.0);
  double det_acc = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot_row = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a(r, col)) > std::fabs(a(pivot_row, col))) pivot_row = r;
    }
    const double pivot = a(pivot_row, col);
    if (std::fabs(pivot) <= threshold) {
      throw singular_matrix_error(
          "invert: pivot magnitude " + std::to_string(std::fabs(pivot)) +
              " below threshold " + std::to_string(threshold) + " at column " +
              std::to_string(col),
          det_acc * pivot);
    }
    if (pivot_row != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(pivot_row, j), a(col, j));
        std::swap(inv(pivot_row, j), inv(col, j));
      }
      det_acc = -det_acc;
    }
    det_acc *= a(col, col);
    const double inv_pivot = 1.0 / a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) *= inv_pivot;
      inv(col, j) *= inv_pivot;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

double det(const Mat& m) {
  const std::size_t n = m.dim();
  if (n == 0) throw input_error("det: empty matrix");
  Mat a = m;
  double det_acc = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot_row = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a(r, col)) > std::fabs(a(pivot_row, col))) pivot_row = r;
    }
    if (a(pivot_row, col) == 0.0) return 0.0;
    if (pivot_row != col) {
      for (std::size_t j = col; j < n; ++j) std::swap(a(pivot_row, j), a(col, j));
      det_acc = -det_acc;
    }
    det_acc *= a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
    }
  }
  return det_acc;
}

double norm2(const Mat& m) {
  const auto [lo, hi] = eig_sym_extremes(gram(m));
  (void)lo;
  return std::sqrt(std::max(0.0, hi));
}

}  // namespace mgsta
