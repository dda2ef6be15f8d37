#pragma once

// Small dense linear algebra over either scalar mode. Dimensions here are
// tiny (n <= ~10), so the solvers favor robustness and exactness:
//
//   double    LU with partial pivoting; a pivot below 1e-13 * ||row||_inf
//             flags the system singular
//   Rational  fraction-free Gaussian elimination (Bareiss) on the
//             denominator-cleared integer matrix; singularity is exact

#include <algorithm>
#include <optional>
#include <vector>

#include "polarint/scalar.hpp"

namespace polarint {

template <typename S>
using Vec = std::vector<S>;

inline constexpr double kPivotRelTol = 1e-13;

template <typename S>
Vec<S> zero_vec(int n) {
  return Vec<S>(n, S(0));
}

template <typename S>
Vec<S> unit_vec(int n, int i) {
  Vec<S> v(n, S(0));
  v[i] = S(1);
  return v;
}

template <typename S>
Vec<S> vec_add(const Vec<S>& a, const Vec<S>& b) {
  Vec<S> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

template <typename S>
Vec<S> vec_sub(const Vec<S>& a, const Vec<S>& b) {
  Vec<S> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

template <typename S>
Vec<S> vec_scale(const S& c, const Vec<S>& a) {
  Vec<S> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

template <typename S>
S dot(const Vec<S>& a, const Vec<S>& b) {
  S acc(0);
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <typename S>
double inf_norm(const Vec<S>& a) {
  double m = 0.0;
  for (const S& x : a) m = std::max(m, std::fabs(to_double(x)));
  return m;
}

template <typename S>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols, S(0)) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  S& operator()(int i, int j) { return data_[size_t(i) * cols_ + j]; }
  const S& operator()(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

  Vec<S> apply(const Vec<S>& v) const {
    Vec<S> r(rows_, S(0));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  Mat operator*(const Mat& o) const {
    Mat r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k)
        for (int j = 0; j < o.cols_; ++j) r(i, j) += (*this)(i, k) * o(k, j);
    return r;
  }

  Mat operator+(const Mat& o) const {
    Mat r(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
    return r;
  }

  Mat operator-(const Mat& o) const {
    Mat r(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
    return r;
  }

  Mat scaled(const S& c) const {
    Mat r(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = c * data_[i];
    return r;
  }

  Mat transposed() const {
    Mat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<S> data_;
};

template <typename S>
struct LinearSolve {
  Vec<S> x;
  bool singular = false;
  double condition = 0.0;  // inf-norm condition estimate; 0 in rational mode
};

namespace detail {

// Clears denominators row by row; returns the integer matrix and the per-row
// scale applied (row_int = scale * row).
inline void clear_denominators(const std::vector<std::vector<Rational>>& a,
                               std::vector<std::vector<mpz_class>>* out,
                               std::vector<mpz_class>* scales) {
  size_t rows = a.size();
  out->assign(rows, {});
  scales->assign(rows, mpz_class(1));
  for (size_t i = 0; i < rows; ++i) {
    mpz_class l = 1;
    for (const Rational& x : a[i]) {
      mpz_class d = x.get_den();
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
      l = l / g * d;
    }
    (*scales)[i] = l;
    (*out)[i].reserve(a[i].size());
    for (const Rational& x : a[i]) {
      mpz_class v = x.get_num() * (l / x.get_den());
      (*out)[i].push_back(v);
    }
  }
}

// Bareiss fraction-free elimination on an integer matrix (in place, first
// ncols columns used as pivots). Returns false when rank-deficient in the
// pivot columns. sign gets the row-swap parity.
inline bool bareiss_eliminate(std::vector<std::vector<mpz_class>>* m, int npiv, int* sign) {
  auto& a = *m;
  int rows = int(a.size());
  int cols = rows ? int(a[0].size()) : 0;
  *sign = 1;
  mpz_class prev = 1;
  for (int k = 0; k < npiv; ++k) {
    int piv = -1;
    for (int i = k; i < rows; ++i)
      if (a[i][k] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return false;
    if (piv != k) {
      std::swap(a[piv], a[k]);
      *sign = -*sign;
    }
    for (int i = k + 1; i < rows; ++i) {
      for (int j = k + 1; j < cols; ++j) {
        mpz_class t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return true;
}

inline LinearSolve<Rational> solve_exact(const Mat<Rational>& A, const Vec<Rational>& b) {
  int n = A.rows();
  std::vector<std::vector<Rational>> aug(n, std::vector<Rational>(n + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug[i][j] = A(i, j);
    aug[i][n] = b[i];
  }
  std::vector<std::vector<mpz_class>> m;
  std::vector<mpz_class> scales;
  clear_denominators(aug, &m, &scales);
  int sign = 0;
  LinearSolve<Rational> out;
  if (!bareiss_eliminate(&m, n, &sign)) {
    out.singular = true;
    return out;
  }
  // Back substitution in exact rationals on the echelon form.
  out.x.assign(n, Rational(0));
  for (int i = n - 1; i >= 0; --i) {
    Rational acc(m[i][n]);
    for (int j = i + 1; j < n; ++j) acc -= Rational(m[i][j]) * out.x[j];
    if (m[i][i] == 0) {
      out.singular = true;
      return out;
    }
    out.x[i] = acc / Rational(m[i][i]);
  }
  return out;
}

inline Rational det_exact(const Mat<Rational>& A) {
  int n = A.rows();
  if (n == 0) return Rational(1);
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rows[i][j] = A(i, j);
  std::vector<std::vector<mpz_class>> m;
  std::vector<mpz_class> scales;
  clear_denominators(rows, &m, &scales);
  int sign = 0;
  if (!bareiss_eliminate(&m, n - 1, &sign)) return Rational(0);
  mpz_class den = 1;
  for (const mpz_class& s : scales) den *= s;
  mpz_class num = m[n - 1][n - 1];
  if (sign < 0) num = -num;
  Rational det(num, den);
  det.canonicalize();
  return det;
}

struct LuFactors {
  std::vector<std::vector<double>> lu;
  std::vector<int> perm;
  bool singular = false;
  int sign = 1;
};

inline LuFactors lu_factor(const Mat<double>& A) {
  int n = A.rows();
  LuFactors f;
  f.lu.assign(n, std::vector<double>(n));
  f.perm.resize(n);
  std::vector<double> row_norm(n, 0.0);
  for (int i = 0; i < n; ++i) {
    f.perm[i] = i;
    for (int j = 0; j < n; ++j) {
      f.lu[i][j] = A(i, j);
      row_norm[i] = std::max(row_norm[i], std::fabs(A(i, j)));
    }
  }
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(f.lu[i][k]) > std::fabs(f.lu[piv][k])) piv = i;
    double scale = std::max(row_norm[f.perm[piv]], 1e-300);
    if (std::fabs(f.lu[piv][k]) < kPivotRelTol * scale) {
      f.singular = true;
      return f;
    }
    if (piv != k) {
      std::swap(f.lu[piv], f.lu[k]);
      std::swap(f.perm[piv], f.perm[k]);
      f.sign = -f.sign;
    }
    for (int i = k + 1; i < n; ++i) {
      f.lu[i][k] /= f.lu[k][k];
      for (int j = k + 1; j < n; ++j) f.lu[i][j] -= f.lu[i][k] * f.lu[k][j];
    }
  }
  return f;
}

inline Vec<double> lu_solve(const LuFactors& f, const Vec<double>& b) {
  int n = int(f.perm.size());
  Vec<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= f.lu[i][j] * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= f.lu[i][j] * x[j];
    x[i] /= f.lu[i][i];
  }
  return x;
}

}  // namespace detail

template <typename S>
LinearSolve<S> solve_linear(const Mat<S>& A, const Vec<S>& b) {
  if (A.rows() != A.cols() || A.rows() != int(b.size()))
    throw scalar_error("solve_linear: shape mismatch");
  if constexpr (scalar_traits<S>::exact) {
    return detail::solve_exact(A, b);
  } else {
    auto f = detail::lu_factor(A);
    LinearSolve<double> out;
    if (f.singular) {
      out.singular = true;
      return out;
    }
    out.x = detail::lu_solve(f, b);
    // One refinement pass with a long double residual; keeps the defining
    // residual near machine level even for small pivots.
    int n = A.rows();
    Vec<double> r(n);
    for (int i = 0; i < n; ++i) {
      long double acc = b[i];
      for (int j = 0; j < n; ++j) acc -= (long double)A(i, j) * out.x[j];
      r[i] = double(acc);
    }
    Vec<double> dx = detail::lu_solve(f, r);
    for (int i = 0; i < n; ++i) out.x[i] += dx[i];
    // Condition estimate from the explicit inverse; n is tiny.
    double anorm = 0.0, ainvnorm = 0.0;
    std::vector<Vec<double>> inv_cols(n);
    for (int j = 0; j < n; ++j) inv_cols[j] = detail::lu_solve(f, unit_vec<double>(n, j));
    for (int i = 0; i < n; ++i) {
      double s = 0.0, si = 0.0;
      for (int j = 0; j < n; ++j) {
        s += std::fabs(A(i, j));
        si += std::fabs(inv_cols[j][i]);
      }
      anorm = std::max(anorm, s);
      ainvnorm = std::max(ainvnorm, si);
    }
    out.condition = anorm * ainvnorm;
    return out;
  }
}

template <typename S>
S determinant(const Mat<S>& A) {
  if (A.rows() != A.cols()) throw scalar_error("determinant: not square");
  if constexpr (scalar_traits<S>::exact) {
    return detail::det_exact(A);
  } else {
    auto f = detail::lu_factor(A);
    if (f.singular) return 0.0;
    double d = f.sign;
    for (int i = 0; i < A.rows(); ++i) d *= f.lu[i][i];
    return d;
  }
}

template <typename S>
std::optional<Mat<S>> inverse(const Mat<S>& A) {
  int n = A.rows();
  Mat<S> inv(n, n);
  for (int j = 0; j < n; ++j) {
    auto s = solve_linear(A, unit_vec<S>(n, j));
    if (s.singular) return std::nullopt;
    for (int i = 0; i < n; ++i) inv(i, j) = s.x[i];
  }
  return inv;
}

}  // namespace polarint
