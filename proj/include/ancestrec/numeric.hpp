#pragma once

// Scalar types, small dense matrices and combinatorial helpers shared by every
// module. All numerical code is templated on the real type R (double or quad)
// and uses complex_t<R> for coefficients.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/complex128.hpp>
#include <boost/multiprecision/float128.hpp>

namespace ancestrec {

using quad = boost::multiprecision::float128;

template <class R>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  using complex = std::complex<double>;
  static constexpr const char* name = "double";
  static constexpr double epsilon = 2.220446049250313e-16;
};

template <>
struct scalar_traits<quad> {
  using complex = boost::multiprecision::complex128;
  static constexpr const char* name = "quad";
  static constexpr double epsilon = 1.925929944387236e-34;
};

template <class R>
using complex_t = typename scalar_traits<R>::complex;

template <class C>
struct real_of;
template <>
struct real_of<std::complex<double>> {
  using type = double;
};
template <>
struct real_of<boost::multiprecision::complex128> {
  using type = quad;
};
template <class C>
using real_t = typename real_of<C>::type;

template <class C>
inline constexpr double epsilon_of = scalar_traits<real_t<C>>::epsilon;

/// Base class for all library errors; the C API maps it to an error code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a numeric procedure fails to reach its tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

template <class C>
inline double cabs(const C& z) {
  using std::abs;
  return static_cast<double>(abs(z));
}

template <class C>
inline std::complex<double> to_cd(const C& z) {
  using std::imag;
  using std::real;
  return {static_cast<double>(real(z)), static_cast<double>(imag(z))};
}

template <class C>
inline C from_cd(const std::complex<double>& z) {
  return C(z.real(), z.imag());
}

template <class C>
inline C csqrt(const C& z) {
  using std::sqrt;
  return sqrt(z);
}

/// Principal branch square root with an explicit sign flip.
template <class C>
inline C branch_sqrt(const C& z, int sign) {
  C r = csqrt(z);
  return sign < 0 ? -r : r;
}

/// (2k-1)!! with the empty-product convention (-1)!! = 1; also (-3)!! = -1 etc.
/// are not needed and rejected.
inline double double_factorial_odd(int k) {
  if (k < 0) throw std::invalid_argument("double_factorial_odd: negative index");
  double r = 1.0;
  for (int j = 2 * k - 1; j > 1; j -= 2) r *= j;
  return r;
}

/// Generalized binomial coefficient binom(x, m) for real x.
inline double binom_real(double x, int m) {
  double r = 1.0;
  for (int j = 0; j < m; ++j) r *= (x - j) / (j + 1);
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int j = 2; j <= n; ++j) r *= j;
  return r;
}

/// Dense row-major matrix over a (possibly multiprecision) complex type.
/// Sizes here are tiny (N <= 8), so clarity wins over blocking.
template <class C>
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, C(0)) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = C(1);
    return m;
  }
  static Mat diagonal(const std::vector<C>& d) {
    Mat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return a_.empty(); }

  C& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const C& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat& operator+=(const Mat& o) {
    check_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    check_same(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Mat& operator*=(const C& s) {
    for (auto& x : a_) x *= s;
    return *this;
  }
  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(Mat a, const C& s) { return a *= s; }
  friend Mat operator*(const C& s, Mat a) { return a *= s; }
  friend Mat operator-(Mat a) {
    for (auto& x : a.a_) x = -x;
    return a;
  }
  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Mat: shape mismatch in product");
    Mat c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const C& aik = a(i, k);
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend std::vector<C> operator*(const Mat& a, const std::vector<C>& v) {
    if (a.cols_ != v.size()) throw std::invalid_argument("Mat: shape mismatch in mat-vec");
    std::vector<C> r(a.rows_, C(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) r[i] += a(i, j) * v[j];
    return r;
  }

  /// Max-abs entry norm.
  double norm() const {
    double m = 0.0;
    for (const auto& x : a_) m = std::max(m, cabs(x));
    return m;
  }

  /// Inverse by Gauss-Jordan elimination with partial pivoting.
  Mat inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("Mat: inverse of non-square matrix");
    const std::size_t n = rows_;
    Mat a = *this;
    Mat inv = identity(n);
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (cabs(a(r, col)) > cabs(a(piv, col))) piv = r;
      if (cabs(a(piv, col)) == 0.0) throw NumericError("Mat: singular matrix");
      if (piv != col)
        for (std::size_t j = 0; j < n; ++j) {
          std::swap(a(piv, j), a(col, j));
          std::swap(inv(piv, j), inv(col, j));
        }
      const C p = C(1) / a(col, col);
      for (std::size_t j = 0; j < n; ++j) {
        a(col, j) *= p;
        inv(col, j) *= p;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        const C f = a(r, col);
        if (cabs(f) == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
          a(r, j) -= f * a(col, j);
          inv(r, j) -= f * inv(col, j);
        }
      }
    }
    return inv;
  }

  C trace() const {
    C s(0);
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
  }

  template <class C2>
  Mat<C2> cast() const {
    Mat<C2> m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = from_cd<C2>(to_cd((*this)(i, j)));
    return m;
  }

 private:
  void check_same(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Mat: shape mismatch");
  }
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<C> a_;
};

/// Truncated z-series of square matrices: coeffs[k] multiplies z^k.
template <class C>
struct MatrixSeries {
  std::vector<Mat<C>> coeffs;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  std::size_t dim() const { return coeffs.empty() ? 0 : coeffs.front().rows(); }

  /// Series with z -> -z.
  MatrixSeries reflect() const {
    MatrixSeries r = *this;
    for (std::size_t k = 1; k < r.coeffs.size(); k += 2) r.coeffs[k] = -r.coeffs[k];
    return r;
  }
  MatrixSeries transpose() const {
    MatrixSeries r = *this;
    for (auto& m : r.coeffs) m = m.transpose();
    return r;
  }
  friend MatrixSeries operator*(const MatrixSeries& a, const MatrixSeries& b) {
    const int K = std::min(a.order(), b.order());
    MatrixSeries c;
    const std::size_t n = a.dim();
    c.coeffs.assign(K + 1, Mat<C>(n, n));
    for (int i = 0; i <= K; ++i)
      for (int j = 0; i + j <= K; ++j) c.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
    return c;
  }
};

}  // namespace ancestrec
