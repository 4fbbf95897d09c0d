#pragma once

// Truncated Puiseux series in s = (lambda - u)^{1/2} and complex polynomials.
//
// Exponents are integers in units of s. Coefficients past trunc() are unknown,
// not zero; every operation propagates the tightest valid truncation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ancestrec/numeric.hpp"

namespace ancestrec {

/// Truncation order used for series that are known exactly.
inline constexpr int kExact = 1 << 28;

inline int trunc_add(int a, int b) {
  if (a >= kExact / 2 || b >= kExact / 2) return kExact;
  return a + b;
}

template <class C>
class PuiseuxSeries {
 public:
  PuiseuxSeries() = default;
  /// Zero series known through exponent `trunc`.
  PuiseuxSeries(C base, int trunc) : base_(base), lo_(0), trunc_(trunc) {}

  /// c * s^e, exact.
  static PuiseuxSeries monomial(C base, int e, C c, int trunc = kExact) {
    PuiseuxSeries p(base, trunc);
    if (e <= trunc) p.set(e, c);
    return p;
  }
  static PuiseuxSeries constant(C base, C c, int trunc = kExact) { return monomial(base, 0, c, trunc); }

  const C& base_point() const { return base_; }
  int trunc() const { return trunc_; }
  bool exact() const { return trunc_ >= kExact / 2; }

  /// Lowest stored exponent (coefficients below are zero).
  int low() const { return lo_; }
  /// One past the highest stored exponent; everything in [high(), trunc] is zero.
  int high() const { return lo_ + static_cast<int>(c_.size()); }

  C coeff(int e) const {
    if (e > trunc_) throw std::out_of_range("PuiseuxSeries: coefficient past truncation order");
    if (e < lo_ || e >= high()) return C(0);
    return c_[e - lo_];
  }

  void set(int e, const C& v) {
    if (e > trunc_) throw std::out_of_range("PuiseuxSeries: coefficient past truncation order");
    if (c_.empty()) {
      lo_ = e;
      c_.push_back(v);
      return;
    }
    if (e < lo_) {
      c_.insert(c_.begin(), lo_ - e, C(0));
      lo_ = e;
    } else if (e >= high()) {
      c_.resize(e - lo_ + 1, C(0));
    }
    c_[e - lo_] = v;
  }

  /// Valuation: lowest exponent with a nonzero coefficient, trunc+1 for a zero series.
  int valuation() const {
    for (std::size_t k = 0; k < c_.size(); ++k)
      if (cabs(c_[k]) != 0.0 && lo_ + static_cast<int>(k) <= trunc_) return lo_ + static_cast<int>(k);
    return exact() ? kExact : trunc_ + 1;
  }

  /// Lower the truncation order (never raises it).
  PuiseuxSeries truncated(int order) const {
    PuiseuxSeries r = *this;
    r.trunc_ = std::min(trunc_, order);
    r.trim();
    return r;
  }

  PuiseuxSeries& operator+=(const PuiseuxSeries& o) {
    check_base(o);
    trunc_ = std::min(trunc_, o.trunc_);
    for (int e = o.lo_; e < o.high() && e <= trunc_; ++e) set(e, coeff_raw(e) + o.c_[e - o.lo_]);
    trim();
    return *this;
  }
  PuiseuxSeries& operator-=(const PuiseuxSeries& o) { return *this += -o; }
  PuiseuxSeries& operator*=(const C& s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  friend PuiseuxSeries operator+(PuiseuxSeries a, const PuiseuxSeries& b) { return a += b; }
  friend PuiseuxSeries operator-(PuiseuxSeries a, const PuiseuxSeries& b) { return a -= b; }
  friend PuiseuxSeries operator*(PuiseuxSeries a, const C& s) { return a *= s; }
  friend PuiseuxSeries operator*(const C& s, PuiseuxSeries a) { return a *= s; }
  friend PuiseuxSeries operator-(PuiseuxSeries a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }

  friend PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b) {
    a.check_base(b);
    const int va = a.valuation(), vb = b.valuation();
    int tr = std::min(trunc_add(a.trunc_, vb), trunc_add(b.trunc_, va));
    PuiseuxSeries r(a.base_, tr);
    if (a.c_.empty() || b.c_.empty()) return r;
    const int lo = a.lo_ + b.lo_;
    const int hi = std::min(a.high() + b.high() - 2, tr);
    if (hi < lo) return r;
    std::vector<C> out(hi - lo + 1, C(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      const int ei = a.lo_ + static_cast<int>(i);
      if (ei > a.trunc_) break;
      for (std::size_t j = 0; j < b.c_.size(); ++j) {
        const int e = ei + b.lo_ + static_cast<int>(j);
        if (e > hi) break;
        if (b.lo_ + static_cast<int>(j) > b.trunc_) break;
        out[e - lo] += a.c_[i] * b.c_[j];
      }
    }
    r.lo_ = lo;
    r.c_ = std::move(out);
    r.trim();
    return r;
  }
  PuiseuxSeries& operator*=(const PuiseuxSeries& o) { return *this = *this * o; }

  /// Multiplicative inverse. For exact input the result is cut at `cap`.
  PuiseuxSeries inverse(int cap = kExact) const {
    const int v = valuation();
    if (v > trunc_) throw std::domain_error("PuiseuxSeries: inversion of the zero series");
    int tr = exact() ? cap : trunc_ - 2 * v;
    tr = std::min(tr, cap);
    if (tr >= kExact / 2) throw std::domain_error("PuiseuxSeries: exact inverse needs a cap");
    PuiseuxSeries r(base_, tr);
    const C a0 = coeff(v);
    const C inv0 = C(1) / a0;
    // r_{-v+k} = -(1/a0) sum_{j>=1} a_{v+j} r_{-v+k-j}
    std::vector<C> out(std::max(0, tr + v + 1), C(0));
    for (int k = 0; k <= tr + v; ++k) {
      C acc = k == 0 ? C(1) : C(0);
      for (int j = 1; j <= k; ++j) {
        const int e = v + j;
        if (e >= high()) break;
        acc -= coeff_raw(e) * out[k - j];
      }
      out[k] = acc * inv0;
    }
    r.lo_ = -v;
    r.c_ = std::move(out);
    r.trim();
    return r;
  }

  /// d/d lambda: s^e -> (e/2) s^{e-2}.
  PuiseuxSeries differentiate() const {
    PuiseuxSeries r(base_, exact() ? kExact : trunc_ - 2);
    if (c_.empty()) return r;
    r.lo_ = lo_ - 2;
    r.c_ = c_;
    for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] *= C(static_cast<double>(lo_ + static_cast<int>(k)) / 2.0);
    r.trim();
    return r;
  }

  /// Inverse of differentiate with zero s^0 coefficient; fails on an s^{-2} term.
  PuiseuxSeries antiderivative(double tol = 0.0) const {
    PuiseuxSeries r(base_, exact() ? kExact : trunc_ + 2);
    for (int e = lo_; e < high(); ++e) {
      const C& x = c_[e - lo_];
      if (e == -2) {
        if (cabs(x) > tol) throw std::domain_error("PuiseuxSeries: antiderivative of a simple pole");
        continue;
      }
      if (cabs(x) == 0.0) continue;
      r.set(e + 2, x / C(static_cast<double>(e + 2) / 2.0));
    }
    return r;
  }

  /// Sum of the known terms at a given value of s.
  C evaluate_s(const C& s) const {
    C acc(0), p(1);
    // s^lo_ computed by repeated multiplication for exactness of small powers
    if (lo_ < 0) {
      const C si = C(1) / s;
      for (int k = 0; k < -lo_; ++k) p *= si;
    } else {
      for (int k = 0; k < lo_; ++k) p *= s;
    }
    for (int e = lo_; e < high() && e <= trunc_; ++e) {
      acc += c_[e - lo_] * p;
      p *= s;
    }
    return acc;
  }

  /// Largest |coefficient| at odd exponents <= -3.
  double odd_principal_defect() const {
    double m = 0.0;
    for (int e = lo_; e < high() && e <= -3; ++e)
      if ((e % 2) != 0) m = std::max(m, cabs(c_[e - lo_]));
    return m;
  }

  /// Largest |coefficient| among stored terms (used for cancellation diagnostics).
  double max_abs() const {
    double m = 0.0;
    for (const auto& x : c_) m = std::max(m, cabs(x));
    return m;
  }

 private:
  C coeff_raw(int e) const { return (e < lo_ || e >= high()) ? C(0) : c_[e - lo_]; }
  void check_base(const PuiseuxSeries& o) const {
    if (cabs(base_ - o.base_) > 0.0) throw std::invalid_argument("PuiseuxSeries: base-point mismatch");
  }
  void trim() {
    if (high() - 1 > trunc_) c_.resize(std::max(0, trunc_ - lo_ + 1));
    while (!c_.empty() && cabs(c_.back()) == 0.0) c_.pop_back();
    std::size_t z = 0;
    while (z < c_.size() && cabs(c_[z]) == 0.0) ++z;
    if (z > 0) {
      c_.erase(c_.begin(), c_.begin() + z);
      lo_ += static_cast<int>(z);
    }
    if (c_.empty()) lo_ = 0;
  }

  C base_{0};
  int lo_ = 0;
  int trunc_ = kExact;
  std::vector<C> c_;
};

/// Coefficient of s^{-2}, i.e. Res_{lambda=u} g dlambda.
template <class C>
C puiseux_residue(const PuiseuxSeries<C>& g) {
  return g.coeff(-2);
}

/// Residue that refuses inputs with odd principal part above `tol`.
template <class C>
C puiseux_residue_checked(const PuiseuxSeries<C>& g, double tol) {
  if (g.odd_principal_defect() > tol)
    throw NumericError("puiseux_residue: odd principal part present (branch sum not even)");
  return g.coeff(-2);
}

/// Dense polynomial, coefficients in increasing degree.
template <class C>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<C> c) : c_(std::move(c)) { normalize(); }
  static Polynomial monomial(int d, C c = C(1)) {
    std::vector<C> v(d + 1, C(0));
    v[d] = c;
    return Polynomial(std::move(v));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<C>& coeffs() const { return c_; }
  C operator[](int k) const { return (k < 0 || k > degree()) ? C(0) : c_[k]; }

  C operator()(const C& x) const {
    C acc(0);
    for (int k = degree(); k >= 0; --k) acc = acc * x + c_[k];
    return acc;
  }

  Polynomial derivative() const {
    if (degree() < 1) return Polynomial();
    std::vector<C> d(degree());
    for (int k = 1; k <= degree(); ++k) d[k - 1] = c_[k] * C(static_cast<double>(k));
    return Polynomial(std::move(d));
  }
  Polynomial integral() const {
    std::vector<C> d(c_.size() + 1, C(0));
    for (std::size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k] / C(static_cast<double>(k + 1));
    return Polynomial(std::move(d));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<C> r(std::max(a.c_.size(), b.c_.size()), C(0));
    for (std::size_t k = 0; k < a.c_.size(); ++k) r[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) r[k] += b.c_[k];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + b * C(-1); }
  friend Polynomial operator*(Polynomial a, const C& s) {
    for (auto& x : a.c_) x *= s;
    a.normalize();
    return a;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    std::vector<C> r(a.c_.size() + b.c_.size() - 1, C(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }

  /// Remainder of division by d.
  Polynomial mod(const Polynomial& d) const {
    if (d.is_zero()) throw std::domain_error("Polynomial: division by zero polynomial");
    std::vector<C> r = c_;
    const int dd = d.degree();
    const C lead = d.c_.back();
    for (int k = static_cast<int>(r.size()) - 1; k >= dd; --k) {
      const C q = r[k] / lead;
      if (cabs(q) == 0.0) continue;
      for (int j = 0; j <= dd; ++j) r[k - dd + j] -= q * d.c_[j];
      r[k] = C(0);
    }
    if (static_cast<int>(r.size()) > dd) r.resize(std::max(dd, 0));
    return Polynomial(std::move(r));
  }

  double norm() const {
    double m = 0.0;
    for (const auto& x : c_) m = std::max(m, cabs(x));
    return m;
  }

 private:
  void normalize() {
    while (!c_.empty() && cabs(c_.back()) == 0.0) c_.pop_back();
  }
  std::vector<C> c_;
};

template <class C>
struct RootSet {
  std::vector<C> roots;
  bool near_multiple = false;
  double min_separation = 0.0;
  double backward_error = 0.0;
};

/// All complex roots: companion-matrix eigenvalues in double, then Newton
/// polishing in the target precision.
template <class C>
RootSet<C> poly_roots(const Polynomial<C>& p, double tol = 1e-12, double merge_threshold = 1e-6) {
  if (p.is_zero()) throw std::domain_error("poly_roots: zero polynomial");
  const int d = p.degree();
  if (d < 1) throw std::domain_error("poly_roots: degree must be at least 1");
  using cd = std::complex<double>;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
  const cd lead = to_cd(p[d]);
  for (int k = 0; k < d; ++k) comp(0, k) = -to_cd(p[d - 1 - k]) / lead;
  for (int k = 1; k < d; ++k) comp(k, k - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw NumericError("poly_roots: eigenvalue solver failed");

  RootSet<C> out;
  const Polynomial<C> dp = p.derivative();
  for (int k = 0; k < d; ++k) {
    C x = from_cd<C>(es.eigenvalues()(k));
    for (int it = 0; it < 60; ++it) {
      const C fx = p(x), dfx = dp(x);
      if (cabs(dfx) == 0.0) break;
      const C step = fx / dfx;
      x -= step;
      if (cabs(step) <= 4.0 * epsilon_of<C> * (1.0 + cabs(x))) break;
    }
    out.roots.push_back(x);
  }
  std::sort(out.roots.begin(), out.roots.end(), [](const C& a, const C& b) {
    const cd x = to_cd(a), y = to_cd(b);
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  out.min_separation = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) out.min_separation = std::min(out.min_separation, cabs(out.roots[i] - out.roots[j]));
  out.near_multiple = d > 1 && out.min_separation < merge_threshold;
  double nrm = p.norm();
  for (const auto& r : out.roots) out.backward_error = std::max(out.backward_error, cabs(p(r)) / nrm);
  if (out.backward_error > tol && !out.near_multiple)
    throw NumericError("poly_roots: backward error above tolerance");
  return out;
}

}  // namespace ancestrec
