#include "ancestrec/local_data.hpp"

#include <string>

namespace ancestrec {

namespace {

// Coefficient of s^{2(l-k)-1} in the A1 period I^{(k)}; the exponent depends only on k.
template <class C>
C a1_coeff(int k) {
  const C sqrt2 = csqrt(C(2));
  if (k >= 0) {
    C c = sqrt2;
    for (int j = 1; j <= k; ++j) c *= -C(2 * j - 1) / C(2);
    return c;
  }
  const int m = -k - 1;
  C c = C(2) * sqrt2;
  for (int j = 1; j <= m; ++j) c *= C(2) / C(2 * j + 1);
  return c;
}

// s^{-2k-1} for both signs of k
inline int a1_exponent(int k) { return -2 * k - 1; }

}  // namespace

template <class C>
PuiseuxSeries<C> a1_period(int k, const C& u, int order) {
  return PuiseuxSeries<C>::monomial(u, a1_exponent(k), a1_coeff<C>(k), order);
}

template <class C>
const Mat<C>& VMatrices<C>::operator()(int k, int l) const {
  auto it = V.find({k, l});
  if (it == V.end())
    throw InsufficientOrder("V matrix (" + std::to_string(k) + "," + std::to_string(l) + ") beyond R truncation");
  return it->second;
}

template <class C>
VMatrices<C> v_matrices(const MatrixSeries<C>& R, double tol) {
  const int K = R.order();
  const std::size_t n = R.dim();
  auto Nab = [&](int a, int b) {
    Mat<C> t = R.coeffs[a].transpose() * R.coeffs[b];
    if ((a + b) % 2 == 0) t = -t;
    if (a == 0 && b == 0) t += Mat<C>::identity(n);
    return t;
  };
  VMatrices<C> out;
  out.K = K;
  for (int s = 0; s <= K - 1; ++s)
    for (int a = 0; a <= s; ++a) {
      const int b = s - a;
      Mat<C> v = Nab(a, b + 1);
      if (a > 0) v -= out.V.at({a - 1, b + 1});
      out.V.emplace(std::make_pair(a, b), std::move(v));
    }
  double worst = Nab(0, 0).norm();
  for (int a = 1; a <= K; ++a) {
    const double sc = std::max(1.0, out.V.at({a - 1, 0}).norm());
    worst = std::max(worst, (Nab(a, 0) - out.V.at({a - 1, 0})).norm() / sc);
  }
  out.consistency = worst;
  if (worst > tol) throw NumericError("v_matrices: numerator does not vanish at w = -z (unitarity violated)");
  return out;
}

template <class C>
std::vector<PuiseuxSeries<C>> period_expansion(const AnModel<C>& m, const RMatrix<C>& r, int i, int k) {
  const int n = m.n;
  const int K = r.K();
  const int trunc = 2 * (K - k);
  std::vector<PuiseuxSeries<C>> out(n, PuiseuxSeries<C>(m.u[i], trunc));
  for (int l = 0; l <= K; ++l) {
    const Mat<C> PR = r.frame.Psi * r.R.coeffs[l];
    const C c = (l % 2 ? -C(1) : C(1)) * a1_coeff<C>(k - l);
    const int e = 2 * (l - k) - 1;
    if (e > trunc) break;
    for (int b = 0; b < n; ++b) out[b].set(e, out[b].coeff(e) + PR(b, i) * c);
  }
  return out;
}

template <class C>
PuiseuxSeries<C> propagator_diag(const RMatrix<C>& r, const VMatrices<C>& V, int i, int m, const C& u) {
  const int K = r.K();
  const int trunc = 2 * K - 3 - 2 * m;
  PuiseuxSeries<C> p(u, trunc);
  // [e^{m+2}] (2 + e)(1 + e)^{-1/2}
  auto c = [](int j) {
    if (j < 0) return C(0);
    C b(1);
    for (int q = 0; q < j; ++q) b *= (C(-1) / C(2) - C(q)) / C(q + 1);
    return b;
  };
  const C fA = C(2) * c(m + 2) + c(m + 1);
  if (-2 * m - 4 <= trunc) p.set(-2 * m - 4, fA);
  for (int s = 0; s <= K - 1; ++s)
    for (int k = 0; k <= s; ++k) {
      const int l = s - k;
      const int e = 2 * (k + l - 1 - m);
      if (e > trunc) continue;
      C coef = C(2) * V(k, l)(i, i);
      for (int q = 0; q < k + l; ++q) coef *= C(2);
      for (int q = 1; q <= k; ++q) coef /= C(2 * q - 1);
      for (int q = 1; q <= l; ++q) coef /= C(2 * q - 1);
      // binom(l - 1/2, m)
      C b(1);
      for (int q = 0; q < m; ++q) b *= (C(l) - C(1) / C(2) - C(q)) / C(q + 1);
      p.set(e, p.coeff(e) + coef * b);
    }
  return p;
}

template <class C>
LocalExpansion<C>::LocalExpansion(const AnModel<C>& m, const RMatrix<C>& r, const VMatrices<C>& V, int i, int kmin,
                                  int kmax, int mmax)
    : i_(i), n_(m.n), kmin_(kmin), kmax_(kmax), u_(m.u[i]) {
  for (int k = kmin; k <= kmax; ++k) {
    periods_.push_back(period_expansion(m, r, i, k));
    std::vector<PS> pa;
    for (int a = 0; a < n_; ++a) {
      PS acc(u_, periods_.back()[0].trunc());
      for (int b = 0; b < n_; ++b) acc += periods_.back()[b] * m.eta(a, b);
      pa.push_back(std::move(acc));
    }
    pairings_.push_back(std::move(pa));
  }
  for (int mm = 0; mm <= mmax; ++mm) prop_.push_back(propagator_diag(r, V, i, mm, u_));
}

template <class C>
const std::vector<PuiseuxSeries<C>>& LocalExpansion<C>::period(int k) const {
  if (k < kmin_ || k > kmax_) throw InsufficientOrder("period index " + std::to_string(k) + " not precomputed");
  return periods_[k - kmin_];
}

template <class C>
const PuiseuxSeries<C>& LocalExpansion<C>::pairing(int k, int a) const {
  if (k < kmin_ || k > kmax_) throw InsufficientOrder("period index " + std::to_string(k) + " not precomputed");
  return pairings_[k - kmin_][a];
}

template <class C>
const PuiseuxSeries<C>& LocalExpansion<C>::prop_diag(int m) const {
  if (m < 0 || m >= static_cast<int>(prop_.size()))
    throw InsufficientOrder("propagator coefficient " + std::to_string(m) + " not precomputed");
  return prop_[m];
}

#define ANCESTREC_INSTANTIATE(C)                                                                           \
  template PuiseuxSeries<C> a1_period<C>(int, const C&, int);                                              \
  template struct VMatrices<C>;                                                                            \
  template VMatrices<C> v_matrices<C>(const MatrixSeries<C>&, double);                                     \
  template std::vector<PuiseuxSeries<C>> period_expansion<C>(const AnModel<C>&, const RMatrix<C>&, int, int); \
  template PuiseuxSeries<C> propagator_diag<C>(const RMatrix<C>&, const VMatrices<C>&, int, int, const C&); \
  template class LocalExpansion<C>;

ANCESTREC_INSTANTIATE(std::complex<double>)
ANCESTREC_INSTANTIATE(complex_t<quad>)

}  // namespace ancestrec
