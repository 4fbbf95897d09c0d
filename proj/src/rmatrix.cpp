#include "ancestrec/rmatrix.hpp"

#include <algorithm>

namespace ancestrec {

double RResiduals::max_ode() const {
  double m = 0.0;
  for (double x : ode) m = std::max(m, x);
  return m;
}

double RResiduals::max_unitarity() const {
  double m = 0.0;
  for (double x : unitarity) m = std::max(m, x);
  return m;
}

template <class C>
std::vector<C> saddle_expansion(const AnModel<C>& m, int i, const Polynomial<C>& phi, int K,
                                std::vector<double>* magnitude) {
  if (K < 0) throw std::invalid_argument("saddle_expansion: K must be non-negative");
  const C x0 = m.xi[i];
  const C Delta = m.Delta[i];
  // Taylor coefficients of F and phi at the critical point
  auto taylor = [&](const Polynomial<C>& p) {
    std::vector<C> c;
    Polynomial<C> q = p;
    C fact(1);
    for (int k = 0; k <= p.degree(); ++k) {
      c.push_back(q(x0) / fact);
      q = q.derivative();
      fact *= C(k + 1);
    }
    return c;
  };
  auto T = taylor(m.F);
  std::vector<C> S(T.size(), C(0));  // sum_{m>=3} T_m y^m
  for (std::size_t k = 3; k < T.size(); ++k) S[k] = T[k];
  const auto ph = taylor(phi);

  // gauss[q] = (2q-1)!! (-1/Delta)^q, multiplies z^q
  const C mid = -C(1) / Delta;
  std::vector<C> out(K + 1, C(0));
  if (magnitude) magnitude->assign(K + 1, 0.0);
  // vertex polynomial S^p / p!, carries z^{-p}
  std::vector<C> Sp{C(1)};
  for (int p = 0; p <= 2 * K; ++p) {
    if (p > 0) {
      std::vector<C> nx(Sp.size() + S.size() - 1, C(0));
      for (std::size_t a = 0; a < Sp.size(); ++a)
        for (std::size_t b = 3; b < S.size(); ++b) nx[a + b] += Sp[a] * S[b];
      for (auto& x : nx) x /= C(p);
      Sp = std::move(nx);
    }
    if (S.size() <= 3 && p > 0) break;
    for (std::size_t a = 0; a < Sp.size(); ++a) {
      if (cabs(Sp[a]) == 0.0) continue;
      for (std::size_t j = 0; j < ph.size(); ++j) {
        const int e = static_cast<int>(a + j);
        if (e % 2) continue;
        const int q = e / 2;
        const int zp = q - p;
        if (zp < 0 || zp > K) continue;
        C g(1);
        for (int r = 0; r < q; ++r) g *= C(2 * r + 1) * mid;
        const C term = Sp[a] * ph[j] * g;
        out[zp] += term;
        if (magnitude) (*magnitude)[zp] += cabs(term);
      }
    }
  }
  return out;
}

template <class C>
RResiduals verify_r(const MatrixSeries<C>& R, const CanonicalFrame<C>& f) {
  RResiduals res;
  const int K = R.order();
  const std::size_t n = R.dim();
  const Mat<C> U = Mat<C>::diagonal(f.U);
  const Mat<C> I = Mat<C>::identity(n);
  for (int k = 0; k < K; ++k) {
    Mat<C> lhs = U * R.coeffs[k + 1] - R.coeffs[k + 1] * U;
    Mat<C> rhs = (f.mu - I * C(k)) * R.coeffs[k];
    const double scale = std::max({lhs.norm(), rhs.norm(), 1e-300});
    res.ode.push_back((lhs - rhs).norm() / scale);
  }
  for (int mm = 0; mm <= K; ++mm) {
    Mat<C> s(n, n);
    for (int a = 0; a <= mm; ++a) {
      Mat<C> t = R.coeffs[a].transpose() * R.coeffs[mm - a];
      if (a % 2) s -= t;
      else s += t;
    }
    if (mm == 0) s -= I;
    res.unitarity.push_back(s.norm());
  }
  return res;
}

template <class C>
double r_defect(const MatrixSeries<C>& R, const RResiduals& res) {
  // unitarity is absolute; scale by the size of the coefficients involved
  double worst = res.max_ode();
  for (int mm = 0; mm <= R.order() && mm < static_cast<int>(res.unitarity.size()); ++mm) {
    double sc = 1.0;
    for (int a = 0; a <= mm; ++a) sc = std::max(sc, R.coeffs[a].norm() * R.coeffs[mm - a].norm());
    worst = std::max(worst, res.unitarity[mm] / sc);
  }
  return worst;
}

template <class C>
RMatrix<C> compute_r(const AnModel<C>& m, const CanonicalFrame<C>& f, int K, double tol) {
  if (!m.semisimple) throw CausticError("compute_r: point is not semisimple");
  if (K < 0) throw std::invalid_argument("compute_r: K must be non-negative");
  const int n = m.n;
  // Cz[k](a, i) = Delta_i^{-1/2} [z^k] saddle(i, v_a)
  std::vector<Mat<C>> Cz(K + 1, Mat<C>(n, n));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) {
      auto s = saddle_expansion(m, i, m.v[a], K);
      for (int k = 0; k <= K; ++k) Cz[k](a, i) = s[k] / f.sqrtDelta[i];
    }
  RMatrix<C> r;
  r.frame = f;
  const Mat<C> P = f.PsiInv * m.eta_inv;
  for (int k = 0; k <= K; ++k) r.R.coeffs.push_back(P * Cz[k]);
  r.residuals = verify_r(r.R, f);
  if (r_defect(r.R, r.residuals) > tol) throw RMatrixError("compute_r: verification residual above tolerance", r.residuals);
  return r;
}

#define ANCESTREC_INSTANTIATE(C)                                                                     \
  template std::vector<C> saddle_expansion<C>(const AnModel<C>&, int, const Polynomial<C>&, int,  \
                                             std::vector<double>*);                               \
  template double r_defect<C>(const MatrixSeries<C>&, const RResiduals&);                           \
  template RResiduals verify_r<C>(const MatrixSeries<C>&, const CanonicalFrame<C>&);                \
  template RMatrix<C> compute_r<C>(const AnModel<C>&, const CanonicalFrame<C>&, int, double);

ANCESTREC_INSTANTIATE(std::complex<double>)
ANCESTREC_INSTANTIATE(complex_t<quad>)

}  // namespace ancestrec
