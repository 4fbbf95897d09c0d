#include "ancestrec/frobenius.hpp"

#include <cmath>
#include <string>

namespace ancestrec {

namespace {

// Truncated power series in y, coefficients 0..deg.
template <class C>
std::vector<C> series_mul(const std::vector<C>& a, const std::vector<C>& b, int deg) {
  std::vector<C> r(deg + 1, C(0));
  for (int i = 0; i <= deg && i < static_cast<int>(a.size()); ++i)
    for (int j = 0; i + j <= deg && j < static_cast<int>(b.size()); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// (1 + h)^p with h(0) = 0, truncated at y^deg.
template <class C>
std::vector<C> series_pow1p(const std::vector<C>& h, const C& p, int deg) {
  std::vector<C> r(deg + 1, C(0)), hk(deg + 1, C(0));
  r[0] = C(1);
  hk[0] = C(1);
  for (int k = 1; k <= deg; ++k) {
    hk = series_mul(hk, h, deg);
    C b(1);
    for (int j = 0; j < k; ++j) b *= (p - C(j)) / C(j + 1);
    for (int e = 0; e <= deg; ++e) r[e] += b * hk[e];
  }
  return r;
}

}  // namespace

template <class C>
void flat_coordinates(int n, const std::vector<C>& t, std::vector<C>& tau, Mat<C>& jac) {
  // G(y) = y^{n+1} F(t, 1/y) (n+1) = 1 + (n+1) sum_b t^b y^{b+1}
  const int deg = n + 1;
  std::vector<C> h(deg + 1, C(0));
  for (int b = 1; b <= n; ++b) h[b + 1] = C(static_cast<double>(n + 1)) * t[b - 1];
  tau.assign(n, C(0));
  jac = Mat<C>(n, n);
  for (int a = 1; a <= n; ++a) {
    const C p = C(a) / C(n + 1);
    auto g = series_pow1p(h, p, deg);
    tau[a - 1] = g[a + 1] / C(static_cast<double>(a));
    auto gd = series_pow1p(h, p - C(1), deg);
    for (int b = 1; b <= a; ++b) jac(a - 1, b - 1) = gd[a - b];
  }
}

template <class C>
std::vector<C> AnModel<C>::to_flat(const Polynomial<C>& p) const {
  // m_b = coefficient of x^{n-b}; m = J^T w with J = dt_dtau
  std::vector<C> m(n, C(0));
  for (int b = 1; b <= n; ++b) m[b - 1] = p[n - b];
  // J(a, b) vanishes for b < a, so m_b = sum_{a <= b} J(a, b) w_a.
  std::vector<C> w(n, C(0));
  for (int b = 1; b <= n; ++b) {
    C acc = m[b - 1];
    for (int a = 1; a < b; ++a) acc -= dt_dtau(a - 1, b - 1) * w[a - 1];
    w[b - 1] = acc / dt_dtau(b - 1, b - 1);
  }
  return w;
}

template <class C>
Polynomial<C> AnModel<C>::from_flat(const std::vector<C>& w) const {
  Polynomial<C> p;
  for (int a = 0; a < n; ++a) p = p + v[a] * w[a];
  return p;
}

template <class C>
C AnModel<C>::pairing(const Polynomial<C>& p, const Polynomial<C>& q) const {
  return (p * q).mod(dF)[n - 1];
}

template <class C>
C AnModel<C>::pairing_sum(const Polynomial<C>& p, const Polynomial<C>& q) const {
  C s(0);
  for (int i = 0; i < n; ++i) s += p(xi[i]) * q(xi[i]) / Delta[i];
  return s;
}

template <class C>
Mat<C> AnModel<C>::mult_matrix(const std::vector<C>& w) const {
  const Polynomial<C> pw = from_flat(w);
  Mat<C> M(n, n);
  for (int b = 0; b < n; ++b) {
    auto r = to_flat((pw * v[b]).mod(dF));
    for (int c = 0; c < n; ++c) M(b, c) = r[c];
  }
  return M;
}

template <class C>
AnModel<C> build_model(int n, const std::vector<C>& t, const ModelOptions& opt) {
  if (n < 1) throw std::invalid_argument("build_model: n must be at least 1");
  if (static_cast<int>(t.size()) != n)
    throw std::invalid_argument("build_model: expected " + std::to_string(n) + " parameters");
  for (const auto& x : t)
    if (!std::isfinite(std::abs(to_cd(x)))) throw std::invalid_argument("build_model: non-finite parameter");

  AnModel<C> m;
  m.n = n;
  m.t = t;
  std::vector<C> fc(n + 2, C(0));
  fc[n + 1] = C(1) / C(n + 1);
  for (int a = 1; a <= n; ++a) fc[n - a] += t[a - 1];
  m.F = Polynomial<C>(fc);
  m.dF = m.F.derivative();
  m.d2F = m.dF.derivative();
  m.d3F = m.d2F.derivative();

  flat_coordinates(n, t, m.tau, m.jac_tau_t);
  m.dt_dtau = m.jac_tau_t.inverse().transpose();
  // v_a = sum_b (dt^b / dtau_a) x^{n-b}
  m.v.resize(n);
  for (int a = 0; a < n; ++a) {
    std::vector<C> c(n, C(0));
    for (int b = 1; b <= n; ++b) c[n - b] += m.dt_dtau(a, b - 1);
    m.v[a] = Polynomial<C>(c);
  }

  m.eta = Mat<C>(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m.eta(a, b) = m.pairing(m.v[a], m.v[b]);
  m.eta_inv = m.eta.inverse();

  m.structure.resize(n);
  for (int a = 0; a < n; ++a) {
    std::vector<C> e(n, C(0));
    e[a] = C(1);
    m.structure[a] = m.mult_matrix(e);
  }
  m.euler = Mat<C>(n, n);
  for (int b = 0; b < n; ++b) {
    auto r = m.to_flat((m.F * m.v[b]).mod(m.dF));
    for (int c = 0; c < n; ++c) m.euler(b, c) = r[c];
  }

  m.d = static_cast<double>(n - 1) / (n + 1);
  m.d_a.resize(n);
  for (int a = 1; a <= n; ++a) m.d_a[a - 1] = static_cast<double>(n - a) / (n + 1);
  m.rho.assign(n, 0.0);

  if (n == 1) {
    m.xi = {C(0)};
  } else {
    auto rs = poly_roots(m.dF, opt.root_tol, opt.merge_threshold);
    m.xi = rs.roots;
    m.near_multiple_roots = rs.near_multiple;
  }
  double umax = 0.0;
  m.u_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    m.u.push_back(m.F(m.xi[i]));
    m.Delta.push_back(m.d2F(m.xi[i]));
    umax = std::max(umax, cabs(m.u.back()));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.u_gap = std::min(m.u_gap, cabs(m.u[i] - m.u[j]));
  m.semisimple = !m.near_multiple_roots && m.u_gap >= opt.gap_rel * (1.0 + umax);

  if (m.semisimple) {
    m.du_dtau = Mat<C>(n, n);
    m.dDelta_dtau = Mat<C>(n, n);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) {
        const C x = m.xi[i];
        m.du_dtau(i, a) = m.v[a](x);
        const auto dv = m.v[a].derivative();
        m.dDelta_dtau(i, a) = dv.derivative()(x) - m.d3F(x) * dv(x) / m.Delta[i];
      }
  }
  return m;
}

template <class C>
CanonicalFrame<C> canonical_frame(const AnModel<C>& m, const std::vector<int>& branch) {
  if (!m.semisimple) throw CausticError("canonical_frame: point is not semisimple");
  const int n = m.n;
  CanonicalFrame<C> f;
  f.branch = branch.empty() ? std::vector<int>(n, 1) : branch;
  if (static_cast<int>(f.branch.size()) != n) throw std::invalid_argument("canonical_frame: branch size");
  f.U = m.u;
  for (int i = 0; i < n; ++i) f.sqrtDelta.push_back(branch_sqrt(m.Delta[i], f.branch[i]));
  const Mat<C> dtau_du = m.du_dtau.inverse();
  f.Psi = Mat<C>(n, n);
  f.PsiInv = Mat<C>(n, n);
  for (int b = 0; b < n; ++b)
    for (int i = 0; i < n; ++i) {
      f.Psi(b, i) = f.sqrtDelta[i] * dtau_du(b, i);
      f.PsiInv(i, b) = m.du_dtau(i, b) / f.sqrtDelta[i];
    }
  f.theta = Mat<C>(n, n);
  for (int a = 0; a < n; ++a) f.theta(a, a) = C(n - 1) / C(2 * (n + 1)) - C(n - a - 1) / C(n + 1);
  f.mu = f.PsiInv * f.theta * f.Psi;
  return f;
}

#define ANCESTREC_INSTANTIATE(C)                                                                   \
  template struct AnModel<C>;                                                                      \
  template AnModel<C> build_model<C>(int, const std::vector<C>&, const ModelOptions&);             \
  template void flat_coordinates<C>(int, const std::vector<C>&, std::vector<C>&, Mat<C>&);         \
  template CanonicalFrame<C> canonical_frame<C>(const AnModel<C>&, const std::vector<int>&);

ANCESTREC_INSTANTIATE(std::complex<double>)
ANCESTREC_INSTANTIATE(complex_t<quad>)

}  // namespace ancestrec
