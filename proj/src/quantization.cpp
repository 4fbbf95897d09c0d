#include "ancestrec/quantization.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <stdexcept>

#include "ancestrec/dvv.hpp"
#include "ancestrec/recursion.hpp"

namespace ancestrec {

template <class C>
void FockPolynomial<C>::add(const Monomial& m, const C& c) {
  if (c == C(0)) return;
  auto [it, fresh] = terms_.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second == C(0)) terms_.erase(it);
  }
}

template <class C>
C FockPolynomial<C>::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? C(0) : it->second;
}

template <class C>
double FockPolynomial<C>::max_abs() const {
  double r = 0.0;
  for (auto& [m, c] : terms_) r = std::max(r, cabs(c));
  return r;
}

template <class C>
FockPolynomial<C> FockPolynomial<C>::derivative(int v) const {
  FockPolynomial out(N_);
  for (auto& [m, c] : terms_) {
    auto lo = std::lower_bound(m.vars.begin(), m.vars.end(), v);
    if (lo == m.vars.end() || *lo != v) continue;
    const int mult = static_cast<int>(std::upper_bound(lo, m.vars.end(), v) - lo);
    Monomial d{m.h2, m.vars};
    d.vars.erase(d.vars.begin() + (lo - m.vars.begin()));
    out.add(d, c * C(mult));
  }
  return out;
}

template <class C>
FockPolynomial<C> FockPolynomial<C>::times_q(int v) const {
  // q_v = t_v - 1 on the dilaton direction
  FockPolynomial out(N_);
  for (auto& [m, c] : terms_) {
    Monomial d{m.h2, m.vars};
    d.vars.insert(std::upper_bound(d.vars.begin(), d.vars.end(), v), v);
    out.add(d, c);
    if (v == unit_shift_var()) out.add(m, -c);
  }
  return out;
}

template <class C>
FockPolynomial<C> FockPolynomial<C>::times_hbar_half(int p) const {
  FockPolynomial out(N_);
  for (auto& [m, c] : terms_) out.add(Monomial{m.h2 + p, m.vars}, c);
  return out;
}

template <class C>
FockPolynomial<C>& FockPolynomial<C>::operator+=(const FockPolynomial& o) {
  for (auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

template <class C>
FockPolynomial<C>& FockPolynomial<C>::operator*=(const C& s) {
  if (s == C(0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

template <class C>
FockPolynomial<C> FockPolynomial<C>::operator*(const FockPolynomial& o) const {
  FockPolynomial out(N_);
  for (auto& [m1, c1] : terms_)
    for (auto& [m2, c2] : o.terms_) {
      Monomial m{m1.h2 + m2.h2, {}};
      m.vars.reserve(m1.vars.size() + m2.vars.size());
      std::merge(m1.vars.begin(), m1.vars.end(), m2.vars.begin(), m2.vars.end(), std::back_inserter(m.vars));
      out.add(m, c1 * c2);
    }
  return out;
}

template <class C>
C symplectic_form(const Mat<C>& eta, const LaurentVector<C>& f, const LaurentVector<C>& g) {
  C s(0);
  for (auto& [e, wf] : f.w) {
    auto it = g.w.find(-1 - e);
    if (it == g.w.end()) continue;
    C p(0);
    for (std::size_t a = 0; a < wf.size(); ++a)
      for (std::size_t b = 0; b < it->second.size(); ++b) p += wf[a] * eta(a, b) * it->second[b];
    s += (e % 2 ? -p : p);
  }
  return s;
}

namespace {

// Darboux coordinates of phi: q_k^a from z^k, p_{k,a} from z^{-k-1}.
template <class C>
void darboux(const Mat<C>& eta, const LaurentVector<C>& phi, std::map<std::pair<int, int>, C>& q,
             std::map<std::pair<int, int>, C>& p) {
  const int N = static_cast<int>(eta.rows());
  for (auto& [e, w] : phi.w) {
    if (e >= 0) {
      for (int a = 0; a < N; ++a) q[{e, a}] += w[a];
    } else {
      const int k = -e - 1;
      for (int a = 0; a < N; ++a) {
        C s(0);
        for (int b = 0; b < N; ++b) s += eta(a, b) * w[b];
        p[{k, a}] += (k % 2 ? s : -s);
      }
    }
  }
}

}  // namespace

template <class C>
FockPolynomial<C> apply_phi_hat(const Mat<C>& eta, const LaurentVector<C>& phi, const FockPolynomial<C>& f) {
  std::map<std::pair<int, int>, C> q, p;
  darboux(eta, phi, q, p);
  FockPolynomial<C> out(f.N());
  for (auto& [ka, c] : q) {
    if (c == C(0)) continue;
    out += f.derivative(f.var(ka.second, ka.first)).times_hbar_half(1) * (-c);
  }
  for (auto& [ka, c] : p) {
    if (c == C(0)) continue;
    out += f.times_q(f.var(ka.second, ka.first)).times_hbar_half(-1) * c;
  }
  return out;
}

template <class C>
FockPolynomial<C> dpt_truncated(const C& scale, int nmax, int gmax) {
  FockPolynomial<C> out(1);
  for (int g = 0; g <= gmax; ++g)
    for (int n = 1; n <= nmax; ++n) {
      if (2 * g - 2 + n <= 0) continue;
      const int D = 3 * g - 3 + n;
      C sc(1);
      for (int j = 0; j < g - 1; ++j) sc *= scale;
      for (int j = 0; j < 1 - g; ++j) sc /= scale;
      // multisets of psi powers summing to D, as nondecreasing sequences
      std::vector<int> ks;
      std::function<void(int, int)> rec = [&](int from, int left) {
        if (static_cast<int>(ks.size()) == n) {
          if (left != 0) return;
          C c = C(dvv_intersection(g, ks).convert_to<double>());
          if constexpr (!std::is_same_v<C, std::complex<double>>) {
            const auto r = dvv_intersection(g, ks);
            c = C(quad(numerator(r).str()) / quad(denominator(r).str()));
          }
          // 1/n! sum over orderings = 1/prod(multiplicity!)
          for (std::size_t s = 0; s < ks.size();) {
            std::size_t e = s;
            while (e < ks.size() && ks[e] == ks[s]) ++e;
            for (std::size_t j = 2; j <= e - s; ++j) c /= C(static_cast<double>(j));
            s = e;
          }
          out.add({2 * (g - 1), ks}, c * sc);
          return;
        }
        for (int k = from; k <= left; ++k) {
          ks.push_back(k);
          rec(k, left - k);
          ks.pop_back();
        }
      };
      rec(0, D);
    }
  return out;
}

template <class C>
CorrelatorTable<C> ancestor_via_quantization(const AnModel<C>& m, const RMatrix<C>& r, const QuantizationOptions& opt,
                                             double* tameness_defect) {
  using FP = FockPolynomial<C>;
  using Mono = typename FP::Monomial;
  const int N = m.n;
  const int chi_max = opt.chi_max;
  const int gmax = (chi_max + 1) / 2;
  const int Dmax = chi_max + gmax - 1;
  const int chi_cap = chi_max + Dmax;
  int Kvar = 0;
  for (int g = 0; g <= gmax; ++g)
    for (int n = 1; 2 * g - 2 + n <= chi_cap; ++n) Kvar = std::max(Kvar, 3 * g - 3 + n);
  if (r.K() < Dmax) throw InsufficientOrder("ancestor_via_quantization: R truncated below the grading bound");

  auto keep = [&](const Mono& mo) {
    const int n = static_cast<int>(mo.vars.size());
    if (n == 0 || mo.h2 % 2) return false;
    const int g = mo.h2 / 2 + 1;
    if (g < 0 || g > gmax) return false;
    int sk = 0;
    for (int v : mo.vars) sk += v / N;
    const int D = 3 * g - 3 + n - sk;
    const int chi = 2 * g - 2 + n;
    return D >= 0 && D + std::max(0, chi - chi_max) <= Dmax;
  };

  // A = log(Psi R Psi^{-1}) up to z^Dmax
  const auto& f = r.frame;
  std::vector<Mat<C>> X(Dmax + 1, Mat<C>(N, N));
  for (int l = 1; l <= Dmax; ++l) X[l] = f.Psi * r.R.coeffs[l] * f.PsiInv;
  std::vector<Mat<C>> A(Dmax + 1, Mat<C>(N, N)), P = X;
  for (int j = 1; j <= Dmax; ++j) {
    const C c = (j % 2 ? C(1) : C(-1)) / C(j);
    for (int l = 0; l <= Dmax; ++l) A[l] += P[l] * c;
    std::vector<Mat<C>> next(Dmax + 1, Mat<C>(N, N));
    for (int a = 1; a <= Dmax; ++a)
      for (int b = 1; a + b <= Dmax; ++b) next[a + b] += P[a] * X[b];
    P = std::move(next);
  }

  // quadratic Hamiltonian coefficients H(x, y) = Omega(A e_x, e_y)
  auto qbasis = [&](int a, int k) {
    LaurentVector<C> v;
    std::vector<C> w(N, C(0));
    w[a] = C(1);
    v.w[k] = w;
    return v;
  };
  auto pbasis = [&](int a, int k) {
    // v^a (-z)^{-k-1}
    LaurentVector<C> v;
    std::vector<C> w(N);
    for (int b = 0; b < N; ++b) w[b] = m.eta_inv(a, b) * ((k + 1) % 2 ? C(-1) : C(1));
    v.w[-k - 1] = w;
    return v;
  };
  auto applyA = [&](const LaurentVector<C>& v) {
    LaurentVector<C> out;
    for (auto& [e, w] : v.w)
      for (int l = 1; l <= Dmax; ++l) {
        auto& dst = out.w[e + l];
        if (dst.empty()) dst.assign(N, C(0));
        for (int b = 0; b < N; ++b)
          for (int c = 0; c < N; ++c) dst[b] += A[l](b, c) * w[c];
      }
    return out;
  };
  struct Lin {
    int qv, pv;
    C c;
  };
  std::vector<Lin> lin, pp;
  for (int k = 0; k <= Kvar; ++k)
    for (int a = 0; a < N; ++a) {
      const auto Ax_q = applyA(qbasis(a, k));
      const auto Ax_p = applyA(pbasis(a, k));
      for (int k2 = 0; k2 <= Kvar; ++k2)
        for (int b = 0; b < N; ++b) {
          const auto ey = pbasis(b, k2);
          // q-p pairs appear twice in 1/2 sum c_x c_y H_xy
          const C h_qp = symplectic_form(m.eta, Ax_q, ey);
          if (cabs(h_qp) > 0) lin.push_back({k * N + a, k2 * N + b, h_qp});
          const C h_pp = symplectic_form(m.eta, Ax_p, ey);
          if (cabs(h_pp) > 0) pp.push_back({k * N + a, k2 * N + b, h_pp / C(2)});
        }
    }

  // log prod D_pt(hbar Delta_i; ^i q)
  FP G0(N);
  for (int i = 0; i < N; ++i) {
    const FP d = dpt_truncated<C>(m.Delta[i], chi_cap + 2, gmax);
    for (auto& [mo, c] : d.terms()) {
      const int n = static_cast<int>(mo.vars.size());
      // substitute ^i t_k = sum_a du_i/dtau_a t^a_k
      std::vector<int> choice(n, 0);
      for (;;) {
        Mono out{mo.h2, {}};
        C w = c;
        for (int j = 0; j < n; ++j) {
          out.vars.push_back(mo.vars[j] * N + choice[j]);
          w *= m.du_dtau(i, choice[j]);
        }
        std::sort(out.vars.begin(), out.vars.end());
        if (keep(out)) G0.add(out, w);
        int j = 0;
        while (j < n && ++choice[j] == N) choice[j++] = 0;
        if (j == n) break;
      }
    }
  }

  // hbar * P1 * P2 restricted to kept monomials; terms bucketed by (h2, n, sum k)
  auto buckets = [&](const FP& p) {
    std::map<std::array<int, 3>, std::vector<const typename FP::Terms::value_type*>> b;
    for (auto& t : p.terms()) {
      int sk = 0;
      for (int v : t.first.vars) sk += v / N;
      b[{t.first.h2, static_cast<int>(t.first.vars.size()), sk}].push_back(&t);
    }
    return b;
  };
  auto pruned_product = [&](const FP& p1, const FP& p2) {
    FP out(N);
    const auto b1 = buckets(p1), b2 = buckets(p2);
    for (auto& [k1, v1] : b1)
      for (auto& [k2, v2] : b2) {
        const int h2 = k1[0] + k2[0] + 2, n = k1[1] + k2[1], sk = k1[2] + k2[2];
        if (n == 0 || h2 % 2) continue;
        const int g = h2 / 2 + 1;
        if (g < 0 || g > gmax) continue;
        const int D = 3 * g - 3 + n - sk, chi = 2 * g - 2 + n;
        if (D < 0 || D + std::max(0, chi - chi_max) > Dmax) continue;
        for (auto* t1 : v1)
          for (auto* t2 : v2) {
            Mono mo{h2, {}};
            mo.vars.reserve(n);
            std::merge(t1->first.vars.begin(), t1->first.vars.end(), t2->first.vars.begin(), t2->first.vars.end(),
                       std::back_inserter(mo.vars));
            out.add(mo, t1->second * t2->second);
          }
      }
    return out;
  };

  double tame_defect = 0.0;
  std::vector<FP> Gs{G0};
  std::vector<std::map<int, FP>> dG;
  auto derivs = [&](const FP& g) {
    std::map<int, FP> out;
    for (auto& t : pp) {
      if (!out.count(t.qv)) out.emplace(t.qv, g.derivative(t.qv));
      if (!out.count(t.pv)) out.emplace(t.pv, g.derivative(t.pv));
    }
    return out;
  };
  for (int j = 0; j < Dmax; ++j) {
    const FP& Gj = Gs[j];
    dG.push_back(derivs(Gj));
    FP next(N);
    for (auto& t : lin) next += Gj.derivative(t.pv).times_q(t.qv) * t.c;
    for (auto& t : pp) {
      FP term = dG[j].at(t.qv).derivative(t.pv);
      term = term.times_hbar_half(2);
      term.prune(keep);
      for (int p = 0; p <= j; ++p) term += pruned_product(dG[p].at(t.qv), dG[j - p].at(t.pv));
      next += term * t.c;
    }
    for (auto& [mo, c] : next.terms()) {
      if (mo.vars.empty() || mo.h2 % 2) continue;
      int sk = 0;
      for (int v : mo.vars) sk += v / N;
      if (sk > 3 * (mo.h2 / 2) + static_cast<int>(mo.vars.size())) tame_defect = std::max(tame_defect, cabs(c));
    }
    next.prune(keep);
    next *= C(1) / C(j + 1);
    if (next.size() == 0) break;
    Gs.push_back(std::move(next));
  }
  FP G(N);
  for (auto& g : Gs) G += g;

  CorrelatorTable<C> table(N);
  const int nmax = chi_max + 2;
  for (auto& k : requested_keys(N, gmax, nmax)) {
    if (2 * k.g - 2 + k.n() > chi_max) continue;
    Mono mo{2 * (k.g - 1), {}};
    for (auto& x : k.ins) mo.vars.push_back(x.m * N + x.a);
    std::sort(mo.vars.begin(), mo.vars.end());
    C c = G.coeff(mo);
    for (std::size_t s = 0; s < mo.vars.size();) {
      std::size_t e = s;
      while (e < mo.vars.size() && mo.vars[e] == mo.vars[s]) ++e;
      for (std::size_t q = 2; q <= e - s; ++q) c *= C(static_cast<double>(q));
      s = e;
    }
    table.insert(k, {c, Provenance::oracle, 1.0});
  }
  if (tameness_defect) *tameness_defect = tame_defect;
  return table;
}

#define ANCESTREC_INSTANTIATE(C)                                                                              \
  template class FockPolynomial<C>;                                                                           \
  template C symplectic_form<C>(const Mat<C>&, const LaurentVector<C>&, const LaurentVector<C>&);             \
  template FockPolynomial<C> apply_phi_hat<C>(const Mat<C>&, const LaurentVector<C>&, const FockPolynomial<C>&); \
  template FockPolynomial<C> dpt_truncated<C>(const C&, int, int);                                            \
  template CorrelatorTable<C> ancestor_via_quantization<C>(const AnModel<C>&, const RMatrix<C>&,              \
                                                           const QuantizationOptions&, double*);

ANCESTREC_INSTANTIATE(std::complex<double>)
ANCESTREC_INSTANTIATE(complex_t<quad>)

}  // namespace ancestrec
