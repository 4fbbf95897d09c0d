#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ancestrec/local_data.hpp"

using namespace ancestrec;
using cd = std::complex<double>;
using PS = PuiseuxSeries<cd>;

namespace {

double dist(const PS& a, const PS& b) {
  const int tr = std::min(a.trunc(), b.trunc());
  double m = 0.0;
  for (int e = std::min(a.low(), b.low()); e <= tr; ++e) m = std::max(m, std::abs(a.coeff(e) - b.coeff(e)));
  return m;
}

struct Setup {
  AnModel<cd> m;
  CanonicalFrame<cd> f;
  RMatrix<cd> r;
  VMatrices<cd> V;
  Setup(int n, std::vector<cd> t, int K)
      : m(build_model<cd>(n, t)), f(canonical_frame(m)), r(compute_r(m, f, K)), V(v_matrices(r.R)) {}
};

}  // namespace

TEST_CASE("A1 periods") {
  const cd u(0.2, 0.1);
  auto p0 = a1_period<cd>(0, u);
  CHECK(std::abs(p0.coeff(-1) - std::sqrt(2.0)) < 1e-15);
  auto pm1 = a1_period<cd>(-1, u);
  CHECK(std::abs(pm1.coeff(1) - 2.0 * std::sqrt(2.0)) < 1e-15);
  for (int k = -6; k <= 6; ++k) CHECK(dist(a1_period<cd>(k, u).differentiate(), a1_period<cd>(k + 1, u)) < 1e-13);
}

TEST_CASE("lambda-derivative compatibility of the period table") {
  Setup s(3, {cd(0.3, -0.2), cd(-0.5, 0.1), cd(0.2)}, 8);
  LocalExpansion<cd> L(s.m, s.r, s.V, 1, -6, 5, 3);
  for (int k = -6; k < 5; ++k)
    for (int b = 0; b < 3; ++b)
      CHECK(dist(L.period(k)[b].differentiate(), L.period(k + 1)[b]) < 1e-14 * L.period(k + 1)[b].max_abs());
}

TEST_CASE("leading terms of negative periods") {
  Setup s(2, {cd(-1), cd(0)}, 6);
  for (int i = 0; i < 2; ++i)
    for (int mm = 0; mm <= 3; ++mm) {
      auto I = period_expansion(s.m, s.r, i, -1 - mm);
      // canonical components Psi^{-1} I
      double df = 1.0;
      for (int q = 1; q <= mm; ++q) df *= 2 * q + 1;
      const double lead = 2.0 * std::pow(2.0, mm + 0.5) / df;
      for (int k = 0; k < 2; ++k) {
        cd c0(0), c1(0);
        for (int b = 0; b < 2; ++b) {
          c0 += s.f.PsiInv(k, b) * I[b].coeff(2 * mm + 1);
          c1 += s.f.PsiInv(k, b) * I[b].coeff(2 * mm + 3);
        }
        CHECK(std::abs(c0 - (k == i ? cd(lead) : cd(0))) < 1e-12);
        CHECK(std::abs(c1 - (-s.r.R.coeffs[1](k, i) * lead * 2.0 / (2 * mm + 3.0))) < 1e-12);
      }
    }
}

TEST_CASE("A1 reduces to closed forms") {
  Setup s(1, {cd(0.4)}, 6);
  for (int k = -4; k <= 4; ++k) {
    auto I = period_expansion(s.m, s.r, 0, k);
    CHECK(dist(I[0], a1_period<cd>(k, cd(0.4))) < 1e-15);
  }
  for (auto& [kl, v] : s.V.V) CHECK(v.norm() == 0.0);
  auto P0 = propagator_diag(s.r, s.V, 0, 0, cd(0.4));
  CHECK(std::abs(P0.coeff(-4) - 0.25) < 1e-15);
  for (int e = -3; e <= P0.trunc(); ++e) CHECK(std::abs(P0.coeff(e)) < 1e-15);
}

TEST_CASE("V matrices") {
  Setup s(3, {cd(0.3, -0.2), cd(-0.5, 0.1), cd(0.2)}, 8);
  CHECK((s.V(0, 0) - s.r.R.coeffs[1]).norm() < 1e-12);
  for (int k = 0; k <= 7; ++k)
    for (int l = 0; k + l <= 7; ++l) CHECK((s.V(k, l) - s.V(l, k).transpose()).norm() < 1e-10 * (1 + s.V(k, l).norm()));
  CHECK(s.V.consistency < 1e-10);
  CHECK_THROWS_AS(s.V(5, 3), InsufficientOrder);
  // corrupted R violates unitarity
  auto bad = s.r.R;
  bad.coeffs[2](0, 1) += cd(0.1);
  CHECK_THROWS(v_matrices(bad));
}

TEST_CASE("diagonal propagator") {
  Setup s(2, {cd(-1), cd(0)}, 6);
  for (int i = 0; i < 2; ++i) {
    auto P0 = propagator_diag(s.r, s.V, i, 0, s.m.u[i]);
    CHECK(std::abs(P0.coeff(-4) - 0.25) < 1e-15);
    CHECK(std::abs(P0.coeff(-2) - 2.0 * s.r.R.coeffs[1](i, i)) < 1e-13);
    CHECK(P0.trunc() == 2 * 6 - 3);
    for (int e = P0.low(); e <= P0.trunc(); ++e)
      if (e % 2) CHECK(std::abs(P0.coeff(e)) == 0.0);
  }
}

TEST_CASE("unit-direction shift") {
  const std::vector<cd> t{cd(0.3, -0.2), cd(-0.5, 0.1), cd(0.2)};
  auto ts = t;
  const cd c(0.37, -0.11);
  ts[2] -= c;
  Setup a(3, t, 6), b(3, ts, 6);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(a.m.u[i] - c - b.m.u[i]) < 1e-12);
    for (int k = -3; k <= 3; ++k) {
      auto Ia = period_expansion(a.m, a.r, i, k), Ib = period_expansion(b.m, b.r, i, k);
      for (int q = 0; q < 3; ++q) {
        double m = 0.0;
        for (int e = Ia[q].low(); e <= Ia[q].trunc(); ++e) m = std::max(m, std::abs(Ia[q].coeff(e) - Ib[q].coeff(e)));
        CHECK(m < 1e-8);
      }
    }
  }
}
