#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ancestrec/rmatrix.hpp"

using namespace ancestrec;
using cd = std::complex<double>;

namespace {

std::vector<cd> random_point(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<cd> t(n);
  for (auto& x : t) x = cd(d(rng), d(rng));
  return t;
}

// Random point whose critical values are at least `gap` apart.
AnModel<cd> gapped_model(std::mt19937& rng, int n, double gap) {
  for (;;) {
    auto m = build_model<cd>(n, random_point(rng, n));
    if (m.semisimple && m.u_gap >= gap) return m;
  }
}

}  // namespace

TEST_CASE("A1 R-matrix is trivial") {
  auto m = build_model<cd>(1, {cd(0.4, -0.3)});
  auto f = canonical_frame(m);
  auto s = saddle_expansion(m, 0, Polynomial<cd>({cd(1)}), 5);
  CHECK(std::abs(s[0] - cd(1)) < 1e-15);
  for (int k = 1; k <= 5; ++k) CHECK(std::abs(s[k]) == 0.0);
  auto r = compute_r(m, f, 6);
  CHECK((r.R.coeffs[0] - Mat<cd>::identity(1)).norm() < 1e-15);
  for (int k = 1; k <= 6; ++k) CHECK(r.R.coeffs[k].norm() == 0.0);
  CHECK(r.residuals.max_unitarity() == 0.0);
}

TEST_CASE("saddle expansion of dF vanishes") {
  std::mt19937 rng(1);
  for (int n = 2; n <= 4; ++n) {
    auto m = gapped_model(rng, n, 0.1);
    for (int i = 0; i < n; ++i) {
      std::vector<double> mag;
      auto s = saddle_expansion(m, i, m.dF, 8, &mag);
      for (int k = 0; k <= 8; ++k) CHECK(std::abs(s[k]) < 1e-13 * std::max(1.0, mag[k]));
    }
    // arbitrary points in quad precision
    using Q = complex_t<quad>;
    auto t = random_point(rng, n);
    std::vector<Q> tq;
    for (auto& x : t) tq.push_back(from_cd<Q>(x));
    auto mq = build_model<Q>(n, tq);
    for (int i = 0; i < n; ++i) {
      std::vector<double> mag;
      auto s = saddle_expansion(mq, i, mq.dF, 8, &mag);
      for (int k = 0; k <= 8; ++k) CHECK(cabs(s[k]) < 1e-30 * std::max(1.0, mag[k]));
    }
  }
  CHECK_THROWS(saddle_expansion(build_model<cd>(2, {cd(-1), cd(0)}), 0, Polynomial<cd>({cd(1)}), -1));
}

TEST_CASE("A2 at (-1, 0): R1 off-diagonal from mu") {
  auto m = build_model<cd>(2, {cd(-1), cd(0)});
  auto f = canonical_frame(m);
  auto r = compute_r(m, f, 4);
  const auto& R1 = r.R.coeffs[1];
  CHECK(std::abs(R1(0, 1) - f.mu(0, 1) / (f.U[0] - f.U[1])) < 1e-13);
  CHECK(std::abs(R1(1, 0) - f.mu(1, 0) / (f.U[1] - f.U[0])) < 1e-13);
  CHECK((R1 - R1.transpose()).norm() < 1e-10);
  // independent value of the z^1 coefficient: diagonal of [U, R2] = (mu - 1) R1
  Mat<cd> rhs = (f.mu - Mat<cd>::identity(2)) * R1;
  CHECK(std::abs(rhs(0, 0)) < 1e-12);
  CHECK(std::abs(rhs(1, 1)) < 1e-12);
}

TEST_CASE("certificates through K = 8") {
  std::mt19937 rng(17);
  for (int n = 2; n <= 4; ++n)
    for (int trial = 0; trial < 3; ++trial) {
      auto m = gapped_model(rng, n, 0.1);
      auto f = canonical_frame(m);
      auto r = compute_r(m, f, 8);
      CHECK(r.residuals.max_ode() < 1e-10);
      for (int k = 0; k <= 8; ++k) {
        double sc = 1.0;
        for (int a = 0; a <= k; ++a) sc = std::max(sc, r.R.coeffs[a].norm() * r.R.coeffs[k - a].norm());
        CHECK(r.residuals.unitarity[k] / sc < 1e-10);
      }
      CHECK((r.R.coeffs[1] - r.R.coeffs[1].transpose()).norm() < 1e-10);
    }
}

TEST_CASE("flatness of J = Psi R exp(U/z) by finite differences") {
  std::mt19937 rng(23);
  const int n = 3, K = 4;
  auto t0 = gapped_model(rng, n, 0.1).t;
  const double h = 1e-4;
  // assemble d/dtau_b from d/dt^a: d/dtau_b = sum_a (dt^a/dtau_b) d/dt^a
  auto m0 = build_model<cd>(n, t0);
  auto f0 = canonical_frame(m0);
  auto r0 = compute_r(m0, f0, K);
  std::vector<std::vector<Mat<cd>>> dPR(n, std::vector<Mat<cd>>(K + 1));
  for (int a = 0; a < n; ++a) {
    auto tp = t0, tm = t0;
    tp[a] += h;
    tm[a] -= h;
    auto mp = build_model<cd>(n, tp), mm = build_model<cd>(n, tm);
    auto fp = canonical_frame(mp), fm = canonical_frame(mm);
    auto rp = compute_r(mp, fp, K), rmm = compute_r(mm, fm, K);
    for (int k = 0; k <= K; ++k)
      dPR[a][k] = (fp.Psi * rp.R.coeffs[k] - fm.Psi * rmm.R.coeffs[k]) * cd(1.0 / (2 * h));
  }
  for (int b = 0; b < n; ++b) {
    Mat<cd> Mb = m0.structure[b].transpose();
    std::vector<cd> dU(n);
    for (int i = 0; i < n; ++i) dU[i] = m0.du_dtau(i, b);
    for (int k = 1; k <= K; ++k) {
      Mat<cd> d(n, n);
      for (int a = 0; a < n; ++a) d += dPR[a][k - 1] * m0.dt_dtau(b, a);
      Mat<cd> PR = f0.Psi * r0.R.coeffs[k];
      Mat<cd> res = d + PR * Mat<cd>::diagonal(dU) - Mb * PR;
      CHECK(res.norm() < 1e-5 * (1.0 + PR.norm()));
    }
  }
}

TEST_CASE("near caustic residuals are finite") {
  auto m = build_model<cd>(2, {cd(-1e-3), cd(0)});
  auto f = canonical_frame(m);
  auto r = compute_r(m, f, 4, 1e300);
  for (double x : r.residuals.ode) CHECK(std::isfinite(x));
  for (double x : r.residuals.unitarity) CHECK(std::isfinite(x));
  CHECK(r.R.coeffs[4].norm() > r.R.coeffs[1].norm());
}

TEST_CASE("quad R-matrix") {
  using Q = complex_t<quad>;
  auto m = build_model<Q>(2, {Q(-0.01), Q(0)});
  auto f = canonical_frame(m);
  auto r = compute_r(m, f, 8, 1e-25);
  CHECK(r.residuals.max_ode() < 1e-25);
}
