#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ancestrec/frobenius.hpp"

using namespace ancestrec;
using cd = std::complex<double>;

namespace {

std::vector<cd> random_point(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<cd> t(n);
  for (auto& x : t) x = cd(d(rng), d(rng));
  return t;
}

}  // namespace

TEST_CASE("A1 model") {
  auto m = build_model<cd>(1, {cd(0.7, 0.1)});
  CHECK(m.semisimple);
  CHECK(std::abs(m.xi[0]) < 1e-15);
  CHECK(std::abs(m.u[0] - cd(0.7, 0.1)) < 1e-15);
  CHECK(std::abs(m.Delta[0] - cd(1)) < 1e-15);
  CHECK(std::abs(m.eta(0, 0) - cd(1)) < 1e-15);
  CHECK(std::abs(m.tau[0] - cd(0.7, 0.1)) < 1e-15);
  auto f = canonical_frame(m);
  CHECK(std::abs(f.Psi(0, 0) - cd(1)) < 1e-15);
  CHECK(std::abs(f.mu(0, 0)) < 1e-15);
}

TEST_CASE("A2 at (-1, 0)") {
  auto m = build_model<cd>(2, {cd(-1), cd(0)});
  REQUIRE(m.semisimple);
  CHECK(std::abs(m.xi[0] - cd(1)) < 1e-14);
  CHECK(std::abs(m.xi[1] - cd(-1)) < 1e-14);
  CHECK(std::abs(m.u[0] - cd(-2.0 / 3)) < 1e-14);
  CHECK(std::abs(m.u[1] - cd(2.0 / 3)) < 1e-14);
  CHECK(std::abs(m.Delta[0] - cd(2)) < 1e-14);
  CHECK(std::abs(m.Delta[1] - cd(-2)) < 1e-14);
  CHECK(std::abs(m.eta(0, 1) - cd(1)) < 1e-14);
  CHECK(std::abs(m.eta(1, 0) - cd(1)) < 1e-14);
  CHECK(std::abs(m.eta(0, 0)) < 1e-14);
  CHECK(std::abs(m.eta(1, 1)) < 1e-14);
  CHECK(std::abs(m.tau[0] - cd(-1)) < 1e-15);
  CHECK(std::abs(m.tau[1]) < 1e-15);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      CHECK(std::abs(m.pairing_sum(m.v[a], m.v[b]) - m.eta(a, b)) < 1e-14);
  auto f = canonical_frame(m);
  CHECK(std::abs(f.theta(0, 0) - cd(-1.0 / 6)) < 1e-15);
  CHECK(std::abs(f.theta(1, 1) - cd(1.0 / 6)) < 1e-15);
}

TEST_CASE("A2 caustic is flagged") {
  auto m = build_model<cd>(2, {cd(0), cd(0)});
  CHECK(m.near_multiple_roots);
  CHECK_FALSE(m.semisimple);
  CHECK_THROWS_AS(canonical_frame(m), CausticError);
}

TEST_CASE("flat coordinates vanish at the origin") {
  for (int n = 1; n <= 5; ++n) {
    std::vector<cd> tau;
    Mat<cd> jac;
    flat_coordinates<cd>(n, std::vector<cd>(n, cd(0)), tau, jac);
    for (auto& x : tau) CHECK(std::abs(x) == 0.0);
  }
}

TEST_CASE("pairing is constant in flat coordinates") {
  std::mt19937 rng(3);
  for (int n = 2; n <= 5; ++n) {
    auto t0 = random_point(rng, n);
    auto m0 = build_model<cd>(n, t0);
    for (int k = 0; k < 5; ++k) {
      auto t = t0;
      auto dt = random_point(rng, n);
      for (int a = 0; a < n; ++a) t[a] += 0.1 * dt[a];
      auto m = build_model<cd>(n, t);
      CHECK((m.eta - m0.eta).norm() < 1e-8);
    }
  }
}

TEST_CASE("Frobenius algebra axioms") {
  std::mt19937 rng(5);
  for (int n = 2; n <= 5; ++n) {
    auto m = build_model<cd>(n, random_point(rng, n));
    REQUIRE(m.semisimple);
    // unit
    CHECK((m.structure[n - 1] - Mat<cd>::identity(n)).norm() < 1e-13);
    // (v_a . v_b, v_c) totally symmetric
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          cd abc(0), bca(0), acb(0);
          for (int e = 0; e < n; ++e) {
            abc += m.structure[a](b, e) * m.eta(e, c);
            bca += m.structure[b](c, e) * m.eta(e, a);
            acb += m.structure[a](c, e) * m.eta(e, b);
          }
          CHECK(std::abs(abc - bca) < 1e-10);
          CHECK(std::abs(abc - acb) < 1e-10);
        }
    // unit flow translates critical values
    for (int i = 0; i < n; ++i) CHECK(std::abs(m.du_dtau(i, n - 1) - cd(1)) < 1e-13);
    // degrees
    CHECK(m.d_a[n - 1] == 0.0);
    CHECK(std::abs(m.d_a[0] - m.d) < 1e-15);
  }
}

TEST_CASE("canonical frame") {
  std::mt19937 rng(9);
  for (int n = 2; n <= 5; ++n) {
    auto m = build_model<cd>(n, random_point(rng, n));
    auto f = canonical_frame(m);
    CHECK((f.Psi * f.PsiInv - Mat<cd>::identity(n)).norm() < 1e-10);
    CHECK((f.Psi.transpose() * m.eta * f.Psi - Mat<cd>::identity(n)).norm() < 1e-10);
    // E. diagonalizes to U: E acting on coordinates is the transpose of the row matrix
    Mat<cd> E = m.euler.transpose();
    Mat<cd> D = f.PsiInv * E * f.Psi;
    CHECK((D - Mat<cd>::diagonal(f.U)).norm() < 1e-8);
  }
}

TEST_CASE("quad model agrees with double") {
  using Q = complex_t<quad>;
  auto mq = build_model<Q>(3, {Q(0.3, 0.1), Q(-0.2, 0.05), Q(0.4)});
  auto md = build_model<cd>(3, {cd(0.3, 0.1), cd(-0.2, 0.05), cd(0.4)});
  for (int i = 0; i < 3; ++i) CHECK(std::abs(to_cd(mq.u[i]) - md.u[i]) < 1e-13);
  // quad roots are polished past double precision
  for (int i = 0; i < 3; ++i) CHECK(cabs(mq.dF(mq.xi[i])) < 1e-28);
}
