#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ancestrec/caustic.hpp"

using namespace ancestrec;

namespace {

double max_diff(const std::vector<cd>& a, const std::vector<cd>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double max_abs(const std::vector<cd>& a) {
  double m = 0.0;
  for (auto& x : a) m = std::max(m, std::abs(x));
  return m;
}

// distance up to the sign of the cycle
double signed_diff(const std::vector<cd>& a, const std::vector<cd>& b) {
  std::vector<cd> nb(b);
  for (auto& x : nb) x = -x;
  return std::min(max_diff(a, b), max_diff(a, nb)) / std::max(1.0, max_abs(a));
}

double nearest_other(const AnModel<cd>& m, int i) {
  double d = 1e300;
  for (int j = 0; j < m.n; ++j)
    if (j != i) d = std::min(d, std::abs(m.u[j] - m.u[i]));
  return d;
}

// A3 point with two nearly merged critical points at 0.5 and b
AnModel<cd> a3_near_caustic(double b) {
  const double a = 0.5;
  return build_model<cd>(3, {cd((a * b - (a + b) * (a + b)) / 2), cd(a * b * (a + b)), cd(0.1)});
}

}  // namespace

TEST_CASE("root periods agree with the expansions at each critical value") {
  for (auto [n, t] : {std::pair{2, std::vector<cd>{cd(-0.35, 0.1), cd(0.15, 0.05)}},
                      std::pair{3, std::vector<cd>{cd(0.3, -0.2), cd(-0.25, 0.1), cd(0.15, 0.05)}}}) {
    auto m = build_model<cd>(n, t);
    auto r = compute_r(m, canonical_frame(m), 16);
    RootPeriods P(m, -4, 3);
    for (int i = 0; i < n; ++i) {
      const cd lam = m.u[i] + cd(0.1, 0.05) * nearest_other(m, i);
      const auto x = P.roots(lam);
      const auto w = vanishing_cycle(P, i, lam);
      const cd s = std::sqrt(lam - m.u[i]);
      for (int k = -3; k <= 3; ++k) {
        auto ps = period_expansion(m, r, i, k);
        std::vector<cd> ser(n);
        for (int b = 0; b < n; ++b) ser[b] = ps[b].evaluate_s(s);
        CHECK(signed_diff(P.vector(k, x, w), ser) < 1e-9);
      }
    }
  }
}

TEST_CASE("ode continuation reproduces root periods and the local monodromy") {
  auto m = build_model<cd>(3, {cd(0.3, -0.2), cd(-0.25, 0.1), cd(0.15, 0.05)});
  auto r = compute_r(m, canonical_frame(m), 12);
  RootPeriods P(m, -2, 2);
  for (int i = 0; i < m.n; ++i) {
    const double d = nearest_other(m, i);
    const cd lam = m.u[i] + cd(0.3, 0.2) * d;
    for (int k = -1; k <= 1; ++k) {
      const auto I = ode_period(m, r, i, k, lam);
      CHECK(signed_diff(P.vector(k, P.roots(lam), vanishing_cycle(P, i, lam)), I) < 1e-8);
      // once around u_i alone flips the vanishing cycle
      std::vector<cd> loop;
      for (int q = 0; q <= 16; ++q) loop.push_back(m.u[i] + (lam - m.u[i]) * std::polar(1.0, 2 * M_PI * q / 16));
      const auto J = ode_continue(m, k, I, loop);
      std::vector<cd> minus(I);
      for (auto& x : minus) x = -x;
      CHECK(max_diff(J, minus) < 1e-8 * std::max(1.0, max_abs(I)));
    }
  }
}

TEST_CASE("shifting t along the unit shifts lambda") {
  auto m = build_model<cd>(2, {cd(-0.3, 0.1), cd(0.2)});
  const cd lam(0.4, -0.1);
  auto ms = build_model<cd>(2, {cd(-0.3, 0.1), cd(0.2) - lam});
  RootPeriods P(m, -2, 2), Ps(ms, -2, 2);
  auto x = P.roots(lam), xs = Ps.roots(cd(0));
  std::vector<cd> w = {cd(1), cd(-1), cd(0)};
  // same root set; match labels by position
  std::vector<cd> xs2(3);
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l)
      if (std::abs(x[j] - xs[l]) < 1e-12) xs2[j] = xs[l];
  for (int k = 0; k <= 2; ++k) CHECK(max_diff(P.vector(k, x, w), Ps.vector(k, xs2, w)) < 1e-10);
}

TEST_CASE("going around the A2 cluster permutes the roots cyclically") {
  auto m = build_model<cd>(2, {cd(-0.1), cd(0)});
  const auto cl = find_cluster(m);
  RootPeriods P(m, -1, 1);
  const cd l0 = cl.center + cl.radius;
  const auto x0 = P.roots(l0);
  const auto x1 = continue_roots(m.F, x0, [&](double tau) { return cl.center + cl.radius * std::polar(1.0, 2 * M_PI * tau); });
  std::vector<int> perm(3, -1);
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l)
      if (std::abs(x1[j] - x0[l]) < 1e-10) perm[j] = l;
  for (int j = 0; j < 3; ++j) {
    CHECK(perm[j] >= 0);
    CHECK(perm[j] != j);
  }
}

TEST_CASE("propagators: closed form, series and integral definition") {
  auto m = build_model<cd>(2, {cd(-0.35, 0.1), cd(0.15, 0.05)});
  auto r = compute_r(m, canonical_frame(m), 18);
  auto V = v_matrices(r.R);
  RootPeriods P(m, -2, 3);
  for (int i = 0; i < m.n; ++i) {
    const double d = nearest_other(m, i);
    const cd lam = m.u[i] + cd(0.12, 0.05) * d;
    const auto x = P.roots(lam);
    const auto w = vanishing_cycle(P, i, lam);
    const cd s = std::sqrt(lam - m.u[i]);
    const cd p0 = propagator_diag(r, V, i, 0, m.u[i]).evaluate_s(s);
    CHECK(std::abs(P.propagator0(x, w, w) - p0) < 1e-9 * std::max(1.0, std::abs(p0)));
    const cd mu = lam + (lam - m.u[i]) * cd(0.3, 0.1);
    cd series = cd(2) / ((lam - mu) * (lam - mu));
    for (int k = 0; k <= 14; ++k) series += propagator_diag(r, V, i, k, m.u[i]).evaluate_s(s) * std::pow(mu - lam, k);
    const cd cross = propagator_cross(P, i, w, w, lam, mu);
    CHECK(std::abs(cross - series) < 1e-6 * std::abs(series));
    // mixed cycles: the integral definition is the Bergman kernel
    const auto wo = vanishing_cycle(P, 1 - i, lam);
    const auto xm = continue_roots(m.F, x, [&](double tau) { return lam + (mu - lam) * tau; });
    const cd mixed = propagator_cross(P, i, wo, w, lam, mu);
    CHECK(std::abs(mixed - P.bergman(x, xm, wo, w)) < 1e-8 * std::abs(mixed));
  }
}

TEST_CASE("contour integral equals the cluster residues") {
  SUBCASE("A2, genus 0 with three slots") {
    auto rep = verify_theorem2(build_model<cd>(2, {cd(-0.1), cd(0)}), 0, 3, 1e-9);
    CHECK(rep.rows.size() > 10);
    CHECK(rep.ok);
  }
  SUBCASE("A2 off the real line, genus 1") {
    auto rep = verify_theorem2(build_model<cd>(2, {cd(-0.2, 0.1), cd(0.05)}), 1, 2, 1e-9);
    CHECK(rep.ok);
  }
  SUBCASE("cluster of two critical values inside A3") {
    auto m = a3_near_caustic(0.6);
    auto cl = find_cluster(m);
    CHECK(((cl.i == 0 && cl.j == 1) || std::abs(m.u[cl.i] - m.u[cl.j]) < 1e-2));
    auto rep = verify_theorem2(m, 1, 1, 1e-9);
    CHECK(rep.ok);
  }
}

TEST_CASE("contour table at the A2 caustic matches the limit from one side") {
  const auto keys = requested_keys(2, 1, 3);
  auto ct = build_table_contour(build_model<cd>(2, {cd(0), cd(0)}), keys);
  // recursion at t = (-eps, 0) for small eps; correlators are polynomial in eps to this order
  std::vector<double> h;
  std::vector<CorrelatorTable<cd>> tabs;
  for (int e = 4; e <= 8; ++e) {
    const double eps = std::ldexp(1.0, -e);
    h.push_back(eps);
    std::vector<complex_t<quad>> t = {complex_t<quad>(-eps), complex_t<quad>(0)};
    auto tq = build_table<complex_t<quad>>(build_model<complex_t<quad>>(2, t), keys);
    CorrelatorTable<cd> tc(2);
    for (auto& [k, e2] : tq.entries()) tc.insert(k, {to_cd(e2.value), e2.provenance, 1.0});
    tabs.push_back(std::move(tc));
  }
  for (auto& k : keys) {
    std::vector<cd> v;
    for (auto& t : tabs) v.push_back(t.value(k));
    CHECK(std::abs(richardson(h, v) - ct.value(k)) < 1e-8);
  }
}

TEST_CASE("richardson removes polynomial error terms") {
  std::vector<double> h = {0.5, 0.25, 0.125, 0.0625};
  std::vector<cd> v;
  // degree 2: exact with any three of the points
  for (double x : h) v.push_back(cd(2.0) + 3.0 * x - 0.5 * x * x);
  double err = 1.0;
  CHECK(std::abs(richardson(h, v, &err) - 2.0) < 1e-13);
  CHECK(err < 1e-12);
}

TEST_CASE("bad input is rejected") {
  auto m = build_model<cd>(2, {cd(0), cd(0)});
  CHECK_THROWS_AS(verify_theorem2(m, 1, 1, 1e-5), CausticError);
  CHECK_THROWS_AS(build_table_contour(build_model<cd>(3, {cd(0.1), cd(0.2), cd(0)}), requested_keys(3, 1, 2)),
                  std::invalid_argument);
  ContourOptions bad;
  bad.max_nodes = 100;
  CHECK_THROWS_AS(build_table_contour(m, requested_keys(2, 1, 3), bad), std::invalid_argument);
}
