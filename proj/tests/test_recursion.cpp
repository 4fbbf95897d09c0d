#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ancestrec/dvv.hpp"
#include "ancestrec/recursion.hpp"

using namespace ancestrec;
using cd = std::complex<double>;

namespace {

double rel(cd a, cd b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("A1 against intersection numbers") {
  auto m = build_model<cd>(1, {cd(0.3, -0.2)});
  BuildInfo info;
  auto keys = requested_keys(1, 3, 4);
  auto tab = build_table(m, keys, {}, &info);
  double worst = 0.0;
  for (auto& k : keys) {
    std::vector<int> ks;
    for (auto& x : k.ins) ks.push_back(x.m);
    const double ref = dvv_intersection(k.g, ks).convert_to<double>();
    const double e = rel(tab.value(k), cd(ref));
    if (e > 1e-9) MESSAGE(k.str() << " " << tab.value(k) << " vs " << ref);
    worst = std::max(worst, e);
  }
  MESSAGE("K=" << info.K << " attempts=" << info.attempts << " closure=" << info.closure_size);
  CHECK(worst < 1e-9);
}

TEST_CASE("genus one from the recursion matches the seed") {
  for (int n : {2, 3}) {
    std::vector<cd> t(n, cd(0));
    t[0] = cd(-0.4, 0.1);
    t[n - 1] = cd(0.2, 0.05);
    if (n == 3) t[1] = cd(0.3, -0.1);
    auto m = build_model<cd>(n, t);
    auto pd = make_point_data(m, 12, -4, 4, 0);
    CorrelatorTable<cd> tab(n);
    seed_initial_data(m, pd.r, tab);
    for (int a = 0; a < n; ++a)
      for (int mm : {0, 1}) {
        const cd v = eo_step(pd, tab, 1, {a, mm}, {});
        const cd ref = tab.value(CorrelatorKey(1, {{a, mm}}));
        CHECK(rel(v, ref) < 1e-9);
      }
  }
}

TEST_CASE("genus zero three-point from the recursion") {
  auto m = build_model<cd>(3, {cd(0.25, 0.1), cd(-0.3, 0.2), cd(0.1, 0)});
  auto pd = make_point_data(m, 10, -3, 3, 0);
  CorrelatorTable<cd> tab(3);
  seed_initial_data(m, pd.r, tab);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const cd v = eo_step(pd, tab, 0, {a, 0}, {{b, 0}, {c, 0}});
        CHECK(rel(v, tab.value(CorrelatorKey(0, {{a, 0}, {b, 0}, {c, 0}}))) < 1e-10);
      }
}

TEST_CASE("distinguished slot and branch choices agree") {
  auto m = build_model<cd>(2, {cd(-0.35, 0.15), cd(0.2, -0.1)});
  auto keys = requested_keys(2, 2, 3);
  RecursionOptions opt;
  opt.all_slots = true;
  BuildInfo info;
  auto tab = build_table(m, keys, opt, &info);
  auto pd = make_point_data(m, info.K, -8, 12, 0);
  double worst = 0.0;
  for (auto& k : keys) {
    if (is_initial_key(k)) continue;
    for (int di = 1; di < k.n(); ++di) {
      Slots S = k.ins;
      const Insertion d = S[di];
      S.erase(S.begin() + di);
      worst = std::max(worst, rel(eo_step(pd, tab, k.g, d, S), tab.value(k)));
    }
  }
  CHECK(worst < 1e-8);
  opt.branch = {-1, 1};
  auto flipped = build_table(m, keys, opt);
  double wb = 0.0;
  for (auto& k : keys) wb = std::max(wb, rel(flipped.value(k), tab.value(k)));
  CHECK(wb < 1e-8);
}

TEST_CASE("string and dilaton equations") {
  auto m = build_model<cd>(2, {cd(0.3, -0.25), cd(-0.1, 0.2)});
  auto keys = requested_keys(2, 2, 4);
  auto tab = build_table(m, keys);
  const int unit = 1;
  for (auto& k : keys) {
    if (k.n() > 3) continue;
    // dilaton: <v_N psi, S>_g = (2g - 2 + n) <S>_g
    Slots d = k.ins;
    d.push_back({unit, 1});
    CorrelatorKey kd(k.g, d);
    if (kd.tame()) CHECK(rel(tab.value(kd), cd(2 * k.g - 2 + k.n()) * tab.value(k)) < 1e-8);
    // string for ancestors: <v_N, S>_g = sum_j <.., psi^{m_j - 1}, ..>_g
    Slots s = k.ins;
    s.push_back({unit, 0});
    cd rhs(0);
    for (int j = 0; j < k.n(); ++j) {
      if (k.ins[j].m == 0) continue;
      Slots q = k.ins;
      q[j].m -= 1;
      rhs += tab.value(k.g, q);
    }
    CorrelatorKey ks(k.g, s);
    if (ks.stable()) CHECK(rel(tab.value(ks), rhs) < 1e-8);
  }
}
