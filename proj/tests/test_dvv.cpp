#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "ancestrec/dvv.hpp"

using namespace ancestrec;

TEST_CASE("known intersection numbers") {
  CHECK(dvv_intersection(0, {0, 0, 0}) == 1);
  CHECK(dvv_intersection(1, {1}) == Rational(1, 24));
  CHECK(dvv_intersection(2, {4}) == Rational(1, 1152));
  CHECK(dvv_intersection(0, {1, 0, 0, 0}) == 1);
  CHECK(dvv_intersection(1, {0, 2}) == Rational(1, 24));
  CHECK(dvv_intersection(1, {1, 1}) == Rational(1, 24));
  CHECK(dvv_intersection(2, {2, 3}) == Rational(29, 5760));
  CHECK(dvv_intersection(3, {7}) == Rational(1, 82944));
  CHECK(dvv_intersection(0, {1, 1, 0, 0, 0}) == 2);
  CHECK(dvv_intersection(2, {3}) == 0);  // dimension
}

TEST_CASE("string and dilaton consistency") {
  for (int g = 0; g <= 3; ++g)
    for (int n = 1; n <= 4; ++n) {
      if (2 * g - 2 + n <= 0) continue;
      const int D = 3 * g - 3 + n;
      // all compositions of D into n parts, ordered
      std::vector<int> ks(n, 0);
      std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == n - 1) {
          ks[pos] = left;
          auto withdil = ks;
          withdil.push_back(1);
          CHECK(dvv_intersection(g, withdil) == Rational(2 * g - 2 + n) * dvv_intersection(g, ks));
          auto withstr = ks;
          withstr.push_back(0);
          Rational s = 0;
          for (int j = 0; j < n; ++j) {
            if (ks[j] == 0) continue;
            auto v = ks;
            v[j] -= 1;
            if (2 * g - 2 + n > 0) s += dvv_intersection(g, v);
          }
          if (2 * g - 2 + n + 1 > 0 && !(g == 0 && n == 2)) CHECK(dvv_intersection(g, withstr) == s);
          return;
        }
        for (int k = 0; k <= left; ++k) {
          ks[pos] = k;
          rec(pos + 1, left - k);
        }
      };
      rec(0, D);
    }
  CHECK_THROWS(dvv_intersection(0, {0, 0}));
}
