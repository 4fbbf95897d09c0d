#include "ancestrec/dvv.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ancestrec {

namespace {

Rational dfact(int k) {
  // (2k-1)!!, with (-1)!! = 1
  Rational r = 1;
  for (int j = 2 * k - 1; j > 1; j -= 2) r *= j;
  return r;
}

bool stable(int g, int n) { return 2 * g - 2 + n > 0; }

}  // namespace

std::size_t IntersectionCache::size() const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  return cache_.size();
}

Rational IntersectionCache::get(int g, std::vector<int> ks) {
  const int n = static_cast<int>(ks.size());
  if (g < 0 || !stable(g, n)) throw std::invalid_argument("dvv_intersection: unstable input");
  for (int k : ks)
    if (k < 0) throw std::invalid_argument("dvv_intersection: negative psi power");
  if (std::accumulate(ks.begin(), ks.end(), 0) != 3 * g - 3 + n) return 0;
  std::sort(ks.begin(), ks.end());
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto key = std::make_pair(g, ks);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Rational v = compute(g, ks);
  cache_.emplace(key, v);
  return v;
}

Rational IntersectionCache::compute(int g, const std::vector<int>& ks) {
  const int n = static_cast<int>(ks.size());
  if (g == 0 && n == 3) return 1;  // all zero by dimension
  if (g == 1 && n == 1) return Rational(1, 24);

  auto sub = [&](int g2, std::vector<int> v) -> Rational {
    if (g2 < 0 || !stable(g2, static_cast<int>(v.size()))) return 0;
    for (int k : v)
      if (k < 0) return 0;
    return get(g2, std::move(v));
  };

  if (ks.front() == 0) {
    // string equation
    std::vector<int> rest(ks.begin() + 1, ks.end());
    Rational acc = 0;
    for (std::size_t j = 0; j < rest.size(); ++j) {
      if (rest[j] == 0) continue;
      auto v = rest;
      v[j] -= 1;
      acc += sub(g, v);
    }
    return acc;
  }

  // DVV on the largest insertion tau_{k+1}
  const int k = ks.back() - 1;
  std::vector<int> S(ks.begin(), ks.end() - 1);
  Rational acc = 0;
  for (std::size_t j = 0; j < S.size(); ++j) {
    auto v = S;
    const int d = v[j];
    v[j] = d + k;
    acc += dfact(k + d + 1) / dfact(d) * sub(g, v);
  }
  Rational half = 0;
  const int m = static_cast<int>(S.size());
  for (int r = 0; r <= k - 1; ++r) {
    const int s = k - 1 - r;
    const Rational w = dfact(r + 1) * dfact(s + 1);
    auto v = S;
    v.push_back(r);
    v.push_back(s);
    Rational term = sub(g - 1, v);
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      std::vector<int> I{r}, J{s};
      for (int q = 0; q < m; ++q) ((mask >> q) & 1u ? I : J).push_back(S[q]);
      for (int g1 = 0; g1 <= g; ++g1) {
        const Rational a = sub(g1, I);
        if (a == 0) continue;
        term += a * sub(g - g1, J);
      }
    }
    half += w * term;
  }
  acc += half / 2;
  return acc / dfact(k + 2);
}

Rational dvv_intersection(int g, const std::vector<int>& ks) {
  static IntersectionCache cache;
  return cache.get(g, ks);
}

}  // namespace ancestrec
