#pragma once

// Witten-Kontsevich intersection numbers <tau_{k_1} ... tau_{k_n}>_g by the
// DVV (Virasoro) recursion, in exact rational arithmetic.

#include <map>
#include <mutex>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ancestrec {

using Rational = boost::multiprecision::cpp_rational;

class IntersectionCache {
 public:
  /// Exact value; zero outside the dimension constraint. Throws on unstable input.
  Rational get(int g, std::vector<int> ks);
  std::size_t size() const;

 private:
  Rational compute(int g, const std::vector<int>& ks);
  mutable std::recursive_mutex mu_;
  std::map<std::pair<int, std::vector<int>>, Rational> cache_;
};

/// Process-wide cache.
Rational dvv_intersection(int g, const std::vector<int>& ks);

}  // namespace ancestrec
