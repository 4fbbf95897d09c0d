#pragma once

// Correlator keys and tables, and the Wick assembly of the symmetric forms
// Omega_g^{c_1..c_r}(t, lambda; t) differentiated in a labelled list of t-slots.
//
// The assembly is generic in the value type X: Puiseux series at a critical
// value for the residue recursion, plain complex numbers on a contour.

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ancestrec/numeric.hpp"

namespace ancestrec {

/// v_a psi^m with a in 0..N-1 (flat index a+1).
struct Insertion {
  int a = 0;
  int m = 0;
  auto operator<=>(const Insertion&) const = default;
};
using Slots = std::vector<Insertion>;

struct CorrelatorKey {
  int g = 0;
  Slots ins;  // sorted
  CorrelatorKey() = default;
  CorrelatorKey(int g_, Slots s) : g(g_), ins(std::move(s)) { std::sort(ins.begin(), ins.end()); }
  int n() const { return static_cast<int>(ins.size()); }
  int psi_total() const {
    int s = 0;
    for (auto& x : ins) s += x.m;
    return s;
  }
  bool stable() const { return 2 * g - 2 + n() > 0; }
  bool tame() const { return psi_total() <= 3 * g - 3 + n(); }
  auto operator<=>(const CorrelatorKey&) const = default;
  std::string str() const;
};

inline std::string CorrelatorKey::str() const {
  std::string s = "<";
  for (std::size_t k = 0; k < ins.size(); ++k) {
    if (k) s += ",";
    s += "v" + std::to_string(ins[k].a + 1);
    if (ins[k].m) s += "psi^" + std::to_string(ins[k].m);
  }
  return s + ">_" + std::to_string(g) + "," + std::to_string(n());
}

class MissingDependency : public Error {
 public:
  MissingDependency(const CorrelatorKey& k)
      : Error("missing correlator dependency " + k.str()), key(k) {}
  CorrelatorKey key;
};

enum class Provenance { initial, recursion, oracle, contour };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::initial: return "initial";
    case Provenance::recursion: return "recursion";
    case Provenance::oracle: return "oracle";
    case Provenance::contour: return "contour";
  }
  return "?";
}

template <class C>
struct CorrelatorEntry {
  C value;
  Provenance provenance = Provenance::recursion;
  double cancellation = 1.0;  // ratio of the largest summand to the result
};

/// Symmetric correlators at one point. Unstable and non-tame keys read as 0.
template <class C>
class CorrelatorTable {
 public:
  explicit CorrelatorTable(int N = 0) : N_(N) {}
  int N() const { return N_; }

  bool contains(const CorrelatorKey& k) const { return values_.count(k) > 0; }
  C value(const CorrelatorKey& k) const {
    if (!k.stable() || !k.tame()) return C(0);
    auto it = values_.find(k);
    if (it == values_.end()) throw MissingDependency(k);
    return it->second.value;
  }
  C value(int g, const Slots& s) const { return value(CorrelatorKey(g, s)); }
  const CorrelatorEntry<C>* find(const CorrelatorKey& k) const {
    auto it = values_.find(k);
    return it == values_.end() ? nullptr : &it->second;
  }
  void insert(const CorrelatorKey& k, CorrelatorEntry<C> e) { values_[k] = std::move(e); }
  const std::map<CorrelatorKey, CorrelatorEntry<C>>& entries() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  int N_;
  std::map<CorrelatorKey, CorrelatorEntry<C>> values_;
};

/// One cycle label as seen by the Wick formula.
template <class X>
struct WickCycle {
  std::function<X(int a, int k)> minus;  // (I^{(-k)}_c, v_a)
  std::function<X(int b, int k)> plus;   // vector component b of I^{(k+1)}_c
};

template <class X>
struct WickOptions {
  // genus-1 term made only of propagators, independent of t
  bool include_pure_propagator = true;
};

namespace detail {

// All set partitions of {0..r-1} as block lists.
inline std::vector<std::vector<std::vector<int>>> set_partitions(int r) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<int> a(r, 0);
  std::function<void(int, int)> rec = [&](int pos, int mx) {
    if (pos == r) {
      std::vector<std::vector<int>> blocks(mx + 1);
      for (int i = 0; i < r; ++i) blocks[a[i]].push_back(i);
      out.push_back(blocks);
      return;
    }
    for (int b = 0; b <= mx + 1; ++b) {
      a[pos] = b;
      rec(pos + 1, std::max(mx, b));
    }
  };
  if (r > 0) {
    a[0] = 0;
    rec(1, 0);
  }
  return out;
}

}  // namespace detail

/// Sum over plus insertions of the cycles in `cyc` into <..., T>_h, with the
/// sign (-1)^{|cyc|} and (-1)^k per insertion.
template <class X, class C>
X plus_block(int h, const std::vector<const WickCycle<X>*>& cyc, const Slots& T, const CorrelatorTable<C>& table,
             const X& zero) {
  const int p = static_cast<int>(cyc.size());
  const int n = p + static_cast<int>(T.size());
  if (2 * h - 2 + n <= 0) return zero;
  int budget = 3 * h - 3 + n;
  for (auto& x : T) budget -= x.m;
  if (budget < 0) return zero;
  const int N = table.N();
  // innermost level carries scalars from the table
  std::function<X(int, int, Slots&)> rec = [&](int j, int left, Slots& ins) -> X {
    X acc = zero;
    for (int k = 0; k <= left; ++k)
      for (int b = 0; b < N; ++b) {
        ins.push_back({b, k});
        X inner = zero;
        if (j == p - 1) {
          Slots all = ins;
          all.insert(all.end(), T.begin(), T.end());
          const C v = table.value(h, all);
          ins.pop_back();
          if (v == C(0)) continue;
          X term = cyc[j]->plus(b, k) * v;
          if (k % 2) term = -term;
          acc += term;
          continue;
        }
        inner = rec(j + 1, left - k, ins);
        ins.pop_back();
        X term = cyc[j]->plus(b, k) * inner;
        if (k % 2) term = -term;
        acc += term;
      }
    return acc;
  };
  Slots ins;
  X r = rec(0, budget, ins);
  if (p % 2) r = -r;
  return r;
}

/// d^S Omega_g^{c_1..c_r} for a labelled slot list S.
template <class X, class C>
X assemble_omega(int g, const std::vector<const WickCycle<X>*>& cycles, const Slots& S,
                 const std::function<X(int, int)>& prop0, const CorrelatorTable<C>& table, const X& zero,
                 const WickOptions<X>& opt = {}) {
  const int r = static_cast<int>(cycles.size());
  const int ns = static_cast<int>(S.size());
  X total = zero;
  for (const auto& blocks : detail::set_partitions(r)) {
    const int nb = static_cast<int>(blocks.size());
    const int G = g - (r - nb);
    if (G < 0) continue;
    // type per block: 0 minus (size 1), 1 pair (size 2), 2 plus
    std::vector<std::vector<int>> choices;
    for (auto& b : blocks) {
      if (b.size() == 1) choices.push_back({0, 2});
      else if (b.size() == 2) choices.push_back({1, 2});
      else choices.push_back({2});
    }
    std::vector<int> type(nb, 0);
    std::function<void(int)> over_types = [&](int bi) {
      if (bi < nb) {
        for (int c : choices[bi]) {
          type[bi] = c;
          over_types(bi + 1);
        }
        return;
      }
      std::vector<int> minus_blocks, plus_blocks;
      X fixed = zero;
      bool have_fixed = false;
      for (int q = 0; q < nb; ++q) {
        if (type[q] == 0) minus_blocks.push_back(q);
        else if (type[q] == 2) plus_blocks.push_back(q);
        else {
          X pv = prop0(blocks[q][0], blocks[q][1]);
          fixed = have_fixed ? fixed * pv : pv;
          have_fixed = true;
        }
      }
      const int nm = static_cast<int>(minus_blocks.size());
      const int np = static_cast<int>(plus_blocks.size());
      if (nm > ns) return;
      if (np == 0 && (nm != ns || G != 0)) return;
      if (!opt.include_pure_propagator && nm == 0 && np == 0) return;
      // ordered injective choice of slots for the minus blocks
      std::vector<int> used(ns, 0), pick(nm, -1);
      std::function<void(int)> over_minus = [&](int j) {
        if (j < nm) {
          for (int s = 0; s < ns; ++s) {
            if (used[s]) continue;
            used[s] = 1;
            pick[j] = s;
            over_minus(j + 1);
            used[s] = 0;
          }
          return;
        }
        X base = zero;
        bool have = have_fixed;
        if (have_fixed) base = fixed;
        for (int j2 = 0; j2 < nm; ++j2) {
          const Insertion& in = S[pick[j2]];
          X mv = cycles[blocks[minus_blocks[j2]][0]]->minus(in.a, in.m);
          base = have ? base * mv : mv;
          have = true;
        }
        std::vector<int> rest;
        for (int s = 0; s < ns; ++s)
          if (!used[s]) rest.push_back(s);
        if (np == 0) {
          total += base;
          return;
        }
        // distribute remaining slots and genus among plus blocks
        const int nr = static_cast<int>(rest.size());
        std::vector<int> owner(nr, 0), genus(np, 0);
        std::function<void(int)> over_slots = [&](int s) {
          if (s < nr) {
            for (int q = 0; q < np; ++q) {
              owner[s] = q;
              over_slots(s + 1);
            }
            return;
          }
          std::function<void(int, int)> over_genus = [&](int q, int left) {
            if (q == np - 1) {
              genus[q] = left;
              // skip before touching the table if any block is unstable
              for (int q2 = 0; q2 < np; ++q2) {
                int cnt = static_cast<int>(blocks[plus_blocks[q2]].size());
                for (int s2 = 0; s2 < nr; ++s2) cnt += owner[s2] == q2;
                if (2 * genus[q2] - 2 + cnt <= 0) return;
              }
              X prod = base;
              bool hv = have;
              for (int q2 = 0; q2 < np; ++q2) {
                std::vector<const WickCycle<X>*> cyc;
                for (int c : blocks[plus_blocks[q2]]) cyc.push_back(cycles[c]);
                Slots T;
                for (int s2 = 0; s2 < nr; ++s2)
                  if (owner[s2] == q2) T.push_back(S[rest[s2]]);
                X pb = plus_block<X, C>(genus[q2], cyc, T, table, zero);
                prod = hv ? prod * pb : pb;
                hv = true;
              }
              total += prod;
              return;
            }
            for (int h = 0; h <= left; ++h) {
              genus[q] = h;
              over_genus(q + 1, left - h);
            }
          };
          over_genus(0, G);
        };
        over_slots(0);
      };
      over_minus(0);
    };
    over_types(0);
  }
  return total;
}

}  // namespace ancestrec
