#include "ancestrec/recursion.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <type_traits>

namespace ancestrec {

template <class C>
PointData<C> make_point_data(const AnModel<C>& m, int K, int kmin, int kmax, int mmax, const std::vector<int>& branch,
                             double r_tol) {
  auto frame = canonical_frame(m, branch);
  return make_point_data(m, compute_r(m, frame, K, r_tol), kmin, kmax, mmax);
}

template <class C>
PointData<C> make_point_data(const AnModel<C>& m, RMatrix<C> r, int kmin, int kmax, int mmax) {
  auto V = v_matrices(r.R);
  std::vector<LocalExpansion<C>> local;
  for (int i = 0; i < m.n; ++i) local.emplace_back(m, r, V, i, kmin, kmax, mmax);
  return PointData<C>{m, std::move(r), std::move(V), std::move(local)};
}

bool is_initial_key(const CorrelatorKey& k) { return (k.g == 0 && k.n() == 3) || (k.g == 1 && k.n() == 1); }

template <class C>
void seed_initial_data(const AnModel<C>& m, const RMatrix<C>& r, CorrelatorTable<C>& table) {
  const int N = m.n;
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b)
      for (int c = b; c < N; ++c) {
        C v(0);
        for (int d = 0; d < N; ++d) v += m.structure[a](b, d) * m.eta(d, c);
        table.insert(CorrelatorKey(0, {{a, 0}, {b, 0}, {c, 0}}), {v, Provenance::initial, 1.0});
      }
  const Mat<C>& R1 = r.R.coeffs.at(1);
  for (int a = 0; a < N; ++a) {
    C psi(0), plain(0);
    for (int i = 0; i < N; ++i) {
      psi += m.du_dtau(i, a);
      plain += R1(i, i) * m.du_dtau(i, a) / C(2) + m.dDelta_dtau(i, a) / m.Delta[i] / C(48);
    }
    table.insert(CorrelatorKey(1, {{a, 1}}), {psi / C(24), Provenance::initial, 1.0});
    table.insert(CorrelatorKey(1, {{a, 0}}), {plain, Provenance::initial, 1.0});
  }
}

template <class C>
C eo_step(const PointData<C>& pd, const CorrelatorTable<C>& table, int g, const Insertion& d, const Slots& S,
          double* cancellation) {
  using PS = PuiseuxSeries<C>;
  C total(0);
  double mag = 0.0;
  for (const auto& loc : pd.local) {
    WickCycle<PS> cyc{[&](int a, int k) -> PS { return loc.pairing(-k, a); },
                      [&](int b, int k) -> PS { return loc.period(k + 1)[b]; }};
    const PS zero(loc.u(), kExact);
    std::function<PS(int, int)> prop = [&](int, int) -> PS { return loc.prop_diag(0); };
    const PS omega = assemble_omega<PS, C>(g, {&cyc, &cyc}, S, prop, table, zero);
    const PS kernel = loc.pairing(-1 - d.m, d.a) * loc.y().inverse();
    const PS integrand = kernel * omega;
    if (integrand.trunc() < -2)
      throw InsufficientOrder("residue needs order " + std::to_string(-2) + ", have " +
                              std::to_string(integrand.trunc()));
    const C res = puiseux_residue(integrand);
    mag += cabs(res);
    total += res;
  }
  total /= C(4);
  if (cancellation) {
    // capped: exact zeros by symmetry would report infinity
    const double t = cabs(total) * 4.0;
    *cancellation = mag > 0 ? std::min(1e16, mag / std::max(t, 1e-300)) : 1.0;
  }
  return total;
}

std::vector<CorrelatorKey> requested_keys(int N, int gmax, int nmax) {
  std::vector<CorrelatorKey> out;
  for (int g = 0; g <= gmax; ++g)
    for (int n = 1; n <= nmax; ++n) {
      if (2 * g - 2 + n <= 0) continue;
      const int D = 3 * g - 3 + n;
      // nondecreasing sequences of (a, m) with total m <= D
      Slots cur;
      std::function<void(int, int)> rec = [&](int from, int left) {
        if (static_cast<int>(cur.size()) == n) {
          out.emplace_back(g, cur);
          return;
        }
        const int maxm = D;
        for (int code = from; code < N * (maxm + 1); ++code) {
          const int m = code / N, a = code % N;
          if (m > left) break;
          cur.push_back({a, m});
          rec(code, left - m);
          cur.pop_back();
        }
      };
      rec(0, D);
    }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void direct_deps(int N, const CorrelatorKey& key, int di, std::vector<CorrelatorKey>& out) {
  const int g = key.g;
  Slots S = key.ins;
  S.erase(S.begin() + di);
  const int ns = static_cast<int>(S.size());
  for (int h = 0; h <= g; ++h)
    for (unsigned mask = 0; mask < (1u << ns); ++mask) {
      Slots T;
      for (int q = 0; q < ns; ++q)
        if ((mask >> q) & 1u) T.push_back(S[q]);
      const int nt = static_cast<int>(T.size());
      if (h == g && nt > ns - 1) continue;
      if (2 * h - 2 + nt + 1 <= 0) continue;
      int budget = 3 * h - 3 + nt + 1;
      for (auto& x : T) budget -= x.m;
      for (int k = 0; k <= budget; ++k)
        for (int b = 0; b < N; ++b) {
          Slots s2 = T;
          s2.push_back({b, k});
          out.emplace_back(h, s2);
        }
    }
  if (g >= 1) {
    int budget = 3 * (g - 1) - 3 + ns + 2;
    for (auto& x : S) budget -= x.m;
    for (int k = 0; k <= budget; ++k)
      for (int b = 0; b < N; ++b)
        for (int l = 0; l + k <= budget; ++l)
          for (int c = 0; c < N; ++c) {
            Slots s2 = S;
            s2.push_back({b, k});
            s2.push_back({c, l});
            CorrelatorKey ck(g - 1, s2);
            if (ck.stable()) out.push_back(std::move(ck));
          }
  }
}

}  // namespace

std::set<CorrelatorKey> dependency_closure(int N, const std::vector<CorrelatorKey>& targets, bool all_slots) {
  std::set<CorrelatorKey> seen;
  std::vector<CorrelatorKey> work;
  for (auto& k : targets)
    if (k.stable() && k.tame() && seen.insert(k).second) work.push_back(k);
  while (!work.empty()) {
    CorrelatorKey k = std::move(work.back());
    work.pop_back();
    if (is_initial_key(k)) continue;
    std::vector<CorrelatorKey> deps;
    const int nd = all_slots ? k.n() : 1;
    for (int di = 0; di < nd; ++di) direct_deps(N, k, di, deps);
    for (auto& d : deps)
      if (d.stable() && d.tame() && seen.insert(d).second) work.push_back(std::move(d));
  }
  return seen;
}

namespace {

template <class C>
CorrelatorTable<C> build_once(const AnModel<C>& m, const std::set<CorrelatorKey>& closure, int K,
                              const RecursionOptions& opt, BuildInfo& info) {
  int kmin = -1, kmax = 1;
  for (auto& k : closure) {
    for (auto& x : k.ins) kmin = std::min(kmin, -1 - x.m);
    kmax = std::max(kmax, 3 * k.g - 3 + k.n() + 1);
  }
  PointData<C> pd;
  if constexpr (std::is_same_v<C, std::complex<double>>) {
    if (opt.r_source) {
      const auto frame = canonical_frame(m, opt.branch);
      pd = make_point_data(m, opt.r_source->r_matrix(m, frame, K, opt.r_tol), kmin, kmax, 0);
    }
  }
  if (pd.local.empty()) pd = make_point_data(m, K, kmin, kmax, 0, opt.branch, opt.r_tol);
  info.r_ode = pd.r.residuals.max_ode();
  info.r_unitarity = pd.r.residuals.max_unitarity();
  CorrelatorTable<C> table(m.n);
  seed_initial_data(m, pd.r, table);

  std::map<std::pair<int, int>, std::vector<CorrelatorKey>> levels;
  for (auto& k : closure)
    if (!is_initial_key(k)) levels[{k.g, k.n()}].push_back(k);

  unsigned nthreads = opt.threads > 0 ? static_cast<unsigned>(opt.threads) : std::thread::hardware_concurrency();
  if (nthreads == 0) nthreads = 1;
  for (auto& [lvl, keys] : levels) {
    std::vector<C> values(keys.size());
    std::vector<double> canc(keys.size(), 1.0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&]() {
      for (;;) {
        const std::size_t j = next.fetch_add(1);
        if (j >= keys.size()) return;
        try {
          Slots S = keys[j].ins;
          const Insertion d = S.front();
          S.erase(S.begin());
          values[j] = eo_step(pd, table, keys[j].g, d, S, &canc[j]);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
          next = keys.size();
        }
      }
    };
    const unsigned nt = std::min<unsigned>(nthreads, static_cast<unsigned>(keys.size()));
    if (nt <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned q = 0; q < nt; ++q) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (err) std::rethrow_exception(err);
    for (std::size_t j = 0; j < keys.size(); ++j) {
      table.insert(keys[j], {values[j], Provenance::recursion, canc[j]});
      if (canc[j] > info.worst_cancellation) {
        info.worst_cancellation = canc[j];
        info.worst_key = keys[j];
      }
    }
  }
  return table;
}

}  // namespace

template <class C>
CorrelatorTable<C> build_table(const AnModel<C>& m, const std::vector<CorrelatorKey>& targets,
                               const RecursionOptions& opt, BuildInfo* info) {
  if (!m.semisimple) throw CausticError("build_table: point is not semisimple");
  for (auto& k : targets)
    for (auto& x : k.ins)
      if (x.a < 0 || x.a >= m.n || x.m < 0) throw std::invalid_argument("build_table: insertion out of range");
  const auto closure = dependency_closure(m.n, targets, opt.all_slots);
  int K = opt.K;
  if (K <= 0) {
    int top = 1;
    for (auto& k : closure) top = std::max(top, 3 * k.g - 3 + k.n());
    K = top + 2;
  }
  BuildInfo local;
  local.closure_size = closure.size();
  for (;;) {
    ++local.attempts;
    local.K = K;
    local.worst_cancellation = 1.0;
    try {
      auto t = build_once(m, closure, K, opt, local);
      if (info) *info = local;
      return t;
    } catch (const InsufficientOrder&) {
      if (K >= opt.max_K) throw;
      K = std::min(opt.max_K, K + 4);
    }
  }
}

#define ANCESTREC_INSTANTIATE(C)                                                                                    \
  template PointData<C> make_point_data<C>(const AnModel<C>&, int, int, int, int, const std::vector<int>&, double); \
  template PointData<C> make_point_data<C>(const AnModel<C>&, RMatrix<C>, int, int, int);                      \
  template void seed_initial_data<C>(const AnModel<C>&, const RMatrix<C>&, CorrelatorTable<C>&);                  \
  template C eo_step<C>(const PointData<C>&, const CorrelatorTable<C>&, int, const Insertion&, const Slots&,       \
                        double*);                                                                                 \
  template CorrelatorTable<C> build_table<C>(const AnModel<C>&, const std::vector<CorrelatorKey>&,                \
                                             const RecursionOptions&, BuildInfo*);

ANCESTREC_INSTANTIATE(std::complex<double>)
ANCESTREC_INSTANTIATE(complex_t<quad>)

}  // namespace ancestrec
