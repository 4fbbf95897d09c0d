#pragma once

// Local topological recursion for ancestor correlators at a semisimple point.
//
//   <v_a psi^m, S>_g = 1/4 sum_i Res_{lambda = u_i}
//        (I^{(-1-m)}_{beta_i}, v_a) / (I^{(-1)}_{beta_i}, 1) * d^S Omega_g^{beta_i beta_i}

#include <set>
#include <vector>

#include "ancestrec/local_data.hpp"
#include "ancestrec/wick.hpp"

namespace ancestrec {

/// Supplies R at double precision points, e.g. from a cache. The result must
/// be for frame f and have order K.
class RSource {
 public:
  virtual ~RSource() = default;
  virtual RMatrix<std::complex<double>> r_matrix(const AnModel<std::complex<double>>& m,
                                                 const CanonicalFrame<std::complex<double>>& f, int K,
                                                 double tol) = 0;
};

struct RecursionOptions {
  int K = 0;              // R truncation; 0 picks one from the requested range
  int max_K = 64;         // stop growing K after InsufficientOrder here
  double r_tol = 1e-8;    // R certificates
  int threads = 0;        // 0 = hardware concurrency
  bool all_slots = false; // closure large enough for every distinguished slot
  std::vector<int> branch;
  RSource* r_source = nullptr;  // used for complex<double> only
};

/// Everything the residue formula needs at one point.
template <class C>
struct PointData {
  AnModel<C> model;
  RMatrix<C> r;
  VMatrices<C> V;
  std::vector<LocalExpansion<C>> local;  // one per critical value
};

template <class C>
PointData<C> make_point_data(const AnModel<C>& m, int K, int kmin, int kmax, int mmax,
                             const std::vector<int>& branch = {}, double r_tol = 1e-8);

template <class C>
PointData<C> make_point_data(const AnModel<C>& m, RMatrix<C> r, int kmin, int kmax, int mmax);

/// <v_a v_b v_c>_0, <v_a psi>_1 and <v_a>_1.
template <class C>
void seed_initial_data(const AnModel<C>& m, const RMatrix<C>& r, CorrelatorTable<C>& table);

bool is_initial_key(const CorrelatorKey& k);

/// One residue step with slot d distinguished. `cancellation` receives
/// sum_i |Res_i| / |result|.
template <class C>
C eo_step(const PointData<C>& pd, const CorrelatorTable<C>& table, int g, const Insertion& d, const Slots& S,
          double* cancellation = nullptr);

/// Stable tame keys with g <= gmax and 1 <= n <= nmax.
std::vector<CorrelatorKey> requested_keys(int N, int gmax, int nmax);

/// Keys needed to evaluate `targets` by eo_step (targets included).
std::set<CorrelatorKey> dependency_closure(int N, const std::vector<CorrelatorKey>& targets, bool all_slots);

struct BuildInfo {
  int K = 0;
  int attempts = 0;
  std::size_t closure_size = 0;
  double worst_cancellation = 1.0;
  CorrelatorKey worst_key;
  double r_ode = 0.0;        // residuals of the R that was used
  double r_unitarity = 0.0;
};

/// Table containing at least `targets`. Grows K on InsufficientOrder.
template <class C>
CorrelatorTable<C> build_table(const AnModel<C>& m, const std::vector<CorrelatorKey>& targets,
                               const RecursionOptions& opt = {}, BuildInfo* info = nullptr);

}  // namespace ancestrec
