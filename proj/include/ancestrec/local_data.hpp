#pragma once

// Puiseux data at one critical value: A1 periods, period expansions of the
// vanishing cycle beta_i, V_kl matrices and the diagonal propagator.

#include <map>
#include <vector>

#include "ancestrec/rmatrix.hpp"

namespace ancestrec {

class InsufficientOrder : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Closed-form A1 period I^{(k)}(u, lambda) in s = (lambda - u)^{1/2}.
template <class C>
PuiseuxSeries<C> a1_period(int k, const C& u, int order = kExact);

template <class C>
struct VMatrices {
  int K = 0;  // entries present for k + l <= K - 1
  std::map<std::pair<int, int>, Mat<C>> V;
  double consistency = 0.0;  // largest |N_{a,0} - V_{a-1,0}|
  const Mat<C>& operator()(int k, int l) const;
};

/// sum V_kl w^k z^l = (1 - R(-w)^T R(-z)) / (w + z).
template <class C>
VMatrices<C> v_matrices(const MatrixSeries<C>& R, double tol = 1e-8);

template <class C>
class LocalExpansion {
 public:
  using PS = PuiseuxSeries<C>;

  /// Periods for k in [kmin, kmax], P^m for m in [0, mmax].
  LocalExpansion(const AnModel<C>& m, const RMatrix<C>& r, const VMatrices<C>& V, int i, int kmin, int kmax,
                 int mmax);

  int index() const { return i_; }
  const C& u() const { return u_; }
  int kmin() const { return kmin_; }
  int kmax() const { return kmax_; }

  /// Vector components I^{(k)b}_{beta_i}.
  const std::vector<PS>& period(int k) const;
  /// (I^{(k)}_{beta_i}, v_a), flat index a in 0..N-1.
  const PS& pairing(int k, int a) const;
  /// (I^{(-1)}_{beta_i}, 1).
  const PS& y() const { return pairing(-1, n_ - 1); }
  /// Coefficient of (mu - lambda)^m in P_{beta_i,beta_i} - 2/(lambda - mu)^2.
  const PS& prop_diag(int m) const;

 private:
  int i_, n_, kmin_, kmax_;
  C u_;
  std::vector<std::vector<PS>> periods_;
  std::vector<std::vector<PS>> pairings_;
  std::vector<PS> prop_;
};

/// Standalone forms of the operations above.
template <class C>
std::vector<PuiseuxSeries<C>> period_expansion(const AnModel<C>& m, const RMatrix<C>& r, int i, int k);

template <class C>
PuiseuxSeries<C> propagator_diag(const RMatrix<C>& r, const VMatrices<C>& V, int i, int m, const C& u);

}  // namespace ancestrec
