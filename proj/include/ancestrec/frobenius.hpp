#pragma once

// A_n Frobenius manifold at a parameter point.
//
// F(t, x) = x^{n+1}/(n+1) + sum_a t^a x^{n-a}, primitive form dx. Elements of
// the Jacobi algebra C[x]/(F') are stored as polynomials of degree < n; the
// flat frame is v_a = dF/dtau_a with a = 1..n (index a-1 in arrays), and
// v_n = 1 is the unit.

#include <vector>

#include "ancestrec/numeric.hpp"
#include "ancestrec/series.hpp"

namespace ancestrec {

struct ModelOptions {
  double root_tol = 1e-10;
  double merge_threshold = 1e-6;
  // semisimple when min |u_i - u_j| >= gap_rel * (1 + max |u_i|)
  double gap_rel = 1e-6;
};

template <class C>
struct AnModel {
  int n = 0;
  std::vector<C> t;

  Polynomial<C> F, dF, d2F, d3F;
  std::vector<C> xi, u, Delta;
  bool near_multiple_roots = false;
  bool semisimple = false;
  double u_gap = 0.0;

  std::vector<C> tau;
  Mat<C> jac_tau_t;  // (a, b) = d tau_a / d t^b
  Mat<C> dt_dtau;    // (a, b) = d t^b / d tau_a
  std::vector<Polynomial<C>> v;  // v[a] = dF/dtau_{a+1}
  Mat<C> du_dtau;    // (i, a) = d u_i / d tau_a, empty unless semisimple
  Mat<C> dDelta_dtau;  // (i, a) = d Delta_i / d tau_a, empty unless semisimple

  Mat<C> eta;
  Mat<C> eta_inv;
  // structure[a](b, c): v_a . v_b = sum_c structure[a](b, c) v_c
  std::vector<Mat<C>> structure;
  Mat<C> euler;  // (b, c): E . v_b = sum_c euler(b, c) v_c

  double d = 0.0;
  std::vector<double> d_a;
  std::vector<double> rho;  // constant part of E, zero for A_n

  int N() const { return n; }

  /// Coordinates in the flat frame of an element of the Jacobi algebra.
  std::vector<C> to_flat(const Polynomial<C>& p) const;
  /// Polynomial representative (degree < n) of sum_a w_a v_a.
  Polynomial<C> from_flat(const std::vector<C>& w) const;
  /// Residue pairing computed algebraically.
  C pairing(const Polynomial<C>& p, const Polynomial<C>& q) const;
  /// Residue pairing as sum over critical points (semisimple only).
  C pairing_sum(const Polynomial<C>& p, const Polynomial<C>& q) const;
  /// Matrix of multiplication by sum_a w_a v_a: column c of row b is the v_c
  /// coordinate of (w . v_b).
  Mat<C> mult_matrix(const std::vector<C>& w) const;
};

template <class C>
AnModel<C> build_model(int n, const std::vector<C>& t, const ModelOptions& opt = {});

/// tau(t) and d tau / d t from the expansion of F^{a/(n+1)} at infinity.
template <class C>
void flat_coordinates(int n, const std::vector<C>& t, std::vector<C>& tau, Mat<C>& jac);

template <class C>
struct CanonicalFrame {
  Mat<C> Psi;     // (b, i) = sqrt(Delta_i) d tau_b / d u_i
  Mat<C> PsiInv;  // (k, b) = d u_k / d tau_b / sqrt(Delta_k)
  std::vector<C> U;
  std::vector<C> sqrtDelta;
  Mat<C> theta;   // diagonal d/2 - d_a in the flat frame
  Mat<C> mu;      // PsiInv theta Psi
  std::vector<int> branch;
};

/// Refuses caustic points. `branch` flips individual sqrt(Delta_i) signs.
template <class C>
CanonicalFrame<C> canonical_frame(const AnModel<C>& m, const std::vector<int>& branch = {});

/// Raised for operations that require a semisimple point.
class CausticError : public Error {
 public:
  using Error::Error;
};

}  // namespace ancestrec
