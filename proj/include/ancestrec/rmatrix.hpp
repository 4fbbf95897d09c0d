#pragma once

// Givental R-matrix at a semisimple point by formal stationary phase.

#include <vector>

#include "ancestrec/frobenius.hpp"

namespace ancestrec {

struct RResiduals {
  std::vector<double> ode;         // k = 0..K-1, relative
  std::vector<double> unitarity;   // m = 0..K, absolute
  double max_ode() const;
  double max_unitarity() const;
};

template <class C>
struct RMatrix {
  MatrixSeries<C> R;
  CanonicalFrame<C> frame;
  RResiduals residuals;
  int K() const { return R.order(); }
};

class RMatrixError : public NumericError {
 public:
  RMatrixError(const std::string& what, RResiduals r) : NumericError(what), residuals(std::move(r)) {}
  RResiduals residuals;
};

/// Formal Gaussian expansion of the normalized saddle integral of
/// phi(x) exp((F - u_i)/z) at xi_i, coefficients of z^0..z^K. If given,
/// `magnitude` receives the sum of absolute values of the Wick terms per order.
template <class C>
std::vector<C> saddle_expansion(const AnModel<C>& m, int i, const Polynomial<C>& phi, int K,
                                std::vector<double>* magnitude = nullptr);

/// R(z) = Psi^{-1} eta^{-1} C(z). Throws RMatrixError if a residual exceeds tol.
template <class C>
RMatrix<C> compute_r(const AnModel<C>& m, const CanonicalFrame<C>& f, int K, double tol = 1e-8);

/// Largest of the relative ODE residuals and the unitarity residuals scaled
/// by the size of the coefficients involved.
template <class C>
double r_defect(const MatrixSeries<C>& R, const RResiduals& res);

/// (a) [U, R_{k+1}] = (mu - k) R_k, relative; (b) sum (-1)^a R_a^T R_b = delta I.
template <class C>
RResiduals verify_r(const MatrixSeries<C>& R, const CanonicalFrame<C>& f);

}  // namespace ancestrec
