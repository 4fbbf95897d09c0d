#pragma once

// Ancestor correlators by quantizing R directly:
//   A_t = exp(h_A)^ prod_i D_pt(hbar Delta_i; ^i q),  A = log(Psi R Psi^{-1}).
// Works in flat Darboux coordinates q_k^a, p_{k,a}; no code is shared with the
// residue recursion.

#include <map>
#include <vector>

#include "ancestrec/rmatrix.hpp"
#include "ancestrec/wick.hpp"

namespace ancestrec {

/// Truncated formal function of t_k^a = q_k^a + [k = 1, a = N] with
/// coefficients Laurent in hbar^{1/2}. Variable id = k * N + a.
template <class C>
class FockPolynomial {
 public:
  struct Monomial {
    int h2 = 0;               // power of hbar^{1/2}
    std::vector<int> vars;    // sorted variable ids, repeated for powers
    auto operator<=>(const Monomial&) const = default;
  };
  using Terms = std::map<Monomial, C>;

  explicit FockPolynomial(int N = 1) : N_(N) {}
  int N() const { return N_; }
  int var(int a, int k) const { return k * N_ + a; }
  int unit_shift_var() const { return var(N_ - 1, 1); }

  void add(const Monomial& m, const C& c);
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  C coeff(const Monomial& m) const;
  double max_abs() const;

  FockPolynomial derivative(int v) const;
  /// Multiplication by the linear function q_v (not t_v).
  FockPolynomial times_q(int v) const;
  FockPolynomial times_hbar_half(int p) const;
  FockPolynomial& operator+=(const FockPolynomial& o);
  FockPolynomial& operator*=(const C& s);
  friend FockPolynomial operator+(FockPolynomial a, const FockPolynomial& b) { return a += b; }
  friend FockPolynomial operator-(FockPolynomial a, const FockPolynomial& b) {
    FockPolynomial nb = b;
    nb *= C(-1);
    return a += nb;
  }
  friend FockPolynomial operator*(FockPolynomial a, const C& s) { return a *= s; }
  FockPolynomial operator*(const FockPolynomial& o) const;

  template <class Pred>
  void prune(Pred keep) {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = keep(it->first) ? std::next(it) : terms_.erase(it);
  }

 private:
  int N_;
  Terms terms_;
};

/// Element of H((z^{-1})) as flat-coordinate vectors: sum_e w[e] z^e.
template <class C>
struct LaurentVector {
  std::map<int, std::vector<C>> w;
};

/// Omega(f, g) = Res_z (f(-z), g(z)).
template <class C>
C symplectic_form(const Mat<C>& eta, const LaurentVector<C>& f, const LaurentVector<C>& g);

/// phi^ = -hbar^{1/2} sum q_k^i(phi) d/dq_k^i + hbar^{-1/2} sum p_{k,i}(phi) q_k^i.
template <class C>
FockPolynomial<C> apply_phi_hat(const Mat<C>& eta, const LaurentVector<C>& phi, const FockPolynomial<C>& f);

/// log D_pt(hbar scale; Q) as a Fock polynomial in one variable set (N = 1),
/// genus <= gmax and at most nmax insertions.
template <class C>
FockPolynomial<C> dpt_truncated(const C& scale, int nmax, int gmax);

struct QuantizationOptions {
  int chi_max = 3;  // 2g - 2 + n of the requested keys
};

/// All ancestor correlators with 2g - 2 + n <= chi_max. `tameness_defect`
/// receives the largest coefficient generated with sum k > 3g - 3 + n.
template <class C>
CorrelatorTable<C> ancestor_via_quantization(const AnModel<C>& m, const RMatrix<C>& r,
                                             const QuantizationOptions& opt = {}, double* tameness_defect = nullptr);

}  // namespace ancestrec
