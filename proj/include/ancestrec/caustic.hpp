#pragma once

// Global period data on the roots of F = lambda, propagators between cycles,
// and the contour form of the recursion around a two-point cluster of
// critical values (an A_2 caustic).
//
// A cycle is a weight vector over the roots of F = lambda. Periods are exact:
//   (I^{(k)}, v_b) = sum_j w_j N_k(x_j) / F'(x_j)^{2k+1},  k >= 0
//   (I^{(-1)}, v_b) = sum_j w_j V_b(x_j),  V_b' = v_b
// and further integrals with dP_{k-1}/dx = P_k F'.

#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "ancestrec/recursion.hpp"

namespace ancestrec {

using cd = std::complex<double>;

class RootPeriods {
 public:
  RootPeriods(const AnModel<cd>& m, int kmin, int kmax);

  const AnModel<cd>& model() const { return m_; }
  int kmin() const { return kmin_; }
  int kmax() const { return kmax_; }

  /// Roots of F = lambda in a fixed order for a given lambda.
  std::vector<cd> roots(const cd& lambda) const;
  /// Contribution of one root to (I^{(k)}, v_a).
  cd root_pairing(int k, int a, const cd& x) const;
  cd pairing(int k, int a, const std::vector<cd>& x, const std::vector<cd>& w) const;
  /// Flat vector components of I^{(k)}.
  std::vector<cd> vector(int k, const std::vector<cd>& x, const std::vector<cd>& w) const;

  /// Constant term at mu = lambda of P_{alpha,beta}(lambda; mu - lambda) - (alpha|beta)/(lambda-mu)^2.
  cd propagator0(const std::vector<cd>& x, const std::vector<cd>& wa, const std::vector<cd>& wb) const;
  /// Bergman kernel sum_{j,l} wa_j wb_l x_j'(mu) x_l'(lambda) / (x_j(mu) - x_l(lambda))^2 with
  /// the roots at mu given in the labelling of xl.
  cd bergman(const std::vector<cd>& xl, const std::vector<cd>& xm, const std::vector<cd>& wa,
             const std::vector<cd>& wb) const;

 private:
  const std::vector<Polynomial<cd>>& polys(int k) const;

  AnModel<cd> m_;
  int kmin_, kmax_;
  std::map<int, std::vector<Polynomial<cd>>> num_;  // N_k (k >= 0) or P_k (k < 0) per a
};

/// Roots of F = path(1) continued from `roots` at path(0); labels preserved.
/// Throws NumericError if the path runs into a collision.
std::vector<cd> continue_roots(const Polynomial<cd>& F, std::vector<cd> roots,
                               const std::function<cd(double)>& path);

/// Same, returning the roots at every sample tau (sorted ascending in [0, 1]).
std::vector<std::vector<cd>> continue_roots_at(const Polynomial<cd>& F, std::vector<cd> roots,
                                               const std::function<cd(double)>& path,
                                               const std::vector<double>& taus);

/// Weights (one +1, one -1) over roots(lambda) of the cycle that vanishes
/// when lambda moves to u_i along a straight line.
std::vector<cd> vanishing_cycle(const RootPeriods& p, int i, const cd& lambda);

struct OdeOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double seed_radius = 0.05;  // relative to the distance to the nearest other critical value
};

/// Vector components of I^{(k)}_{beta_i}(lambda) continued from the Puiseux
/// expansion near u_i along a straight line, solving
///   (lambda - E.) d/dlambda I = (theta - k - 1/2) I.
/// The sign of beta_i is the one of the expansion.
std::vector<cd> ode_period(const AnModel<cd>& m, const RMatrix<cd>& r, int i, int k, const cd& lambda,
                           const OdeOptions& opt = {});

/// Solves the period ODE from lambda0 to lambda1 along a polyline.
std::vector<cd> ode_continue(const AnModel<cd>& m, int k, std::vector<cd> I, const std::vector<cd>& path,
                             const OdeOptions& opt = {});

struct PropagatorOptions {
  int panels = 24;
  int max_panels = 768;
  double tol = 1e-10;
};

/// P_{alpha,beta}(t, lambda; mu - lambda) from its defining integral over the
/// segment t - s 1, s from u_i to lambda; beta must vanish at u_i along that
/// segment. Weights are over p.roots(lambda).
cd propagator_cross(const RootPeriods& p, int i, const std::vector<cd>& wa, const std::vector<cd>& wb,
                    const cd& lambda, const cd& mu, const PropagatorOptions& opt = {});

/// Two critical values whose critical points are closest, with the contour
/// around them.
struct Cluster {
  int i = 0, j = 1;
  cd xi_center;
  cd center;
  double radius = 0.0;
  int others = 0;  // roots outside the cluster
};

struct ContourOptions {
  int min_nodes = 64;
  int max_nodes = 8192;
  double tol = 1e-12;
  double radius_factor = 3.0;
  double min_radius = 0.25;
};

Cluster find_cluster(const AnModel<cd>& m, const ContourOptions& opt = {});

/// The contour integral of the extended recursion for <v_a psi^m, S>_g,
/// with lower correlators from `table`.
struct ContourResult {
  cd value;
  int nodes = 0;
  double error = 0.0;  // change under the last node doubling
};

ContourResult extended_integral(const AnModel<cd>& m, const Cluster& cl, int g, const Insertion& d, const Slots& S,
                                const CorrelatorTable<cd>& table, const ContourOptions& opt = {},
                                const WickOptions<cd>& wopt = {});

/// Correlator table at a point where only the cluster may be degenerate:
/// every non-initial key comes from extended_integral (needs N = 2, the
/// whole spectrum in one cluster). <v_a>_{1,1} is the mean over a circle of
/// semisimple points around t.
CorrelatorTable<cd> build_table_contour(const AnModel<cd>& m, const std::vector<CorrelatorKey>& targets,
                                        const ContourOptions& opt = {}, double circle_radius = 0.05);

struct Theorem2Row {
  CorrelatorKey key;
  cd contour;
  cd residues;  // sum over the cluster residues of the local recursion
  double abs_diff = 0.0;
  double rel_diff = 0.0;
  int nodes = 0;
};

struct Theorem2Report {
  std::vector<Theorem2Row> rows;
  double max_diff = 0.0;
  bool ok = false;
};

/// Compares the contour integral with the residue sum for every key with
/// g <= gmax and at most `slots` t-derivatives; g = 1 only with a slot.
Theorem2Report verify_theorem2(const AnModel<cd>& m, int gmax, int slots, double tol,
                               const ContourOptions& opt = {});

struct SweepPoint {
  double eps = 0.0;
  std::map<CorrelatorKey, cd> values;
  double worst_cancellation = 1.0;
};

struct SweepRow {
  CorrelatorKey key;
  std::vector<cd> sequence;
  cd limit;           // Richardson extrapolation to eps = 0
  double limit_error = 0.0;
  cd caustic;         // contour value at the caustic
  double diff = 0.0;
  bool converges = false;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  std::vector<SweepRow> rows;
  double max_diff = 0.0;
  bool ok = false;
};

/// t(eps) = t_c + eps * dir for eps = 2^-emin .. 2^-emax, residue recursion in
/// quad precision, Richardson limits against the contour values at t_c.
SweepReport caustic_sweep(int n, const std::vector<cd>& t_caustic, const std::vector<cd>& dir, int emin, int emax,
                          int gmax, int nmax, double tol, const ContourOptions& opt = {});

/// Neville extrapolation to h = 0 of values at h_k, assuming a power series in h.
cd richardson(const std::vector<double>& h, const std::vector<cd>& v, double* error = nullptr);

}  // namespace ancestrec
