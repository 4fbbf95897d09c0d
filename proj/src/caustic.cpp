#include "ancestrec/caustic.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace ancestrec {

RootPeriods::RootPeriods(const AnModel<cd>& m, int kmin, int kmax) : m_(m), kmin_(std::min(kmin, -1)), kmax_(std::max(kmax, 0)) {
  const int n = m.n;
  std::vector<Polynomial<cd>> cur(m.v.begin(), m.v.end());
  num_[0] = cur;
  for (int k = 0; k < kmax_; ++k) {
    for (int a = 0; a < n; ++a)
      cur[a] = cur[a].derivative() * m.dF - cur[a] * m.d2F * cd(2.0 * k + 1.0);
    num_[k + 1] = cur;
  }
  std::vector<Polynomial<cd>> neg(n);
  for (int a = 0; a < n; ++a) neg[a] = m.v[a].integral();
  num_[-1] = neg;
  for (int k = -1; k > kmin_; --k) {
    for (int a = 0; a < n; ++a) neg[a] = (neg[a] * m.dF).integral();
    num_[k - 1] = neg;
  }
}

const std::vector<Polynomial<cd>>& RootPeriods::polys(int k) const {
  auto it = num_.find(k);
  if (it == num_.end()) throw std::out_of_range("RootPeriods: order " + std::to_string(k) + " not prepared");
  return it->second;
}

std::vector<cd> RootPeriods::roots(const cd& lambda) const {
  Polynomial<cd> G = m_.F - Polynomial<cd>::monomial(0, lambda);
  return poly_roots(G, 1e-10, 0.0).roots;
}

cd RootPeriods::root_pairing(int k, int a, const cd& x) const {
  const cd num = polys(k)[a](x);
  if (k < 0) return num;
  const cd f1 = m_.dF(x);
  return num / std::pow(f1, 2 * k + 1);
}

cd RootPeriods::pairing(int k, int a, const std::vector<cd>& x, const std::vector<cd>& w) const {
  cd s(0);
  for (std::size_t j = 0; j < x.size(); ++j)
    if (w[j] != cd(0)) s += w[j] * root_pairing(k, a, x[j]);
  return s;
}

std::vector<cd> RootPeriods::vector(int k, const std::vector<cd>& x, const std::vector<cd>& w) const {
  const int n = m_.n;
  std::vector<cd> p(n);
  for (int a = 0; a < n; ++a) p[a] = pairing(k, a, x, w);
  return m_.eta_inv * p;
}

cd RootPeriods::propagator0(const std::vector<cd>& x, const std::vector<cd>& wa, const std::vector<cd>& wb) const {
  cd s(0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (wa[j] == cd(0)) continue;
    for (std::size_t l = 0; l < x.size(); ++l) {
      if (wb[l] == cd(0)) continue;
      cd v;
      if (j == l) {
        // Schwarzian of the inverse function over 6
        const cd f1 = m_.dF(x[j]), f2 = m_.d2F(x[j]), f3 = m_.d3F(x[j]);
        v = (1.5 * f2 * f2 - f3 * f1) / (6.0 * std::pow(f1, 4));
      } else {
        const cd dx = x[j] - x[l];
        v = cd(1) / (m_.dF(x[j]) * m_.dF(x[l]) * dx * dx);
      }
      s += wa[j] * wb[l] * v;
    }
  }
  return s;
}

cd RootPeriods::bergman(const std::vector<cd>& xl, const std::vector<cd>& xm, const std::vector<cd>& wa,
                        const std::vector<cd>& wb) const {
  cd s(0);
  for (std::size_t j = 0; j < xm.size(); ++j)
    for (std::size_t l = 0; l < xl.size(); ++l) {
      if (wa[j] == cd(0) || wb[l] == cd(0)) continue;
      const cd dx = xm[j] - xl[l];
      s += wa[j] * wb[l] / (m_.dF(xm[j]) * m_.dF(xl[l]) * dx * dx);
    }
  return s;
}

namespace {

// Newton from `guess` on F(x) = lambda; false if it does not settle.
bool polish(const Polynomial<cd>& F, const Polynomial<cd>& dF, const cd& lambda, cd& x) {
  double last = 1e300;
  for (int it = 0; it < 30; ++it) {
    const cd d = dF(x);
    if (d == cd(0)) return false;
    const cd dx = (F(x) - lambda) / d;
    x -= dx;
    last = std::abs(dx);
    if (last <= 1e-15 * (1.0 + std::abs(x))) return true;
  }
  // near a double root the step stalls at rounding level
  return last <= 1e-10 * (1.0 + std::abs(x));
}

}  // namespace

std::vector<std::vector<cd>> continue_roots_at(const Polynomial<cd>& F, std::vector<cd> roots,
                                               const std::function<cd(double)>& path,
                                               const std::vector<double>& taus) {
  const Polynomial<cd> dF = F.derivative();
  const std::size_t n = roots.size();
  std::vector<std::vector<cd>> out;
  out.reserve(taus.size());
  double tau = 0.0, h = 1.0 / 64;
  for (double target : taus) {
    while (tau < target) {
      const double step = std::min(h, target - tau);
      const cd lam = path(tau + step);
      std::vector<cd> next = roots;
      bool ok = true;
      for (std::size_t j = 0; j < n && ok; ++j) {
        double sep = 1e300;
        for (std::size_t l = 0; l < n; ++l)
          if (l != j) sep = std::min(sep, std::abs(roots[j] - roots[l]));
        ok = polish(F, dF, lam, next[j]) && std::abs(next[j] - roots[j]) < 0.25 * sep;
      }
      if (!ok) {
        h = step / 2;
        if (h < 1e-13) throw NumericError("continue_roots: roots collide along the path");
        continue;
      }
      roots = std::move(next);
      tau += step;
      h = std::min(2 * step, 1.0 / 16);
    }
    out.push_back(roots);
  }
  return out;
}

std::vector<cd> continue_roots(const Polynomial<cd>& F, std::vector<cd> roots,
                               const std::function<cd(double)>& path) {
  return continue_roots_at(F, std::move(roots), path, {1.0}).front();
}

std::vector<cd> vanishing_cycle(const RootPeriods& p, int i, const cd& lambda) {
  const auto& m = p.model();
  const cd u = m.u.at(i);
  const auto x0 = p.roots(lambda);
  // s = u + (lambda - u) w^2 from w = 1 to w = 1e-3
  const auto x1 = continue_roots(m.F, x0, [&](double tau) {
    const double w = 1.0 - tau * (1.0 - 1e-3);
    return u + (lambda - u) * (w * w);
  });
  std::vector<std::size_t> idx(x1.size());
  for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
  const cd xi = m.xi.at(i);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return std::abs(x1[a] - xi) < std::abs(x1[b] - xi); });
  std::vector<cd> w(x0.size(), cd(0));
  w[idx[0]] = 1.0;
  w[idx[1]] = -1.0;
  return w;
}

namespace {

using State = std::vector<cd>;

struct PeriodOde {
  const AnModel<cd>& m;
  Mat<cd> ET;  // E. on flat components
  std::vector<cd> theta;
  int k;
  cd l0, l1;
  void operator()(const State& I, State& dI, double tau) const {
    const std::size_t n = I.size();
    const cd lam = l0 + (l1 - l0) * tau;
    Mat<cd> A = ET * cd(-1);
    for (std::size_t a = 0; a < n; ++a) A(a, a) += lam;
    std::vector<cd> rhs(n);
    for (std::size_t a = 0; a < n; ++a) rhs[a] = (theta[a] - cd(k + 0.5)) * I[a] * (l1 - l0);
    dI = A.inverse() * rhs;
  }
};

}  // namespace

std::vector<cd> ode_continue(const AnModel<cd>& m, int k, std::vector<cd> I, const std::vector<cd>& path,
                             const OdeOptions& opt) {
  namespace odeint = boost::numeric::odeint;
  std::vector<cd> theta(m.n);
  for (int a = 0; a < m.n; ++a) theta[a] = m.d / 2 - m.d_a[a];
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    PeriodOde sys{m, m.euler.transpose(), theta, k, path[s], path[s + 1]};
    auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_adaptive(stepper, sys, I, 0.0, 1.0, 1e-3);
  }
  return I;
}

std::vector<cd> ode_period(const AnModel<cd>& m, const RMatrix<cd>& r, int i, int k, const cd& lambda,
                           const OdeOptions& opt) {
  if (!m.semisimple) throw CausticError("ode_period: point is not semisimple");
  const cd u = m.u.at(i);
  double dmin = 1e300;
  for (int j = 0; j < m.n; ++j)
    if (j != i) dmin = std::min(dmin, std::abs(m.u[j] - u));
  const cd dir = lambda - u;
  if (std::abs(dir) == 0.0) throw std::invalid_argument("ode_period: lambda at the critical value");
  const cd l0 = u + dir / std::abs(dir) * std::min(std::abs(dir), opt.seed_radius * dmin);
  const auto ps = period_expansion(m, r, i, k);
  const cd s = std::sqrt(l0 - u);
  std::vector<cd> I(m.n);
  for (int b = 0; b < m.n; ++b) I[b] = ps[b].evaluate_s(s);
  if (l0 == lambda) return I;
  return ode_continue(m, k, std::move(I), {l0, lambda}, opt);
}

namespace {

// Composite Gauss-Legendre on [0,1], nodes ascending.
void gauss_rule(int panels, std::vector<double>& x, std::vector<double>& w) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  const auto& ax = GL::abscissa();
  const auto& aw = GL::weights();
  x.clear();
  w.clear();
  const double hw = 0.5 / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = (p + 0.5) / panels;
    for (std::size_t q = ax.size(); q-- > 0;)
      if (ax[q] != 0.0) {
        x.push_back(c - hw * ax[q]);
        w.push_back(hw * aw[q]);
      }
    for (std::size_t q = 0; q < ax.size(); ++q) {
      x.push_back(c + hw * ax[q]);
      w.push_back(hw * aw[q]);
    }
  }
}

cd contract(const Mat<cd>& eta_inv, const std::vector<cd>& p, const std::vector<cd>& q) {
  cd s(0);
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = 0; b < q.size(); ++b) s += p[a] * eta_inv(a, b) * q[b];
  return s;
}

}  // namespace

cd propagator_cross(const RootPeriods& p, int i, const std::vector<cd>& wa, const std::vector<cd>& wb,
                    const cd& lambda, const cd& mu, const PropagatorOptions& opt) {
  const auto& m = p.model();
  const int n = m.n;
  const cd u = m.u.at(i);
  const auto xl = p.roots(lambda);
  // roots at mu in the labelling at lambda
  const auto xm = continue_roots(m.F, xl, [&](double tau) { return lambda + (mu - lambda) * tau; });
  auto pairings = [&](int k, const std::vector<cd>& x, const std::vector<cd>& w) {
    std::vector<cd> out(n);
    for (int a = 0; a < n; ++a) out[a] = p.pairing(k, a, x, w);
    return out;
  };
  // P = -h_1(mu, lambda) + int_u^lambda h_11(mu - lambda + s, s) ds, s = u + (lambda - u) w^2
  const cd boundary = -contract(m.eta_inv, pairings(1, xm, wa), pairings(0, xl, wb));
  auto integral = [&](int panels) {
    std::vector<double> nodes, weights;
    gauss_rule(panels, nodes, weights);
    const std::size_t nn = nodes.size();
    // continue from w = 1 down to the smallest node
    std::vector<double> taus(nn);
    for (std::size_t q = 0; q < nn; ++q) taus[q] = 1.0 - nodes[nn - 1 - q];
    auto sroot = continue_roots_at(m.F, xl, [&](double tau) {
      const double w = 1.0 - tau;
      return u + (lambda - u) * (w * w);
    }, taus);
    auto xroot = continue_roots_at(m.F, xm, [&](double tau) {
      const double w = 1.0 - tau;
      return mu + (lambda - u) * (w * w - 1.0);
    }, taus);
    cd s(0);
    for (std::size_t q = 0; q < nn; ++q) {
      const double w = nodes[nn - 1 - q];
      const cd h = contract(m.eta_inv, pairings(2, xroot[q], wa), pairings(0, sroot[q], wb));
      s += weights[nn - 1 - q] * h * cd(2.0 * w) * (lambda - u);
    }
    return s;
  };
  int panels = opt.panels;
  cd prev = integral(panels);
  for (;;) {
    panels *= 2;
    const cd cur = integral(panels);
    if (std::abs(cur - prev) <= opt.tol * (1.0 + std::abs(cur)) || panels >= opt.max_panels) {
      if (std::abs(cur - prev) > 1e3 * opt.tol * (1.0 + std::abs(cur)))
        throw NumericError("propagator_cross: quadrature did not converge");
      return boundary + cur;
    }
    prev = cur;
  }
}

Cluster find_cluster(const AnModel<cd>& m, const ContourOptions& opt) {
  if (m.n < 2) throw std::invalid_argument("find_cluster: needs at least two critical values");
  Cluster c;
  double best = 1e300;
  for (int i = 0; i < m.n; ++i)
    for (int j = i + 1; j < m.n; ++j)
      if (std::abs(m.xi[i] - m.xi[j]) < best) {
        best = std::abs(m.xi[i] - m.xi[j]);
        c.i = i;
        c.j = j;
      }
  c.xi_center = (m.xi[c.i] + m.xi[c.j]) / 2.0;
  c.center = (m.u[c.i] + m.u[c.j]) / 2.0;
  const double spread = std::abs(m.u[c.i] - m.u[c.j]);
  c.radius = std::max(opt.radius_factor * spread, opt.min_radius);
  double other = 1e300;
  for (int k = 0; k < m.n; ++k)
    if (k != c.i && k != c.j) other = std::min(other, std::abs(m.u[k] - c.center));
  if (c.radius > 0.5 * other) c.radius = 0.5 * other;
  if (c.radius <= 0.75 * spread) throw CausticError("find_cluster: cluster is not isolated from the other critical values");
  c.others = m.n + 1 - 3;
  return c;
}

namespace {

// Period data of the three 1-point cycles at one contour node.
struct NodeData {
  cd lambda;
  std::array<cd, 3> x;                          // cluster roots
  std::vector<std::array<std::vector<cd>, 3>> pair;  // [k - kmin][j][a]
  std::vector<std::array<std::vector<cd>, 3>> vec;   // [k - kmin][j][b]
  cd P0[3][3];
};

class ContourEvaluator {
 public:
  ContourEvaluator(const AnModel<cd>& m, const Cluster& cl, int kmin, int kmax)
      : p_(m, kmin, kmax), cl_(cl), kmin_(p_.kmin()), kmax_(p_.kmax()) {}

  NodeData node(const cd& lambda) const {
    const auto& m = p_.model();
    auto all = p_.roots(lambda);
    std::vector<std::size_t> idx(all.size());
    for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
    std::sort(idx.begin(), idx.end(),
              [&](auto a, auto b) { return std::abs(all[a] - cl_.xi_center) < std::abs(all[b] - cl_.xi_center); });
    if (idx.size() > 3 && std::abs(all[idx[3]] - cl_.xi_center) < 1.5 * std::abs(all[idx[2]] - cl_.xi_center))
      throw NumericError("extended_integral: cluster roots not separated on the contour");
    NodeData d;
    d.lambda = lambda;
    std::vector<cd> x(3);
    for (int j = 0; j < 3; ++j) x[j] = d.x[j] = all[idx[j]];
    std::array<std::vector<cd>, 3> w;
    for (int j = 0; j < 3; ++j) {
      w[j].assign(3, cd(-1.0 / 3));
      w[j][j] += 1.0;
    }
    const int n = m.n;
    for (int k = kmin_; k <= kmax_; ++k) {
      std::array<std::vector<cd>, 3> pk, vk;
      for (int j = 0; j < 3; ++j) {
        pk[j].resize(n);
        for (int a = 0; a < n; ++a) pk[j][a] = p_.pairing(k, a, x, w[j]);
        vk[j] = m.eta_inv * pk[j];
      }
      d.pair.push_back(std::move(pk));
      d.vec.push_back(std::move(vk));
    }
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) d.P0[j][l] = p_.propagator0(x, w[j], w[l]);
    return d;
  }

  cd integrand(const NodeData& d, int g, const Insertion& ins, const Slots& S, const CorrelatorTable<cd>& table,
               const WickOptions<cd>& wopt) const {
    std::array<WickCycle<cd>, 3> cyc;
    for (int j = 0; j < 3; ++j) {
      cyc[j].minus = [&, j](int a, int k) -> cd { return at(d.pair, -k, j)[a]; };
      cyc[j].plus = [&, j](int b, int k) -> cd { return at(d.vec, k + 1, j)[b]; };
    }
    auto kern = [&](int c) { return at(d.pair, -1 - ins.m, c)[ins.a]; };
    // Omega is symmetric in its cycles: one evaluation per unordered set, the
    // kernels summed over the orderings. 1/(r-1)! comes with (-1)^r, the
    // orientation of the 1-point cycles against y.
    cd total(0);
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) {
        std::vector<const WickCycle<cd>*> cycles = {&cyc[p], &cyc[q]};
        std::function<cd(int, int)> prop = [&](int i, int j) { return d.P0[i ? q : p][j ? q : p]; };
        const cd omega = assemble_omega<cd, cd>(g, cycles, S, prop, table, cd(0), wopt);
        if (omega == cd(0)) continue;
        total += (kern(p) - kern(q)) / (d.x[q] - d.x[p]) * omega;
      }
    std::vector<const WickCycle<cd>*> cycles = {&cyc[0], &cyc[1], &cyc[2]};
    std::function<cd(int, int)> prop = [&](int i, int j) { return d.P0[i][j]; };
    const cd omega = assemble_omega<cd, cd>(g, cycles, S, prop, table, cd(0), wopt);
    if (omega != cd(0)) {
      cd k3(0);
      for (int c = 0; c < 3; ++c) {
        cd den(1);
        for (int e = 0; e < 3; ++e)
          if (e != c) den *= d.x[e] - d.x[c];
        k3 += kern(c) / den;
      }
      total -= k3 * omega;
    }
    return total;
  }

  /// Node q of M on the circle, cached on the finest grid.
  const NodeData& node_at(int q, int M, int max_nodes) {
    if (max_nodes % M) throw std::invalid_argument("extended_integral: max_nodes must be min_nodes times a power of 2");
    const int key = q * (max_nodes / M);
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    const cd lam = cl_.center + cl_.radius * std::polar(1.0, 2.0 * std::numbers::pi * key / max_nodes);
    NodeData nd = node(lam);
    std::lock_guard<std::mutex> lk(mu_);
    return cache_.emplace(key, std::move(nd)).first->second;
  }

  int kmin() const { return kmin_; }
  int kmax() const { return kmax_; }

 private:
  const std::vector<cd>& at(const std::vector<std::array<std::vector<cd>, 3>>& v, int k, int j) const {
    if (k < kmin_ || k > kmax_) throw InsufficientOrder("extended_integral: period order out of range");
    return v[k - kmin_][j];
  }

  RootPeriods p_;
  Cluster cl_;
  int kmin_, kmax_;
  std::mutex mu_;
  std::map<int, NodeData> cache_;
};

void order_range(const CorrelatorKey& k, int& kmin, int& kmax) {
  int mmax = 0;
  for (auto& x : k.ins) mmax = std::max(mmax, x.m);
  kmin = std::min(kmin, -2 - mmax);
  kmax = std::max(kmax, 3 * k.g + k.n() + 3);
}

// (1/2 pi i) contour integral by the trapezoidal rule with node doubling;
// f(q, M) is the integrand times (lambda - center) at node q of M.
template <class F>
ContourResult circle_integral(const ContourOptions& opt, F&& f) {
  int M = opt.min_nodes;
  cd sum(0);
  for (int q = 0; q < M; ++q) sum += f(q, M);
  cd val = sum / double(M);
  ContourResult out;
  for (;;) {
    const int M2 = 2 * M;
    if (M2 > opt.max_nodes) throw NumericError("extended_integral: contour quadrature did not converge");
    for (int q = 1; q < M2; q += 2) sum += f(q, M2);
    const cd v2 = sum / double(M2);
    out.error = std::abs(v2 - val);
    out.value = v2;
    out.nodes = M2;
    if (out.error <= opt.tol * (1.0 + std::abs(v2))) return out;
    val = v2;
    M = M2;
  }
}

ContourResult integrate_slots(ContourEvaluator& ev, const Cluster& cl, int g, const Insertion& d, const Slots& S,
                              const CorrelatorTable<cd>& table, const ContourOptions& opt,
                              const WickOptions<cd>& wopt) {
  return circle_integral(opt, [&](int q, int M) {
    const NodeData& nd = ev.node_at(q, M, opt.max_nodes);
    return ev.integrand(nd, g, d, S, table, wopt) * (nd.lambda - cl.center);
  });
}

ContourResult integrate_key(ContourEvaluator& ev, const Cluster& cl, const CorrelatorKey& key,
                            const CorrelatorTable<cd>& table, const ContourOptions& opt,
                            const WickOptions<cd>& wopt) {
  Slots S = key.ins;
  const Insertion d = S.front();
  S.erase(S.begin());
  return integrate_slots(ev, cl, key.g, d, S, table, opt, wopt);
}

}  // namespace

ContourResult extended_integral(const AnModel<cd>& m, const Cluster& cl, int g, const Insertion& d, const Slots& S,
                                const CorrelatorTable<cd>& table, const ContourOptions& opt,
                                const WickOptions<cd>& wopt) {
  Slots all = S;
  all.push_back(d);
  int kmin = -1, kmax = 1;
  order_range(CorrelatorKey(g, all), kmin, kmax);
  ContourEvaluator ev(m, cl, kmin, kmax);
  return integrate_slots(ev, cl, g, d, S, table, opt, wopt);
}

namespace {

// Runs f(j) for j < count on a small thread pool; rethrows the first error.
template <class F>
void parallel_for(std::size_t count, F&& f) {
  unsigned nt = std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<unsigned>(nt, static_cast<unsigned>(count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= count) return;
      try {
        f(j);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
        next = count;
      }
    }
  };
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned q = 0; q < nt; ++q) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
}

// Keys the contour formula for (g, n) may read: (h, <= n + g - h), h <= g.
std::vector<CorrelatorKey> contour_closure(int N, const std::vector<CorrelatorKey>& targets) {
  int gmax = 0;
  std::map<int, int> nmax;
  for (auto& k : targets) {
    gmax = std::max(gmax, k.g);
    nmax[k.g] = std::max(nmax[k.g], k.n());
  }
  std::map<int, int> need;
  for (auto& [g, n] : nmax)
    for (int h = 0; h <= g; ++h) need[h] = std::max(need[h], n + g - h);
  std::vector<CorrelatorKey> out;
  for (auto& [h, n] : need)
    for (auto& k : requested_keys(N, h, n))
      if (k.g == h) out.push_back(k);
  return out;
}

}  // namespace

CorrelatorTable<cd> build_table_contour(const AnModel<cd>& m, const std::vector<CorrelatorKey>& targets,
                                        const ContourOptions& opt, double circle_radius) {
  if (m.n != 2) throw std::invalid_argument("build_table_contour: only A_2 has its whole spectrum in one cluster");
  const int N = m.n;
  const Cluster cl = find_cluster(m, opt);
  CorrelatorTable<cd> table(N);
  // genus-0 three-point and <v_a psi>_1 are polynomial in t
  for (int a = 0; a < N; ++a) {
    for (int b = a; b < N; ++b)
      for (int c = b; c < N; ++c) {
        cd v(0);
        for (int e = 0; e < N; ++e) v += m.structure[a](b, e) * m.eta(e, c);
        table.insert(CorrelatorKey(0, {{a, 0}, {b, 0}, {c, 0}}), {v, Provenance::initial, 1.0});
      }
    cd tr(0);
    for (int b = 0; b < N; ++b) tr += m.structure[a](b, b);
    table.insert(CorrelatorKey(1, {{a, 1}}), {tr / 24.0, Provenance::initial, 1.0});
  }
  // <v_a>_1 by the mean value over a circle in a generic complex line
  {
    const int Q = 32;
    std::vector<cd> acc(N, cd(0));
    const std::vector<cd> dir = {cd(1.0), cd(0.3, 0.2)};
    for (int q = 0; q < Q; ++q) {
      const cd e = circle_radius * std::polar(1.0, 2.0 * std::numbers::pi * (q + 0.5) / Q);
      std::vector<cd> t = m.t;
      for (int a = 0; a < N; ++a) t[a] += e * dir[a];
      auto mq = build_model<cd>(N, t);
      auto r = compute_r(mq, canonical_frame(mq), 3);
      CorrelatorTable<cd> tq(N);
      seed_initial_data(mq, r, tq);
      for (int a = 0; a < N; ++a) acc[a] += tq.value(1, {{a, 0}});
    }
    for (int a = 0; a < N; ++a) table.insert(CorrelatorKey(1, {{a, 0}}), {acc[a] / double(Q), Provenance::initial, 1.0});
  }
  std::map<std::pair<int, int>, std::vector<CorrelatorKey>> levels;
  int kmin = -1, kmax = 1;
  for (auto& k : contour_closure(N, targets)) {
    order_range(k, kmin, kmax);
    if (!is_initial_key(k)) levels[{k.g, k.n()}].push_back(k);
  }
  ContourEvaluator ev(m, cl, kmin, kmax);
  for (auto& [lvl, keys] : levels) {
    std::vector<ContourResult> res(keys.size());
    parallel_for(keys.size(), [&](std::size_t j) { res[j] = integrate_key(ev, cl, keys[j], table, opt, {}); });
    for (std::size_t j = 0; j < keys.size(); ++j)
      table.insert(keys[j], {res[j].value, Provenance::contour, 1.0});
  }
  return table;
}

Theorem2Report verify_theorem2(const AnModel<cd>& m, int gmax, int slots, double tol, const ContourOptions& opt) {
  if (!m.semisimple) throw CausticError("verify_theorem2: point is not semisimple");
  const Cluster cl = find_cluster(m, opt);
  std::vector<CorrelatorKey> keys;
  for (auto& k : requested_keys(m.n, gmax, slots + 1))
    if (!(k.g == 1 && k.n() == 1)) keys.push_back(k);
  // lower correlators from the residue recursion in quad precision
  std::vector<complex_t<quad>> tq;
  for (auto& x : m.t) tq.push_back(from_cd<complex_t<quad>>(x));
  const auto mq = build_model<complex_t<quad>>(m.n, tq);
  const auto deps = contour_closure(m.n, keys);
  BuildInfo info;
  const auto tabq = build_table<complex_t<quad>>(mq, deps, {}, &info);
  CorrelatorTable<cd> table(m.n);
  for (auto& [k, e] : tabq.entries()) table.insert(k, {to_cd(e.value), e.provenance, e.cancellation});
  // residues at the two cluster critical values only
  int kmin = -1, kmax = 1;
  for (auto& k : keys) {
    for (auto& x : k.ins) kmin = std::min(kmin, -1 - x.m);
    kmax = std::max(kmax, 3 * k.g - 3 + k.n() + 1);
  }
  auto pd = make_point_data(mq, info.K, kmin, kmax, 0);
  std::vector<LocalExpansion<complex_t<quad>>> keep;
  for (auto& l : pd.local)
    if (l.index() == cl.i || l.index() == cl.j) keep.push_back(l);
  pd.local = std::move(keep);

  int ckmin = -1, ckmax = 1;
  for (auto& k : keys) order_range(k, ckmin, ckmax);
  ContourEvaluator ev(m, cl, ckmin, ckmax);
  Theorem2Report rep;
  rep.rows.resize(keys.size());
  parallel_for(keys.size(), [&](std::size_t j) {
    Slots S = keys[j].ins;
    const Insertion d = S.front();
    S.erase(S.begin());
    Theorem2Row row;
    row.key = keys[j];
    const auto cr = integrate_slots(ev, cl, keys[j].g, d, S, table, opt, {});
    row.contour = cr.value;
    row.nodes = cr.nodes;
    row.residues = to_cd(eo_step(pd, tabq, keys[j].g, d, S));
    row.abs_diff = std::abs(row.contour - row.residues);
    row.rel_diff = row.abs_diff / std::max(1.0, std::abs(row.residues));
    rep.rows[j] = row;
  });
  for (auto& r : rep.rows) rep.max_diff = std::max(rep.max_diff, r.rel_diff);
  rep.ok = rep.max_diff <= tol;
  return rep;
}

cd richardson(const std::vector<double>& h, const std::vector<cd>& v, double* error) {
  if (h.size() != v.size() || h.empty()) throw std::invalid_argument("richardson: size mismatch");
  auto neville = [&](std::size_t from) {
    std::vector<cd> p(v.begin() + from, v.end());
    const std::size_t n = p.size();
    for (std::size_t lvl = 1; lvl < n; ++lvl)
      for (std::size_t i = 0; i + lvl < n; ++i) {
        const double hi = h[from + i], hj = h[from + i + lvl];
        p[i] = (hi * p[i + 1] - hj * p[i]) / (hi - hj);
      }
    return p[0];
  };
  const cd all = neville(0);
  if (error) *error = h.size() > 1 ? std::abs(all - neville(1)) : 0.0;
  return all;
}

SweepReport caustic_sweep(int n, const std::vector<cd>& t_caustic, const std::vector<cd>& dir, int emin, int emax,
                          int gmax, int nmax, double tol, const ContourOptions& opt) {
  if (emax < emin) throw std::invalid_argument("caustic_sweep: empty range");
  const auto keys = requested_keys(n, gmax, nmax);
  SweepReport rep;
  std::vector<double> h;
  for (int e = emin; e <= emax; ++e) {
    const double eps = std::ldexp(1.0, -e);
    std::vector<complex_t<quad>> t;
    for (std::size_t a = 0; a < t_caustic.size(); ++a)
      t.push_back(from_cd<complex_t<quad>>(t_caustic[a]) + from_cd<complex_t<quad>>(dir[a]) * complex_t<quad>(eps));
    const auto mq = build_model<complex_t<quad>>(n, t);
    BuildInfo info;
    const auto tab = build_table<complex_t<quad>>(mq, keys, {}, &info);
    SweepPoint pt;
    pt.eps = eps;
    pt.worst_cancellation = info.worst_cancellation;
    for (auto& k : keys) pt.values[k] = to_cd(tab.value(k));
    rep.points.push_back(std::move(pt));
    h.push_back(eps);
  }
  const auto mc = build_model<cd>(n, t_caustic);
  const auto ct = build_table_contour(mc, keys, opt);
  for (auto& k : keys) {
    SweepRow row;
    row.key = k;
    for (auto& p : rep.points) row.sequence.push_back(p.values.at(k));
    row.limit = richardson(h, row.sequence, &row.limit_error);
    row.caustic = ct.value(k);
    row.diff = std::abs(row.limit - row.caustic) / std::max(1.0, std::abs(row.caustic));
    // differences of successive Richardson estimates shrink
    double e1 = 0.0, e2 = 0.0;
    const std::size_t L = h.size();
    if (L >= 3) {
      std::vector<double> hh(h.begin(), h.end() - 1);
      std::vector<cd> vv(row.sequence.begin(), row.sequence.end() - 1);
      const cd prev = richardson(hh, vv);
      e1 = std::abs(prev - row.limit);
      hh.pop_back();
      vv.pop_back();
      e2 = std::abs(richardson(hh, vv) - prev);
    }
    row.converges = e1 <= std::max(e2, tol * (1.0 + std::abs(row.limit)));
    rep.max_diff = std::max(rep.max_diff, row.diff);
    rep.rows.push_back(std::move(row));
  }
  rep.ok = rep.max_diff <= tol;
  for (auto& r : rep.rows) rep.ok = rep.ok && r.converges;
  return rep;
}

}  // namespace ancestrec
