#include "ancestrec/jobs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "ancestrec/cache.hpp"
#include "ancestrec/caustic.hpp"
#include "ancestrec/dvv.hpp"
#include "ancestrec/quantization.hpp"
#include "ancestrec/version.hpp"

namespace ancestrec {

using json = nlohmann::json;

namespace {

constexpr int kSchema = 1;

class JobInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json cjson(const cd& z) { return json::array({z.real(), z.imag()}); }

json cvec(const std::vector<cd>& v) {
  json a = json::array();
  for (auto& z : v) a.push_back(cjson(z));
  return a;
}

cd parse_complex(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw JobInvalid(what + ": expected a number or [re, im]");
}

std::vector<cd> parse_cvec(const json& j, const std::string& what) {
  if (!j.is_array()) throw JobInvalid(what + ": expected an array");
  std::vector<cd> v;
  for (auto& x : j) {
    v.push_back(parse_complex(x, what));
    if (!std::isfinite(v.back().real()) || !std::isfinite(v.back().imag())) throw JobInvalid(what + ": not finite");
  }
  return v;
}

int get_int(const json& job, const char* name, int def, int lo, int hi) {
  if (!job.contains(name) || job[name].is_null()) return def;
  if (!job[name].is_number_integer()) throw JobInvalid(std::string(name) + ": expected an integer");
  const long long v = job[name].get<long long>();
  if (v < lo || v > hi)
    throw JobInvalid(std::string(name) + " must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

double get_tol(const json& job, double def) {
  if (!job.contains("tol") || job["tol"].is_null()) return def;
  if (!job["tol"].is_number()) throw JobInvalid("tol: expected a number");
  const double t = job["tol"].get<double>();
  if (!(t > 0.0) || !std::isfinite(t)) throw JobInvalid("tol must be positive");
  return t;
}

struct ModelSpec {
  int n = 0;
  std::vector<cd> t;
};

ModelSpec parse_model(const json& job) {
  if (!job.contains("model") || !job["model"].is_object()) throw JobInvalid("model: missing");
  const json& mj = job["model"];
  if (!mj.contains("type") || !mj["type"].is_string()) throw JobInvalid("model.type: expected \"A<n>\"");
  const std::string ty = mj["type"].get<std::string>();
  if (ty.size() < 2 || ty[0] != 'A' || !std::all_of(ty.begin() + 1, ty.end(), ::isdigit) || ty.size() > 4)
    throw JobInvalid("model.type: expected \"A<n>\", got \"" + ty + "\"");
  ModelSpec s;
  s.n = std::stoi(ty.substr(1));
  if (s.n < 1) throw JobInvalid("model: n must be at least 1");
  if (s.n > 12) throw JobInvalid("model: n must be at most 12");
  s.t.assign(s.n, cd(0));
  if (mj.contains("t") && !mj["t"].is_null()) {
    s.t = parse_cvec(mj["t"], "model.t");
    if (static_cast<int>(s.t.size()) != s.n)
      throw JobInvalid("model.t: expected " + std::to_string(s.n) + " coordinates, got " + std::to_string(s.t.size()));
  }
  return s;
}

json model_json(const ModelSpec& s) { return {{"type", "A" + std::to_string(s.n)}, {"t", cvec(s.t)}}; }

json key_json(const CorrelatorKey& k) {
  json ins = json::array();
  for (auto& x : k.ins) ins.push_back(json::array({x.a + 1, x.m}));
  return {{"g", k.g}, {"insertions", ins}};
}

bool key_order(const CorrelatorKey& a, const CorrelatorKey& b) {
  if (a.g != b.g) return a.g < b.g;
  if (a.n() != b.n()) return a.n() < b.n();
  return a.ins < b.ins;
}

std::vector<CorrelatorKey> sorted(std::vector<CorrelatorKey> keys) {
  std::sort(keys.begin(), keys.end(), key_order);
  return keys;
}

double rel(const cd& a, const cd& b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

json header(const char* command, const ModelSpec& s, const AnModel<cd>& m) {
  return {{"schema", kSchema}, {"command", command}, {"version", kVersion}, {"model", model_json(s)},
          {"flat_point", cvec(m.tau)}};
}

std::unique_ptr<RCache> open_cache(const json& job, const LogFn& log) {
  std::string dir;
  if (job.contains("cache") && job["cache"].is_string()) dir = job["cache"].get<std::string>();
  if (dir.empty()) return nullptr;
  return std::make_unique<RCache>(dir, kVersion, [log](const std::string& w) {
    if (log) log("warning: " + w);
  });
}

// smallest K that can hold the top correlators of the closure
int min_order(const std::set<CorrelatorKey>& closure) {
  int top = 1;
  for (auto& k : closure) top = std::max(top, 3 * k.g - 3 + k.n());
  return top;
}

void check_order(int K, int N, const std::vector<CorrelatorKey>& keys, bool all_slots) {
  if (K <= 0) return;
  const int lo = min_order(dependency_closure(N, keys, all_slots));
  if (K < lo) throw JobInvalid("order " + std::to_string(K) + " is below the minimum " + std::to_string(lo));
}

// ---------------------------------------------------------------- correlators

JobResult cmd_correlators(const json& job, const LogFn& log) {
  const auto s = parse_model(job);
  const int gmax = get_int(job, "gmax", 2, 0, 8);
  const int nmax = get_int(job, "nmax", 3, 1, 10);
  const int K = get_int(job, "order", 0, 0, 200);
  const bool caustic = job.value("caustic", false);
  const auto m = build_model<cd>(s.n, s.t);
  const auto keys = sorted(requested_keys(s.n, gmax, nmax));

  json rep = header("correlators", s, m);
  rep["bounds"] = {{"gmax", gmax}, {"nmax", nmax}, {"order", K}};
  CorrelatorTable<cd> tab(s.n);
  if (caustic) {
    if (s.n != 2) throw JobInvalid("caustic mode needs A2");
    tab = build_table_contour(m, keys);
    rep["residual_report"] = {{"mode", "contour"}, {"semisimple", m.semisimple}};
  } else {
    if (!m.semisimple) throw JobInvalid("point is not semisimple (critical values collide); use --caustic");
    check_order(K, s.n, keys, false);
    auto cache = open_cache(job, log);
    RecursionOptions opt;
    opt.K = K;
    opt.r_source = cache.get();
    BuildInfo info;
    tab = build_table(m, keys, opt, &info);
    json flagged = json::array();
    for (auto& [k, e] : tab.entries())
      if (e.cancellation > 1e8) flagged.push_back(key_json(k));
    rep["residual_report"] = {{"mode", "recursion"},
                              {"K", info.K},
                              {"attempts", info.attempts},
                              {"closure_size", info.closure_size},
                              {"r_ode", info.r_ode},
                              {"r_unitarity", info.r_unitarity},
                              {"worst_cancellation", info.worst_cancellation},
                              {"worst_key", info.worst_cancellation > 1.0 ? info.worst_key.str() : ""},
                              {"flagged", flagged}};
  }
  json cs = json::array();
  for (auto& k : keys) {
    const auto* e = tab.find(k);
    json row = key_json(k);
    row["value"] = cjson(e ? e->value : tab.value(k));
    row["provenance"] = e ? provenance_name(e->provenance) : "recursion";
    cs.push_back(std::move(row));
  }
  rep["correlators"] = std::move(cs);
  return {JobStatus::ok, std::move(rep), {}};
}

// ---------------------------------------------------------------- verify

struct Checks {
  json list = json::array();
  bool ok = true;
  void add(const std::string& name, double value, double tol) {
    const bool pass = std::isfinite(value) && value <= tol;
    ok = ok && pass;
    list.push_back({{"name", name}, {"value", value}, {"tol", tol}, {"pass", pass}});
  }
  void skip(const std::string& name, const std::string& why) {
    ok = false;
    list.push_back({{"name", name}, {"pass", false}, {"skipped", why}});
  }
};

// serves one given R and computes any other
class FixedR : public RSource {
 public:
  explicit FixedR(const RMatrix<cd>& r, RSource* fallback) : r_(r), fallback_(fallback) {}
  RMatrix<cd> r_matrix(const AnModel<cd>& m, const CanonicalFrame<cd>& f, int K, double tol) override {
    if (K == r_.K() && f.branch == r_.frame.branch) return r_;
    return fallback_ ? fallback_->r_matrix(m, f, K, tol) : compute_r(m, f, K, tol);
  }

 private:
  RMatrix<cd> r_;
  RSource* fallback_;
};

void model_checks(const AnModel<cd>& m, Checks& c, double tol) {
  const int N = m.n;
  double comm = 0, assoc = 0, unit = 0, frob = 0, eta = 0;
  auto prod = [&](int a, int b) {  // v_a . v_b in flat coordinates
    std::vector<cd> w(N);
    for (int e = 0; e < N; ++e) w[e] = m.structure[a](b, e);
    return w;
  };
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      eta = std::max(eta, std::abs(m.eta(a, b) - m.eta(b, a)));
      const auto ab = prod(a, b), ba = prod(b, a);
      for (int e = 0; e < N; ++e) {
        comm = std::max(comm, std::abs(ab[e] - ba[e]));
        unit = std::max(unit, std::abs(m.structure[N - 1](b, e) - (b == e ? cd(1) : cd(0))));
      }
      for (int c2 = 0; c2 < N; ++c2) {
        // (v_a v_b) v_c against v_a (v_b v_c)
        for (int e = 0; e < N; ++e) {
          cd l(0), r(0);
          for (int f = 0; f < N; ++f) {
            l += ab[f] * m.structure[f](c2, e);
            r += m.structure[b](c2, f) * m.structure[a](f, e);
          }
          assoc = std::max(assoc, std::abs(l - r));
        }
        // (v_a v_b, v_c) = (v_a, v_b v_c)
        cd l(0), r(0);
        for (int f = 0; f < N; ++f) {
          l += ab[f] * m.eta(f, c2);
          r += m.structure[b](c2, f) * m.eta(a, f);
        }
        frob = std::max(frob, std::abs(l - r));
      }
    }
  c.add("model.eta_symmetric", eta, tol);
  c.add("model.commutativity", comm, tol);
  c.add("model.associativity", assoc, tol);
  c.add("model.unit", unit, tol);
  c.add("model.frobenius", frob, tol);
}

JobResult cmd_verify(const json& job, const LogFn& log) {
  const auto s = parse_model(job);
  const int gmax = get_int(job, "gmax", 2, 0, 6);
  const int nmax = get_int(job, "nmax", 3, 1, 8);
  const int Kreq = get_int(job, "order", 0, 0, 200);
  const double tol = get_tol(job, 1e-8);
  const auto m = build_model<cd>(s.n, s.t);
  if (!m.semisimple) throw JobInvalid("verify needs a semisimple point");
  const auto keys = sorted(requested_keys(s.n, gmax, nmax));
  check_order(Kreq, s.n, keys, true);
  const auto closure = dependency_closure(s.n, keys, true);
  const int K = Kreq > 0 ? Kreq : min_order(closure) + 2;
  auto cache = open_cache(job, log);

  json rep = header("verify", s, m);
  rep["bounds"] = {{"gmax", gmax}, {"nmax", nmax}, {"order", K}, {"tol", tol}};
  Checks c;
  model_checks(m, c, tol);

  const auto frame = canonical_frame(m);
  RMatrix<cd> r;
  if (job.contains("r_file") && job["r_file"].is_string()) {
    std::ifstream in(job["r_file"].get<std::string>(), std::ios::binary);
    if (!in) throw JobInvalid("cannot read " + job["r_file"].get<std::string>());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      r.R = parse_r(ss.str());
    } catch (const std::invalid_argument& e) {
      throw JobInvalid(std::string("r_file: ") + e.what());
    }
    if (r.R.dim() != static_cast<std::size_t>(s.n)) throw JobInvalid("r_file: wrong dimension");
    r.frame = frame;
    r.residuals = verify_r(r.R, frame);
  } else {
    try {
      r = cache ? cache->r_matrix(m, frame, K, std::numeric_limits<double>::infinity())
                : compute_r(m, frame, K, std::numeric_limits<double>::infinity());
    } catch (const RMatrixError& e) {
      r.R = {};
      r.residuals = e.residuals;
    }
  }
  RResiduals uni = r.residuals;
  uni.ode.clear();
  c.add("r.ode", r.residuals.max_ode(), tol);
  c.add("r.unitarity", r_defect(r.R, uni), tol);
  const bool r_ok = c.ok;
  const double vc = r_ok ? v_matrices(r.R, std::numeric_limits<double>::infinity()).consistency : 0.0;
  if (r_ok) c.add("v.consistency", vc, tol);

  const char* dependent[] = {"recursion.genus0_seed", "recursion.genus1_seed", "recursion.slot_symmetry",
                             "recursion.branch_independence", "recursion.dilaton", "recursion.string",
                             "oracle.quantization", "oracle.tameness", "periods.global_vs_local",
                             "propagator.cross_vs_diag"};
  if (!r_ok) {
    for (auto* name : dependent) c.skip(name, "R failed its checks");
    if (s.n == 1) c.skip("oracle.dvv", "R failed its checks");
  } else {
    FixedR given(r, cache.get());
    RecursionOptions opt;
    opt.K = r.K();
    opt.max_K = std::max(opt.max_K, r.K());
    opt.all_slots = true;
    opt.r_source = &given;
    auto tab = build_table(m, keys, opt);

    int kmin = -1, kmax = 1;
    for (auto& k : closure) {
      for (auto& x : k.ins) kmin = std::min(kmin, -1 - x.m);
      kmax = std::max(kmax, 3 * k.g - 3 + k.n() + 1);
    }
    const auto pd = make_point_data(m, r, kmin, kmax, 0);
    double g0 = 0, g1 = 0;
    for (auto& [k, e] : tab.entries()) {
      if (!is_initial_key(k)) continue;
      Slots S = k.ins;
      const Insertion d = S.front();
      S.erase(S.begin());
      const double d0 = rel(eo_step(pd, tab, k.g, d, S), e.value);
      (k.g == 0 ? g0 : g1) = std::max(k.g == 0 ? g0 : g1, d0);
    }
    c.add("recursion.genus0_seed", g0, tol);
    c.add("recursion.genus1_seed", g1, tol);

    double sym = 0;
    for (auto& k : keys) {
      if (is_initial_key(k)) continue;
      for (int di = 1; di < k.n(); ++di) {
        if (k.ins[di] == k.ins[di - 1]) continue;
        Slots S = k.ins;
        const Insertion d = S[di];
        S.erase(S.begin() + di);
        sym = std::max(sym, rel(eo_step(pd, tab, k.g, d, S), tab.value(k)));
      }
    }
    c.add("recursion.slot_symmetry", sym, tol);

    double br = 0;
    for (int i = 0; i < s.n; ++i) {
      RecursionOptions o2;
      o2.K = r.K();
      o2.max_K = opt.max_K;
      o2.branch.assign(s.n, 1);
      o2.branch[i] = -1;
      o2.r_source = cache.get();
      auto flipped = build_table(m, keys, o2);
      for (auto& k : keys) br = std::max(br, rel(flipped.value(k), tab.value(k)));
    }
    c.add("recursion.branch_independence", br, tol);

    double dil = 0, str = 0;
    const int unit = s.n - 1;
    for (auto& k : keys) {
      if (k.n() >= nmax) continue;
      Slots d = k.ins;
      d.push_back({unit, 1});
      CorrelatorKey kd(k.g, d);
      if (kd.tame()) dil = std::max(dil, rel(tab.value(kd), cd(2 * k.g - 2 + k.n()) * tab.value(k)));
      Slots st = k.ins;
      st.push_back({unit, 0});
      cd rhs(0);
      for (int j = 0; j < k.n(); ++j) {
        if (k.ins[j].m == 0) continue;
        Slots q = k.ins;
        q[j].m -= 1;
        rhs += tab.value(k.g, q);
      }
      str = std::max(str, rel(tab.value(CorrelatorKey(k.g, st)), rhs));
    }
    c.add("recursion.dilaton", dil, tol);
    c.add("recursion.string", str, tol);

    // independent construction, 2g - 2 + n <= 3
    std::vector<CorrelatorKey> okeys;
    for (auto& k : requested_keys(s.n, 2, 5))
      if (2 * k.g - 2 + k.n() <= 3) okeys.push_back(k);
    RecursionOptions o3;
    o3.K = std::max(r.K(), min_order(dependency_closure(s.n, okeys, false)) + 2);
    o3.r_source = cache.get();
    auto rtab = build_table(m, okeys, o3);
    QuantizationOptions qo;
    qo.chi_max = 3;
    double tame = 0;
    auto qtab = ancestor_via_quantization(m, r.K() >= 8 ? r : compute_r(m, frame, 8), qo, &tame);
    double od = 0;
    for (auto& k : okeys) od = std::max(od, rel(qtab.value(k), rtab.value(k)));
    c.add("oracle.quantization", od, std::max(tol, 1e-6));
    c.add("oracle.tameness", tame, std::max(tol, 1e-6));

    // global periods and propagators against the local expansions
    {
      auto r18 = compute_r(m, frame, 14, std::numeric_limits<double>::infinity());
      auto V = v_matrices(r18.R);
      RootPeriods P(m, -2, 3);
      double per = 0, prop = 0;
      for (int i = 0; i < s.n; ++i) {
        double d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < s.n; ++j)
          if (j != i) d = std::min(d, std::abs(m.u[j] - m.u[i]));
        if (!std::isfinite(d)) d = 1.0;
        const cd lam = m.u[i] + cd(0.06, 0.025) * d;
        const auto x = P.roots(lam);
        const auto w = vanishing_cycle(P, i, lam);
        const cd sq = std::sqrt(lam - m.u[i]);
        for (int k = -2; k <= 3; ++k) {
          const auto ps = period_expansion(m, r18, i, k);
          const auto g = P.vector(k, x, w);
          // the expansion fixes the sign of the cycle
          double plus = 0, minus = 0, scale = 1;
          for (int b = 0; b < s.n; ++b) {
            const cd e = ps[b].evaluate_s(sq);
            plus = std::max(plus, std::abs(g[b] - e));
            minus = std::max(minus, std::abs(g[b] + e));
            scale = std::max(scale, std::abs(e));
          }
          per = std::max(per, std::min(plus, minus) / scale);
        }
        const cd mu = lam + (lam - m.u[i]) * cd(0.3, 0.1);
        cd series = cd(2) / ((lam - mu) * (lam - mu));
        for (int k = 0; k <= 11; ++k)
          series += propagator_diag(r18, V, i, k, m.u[i]).evaluate_s(sq) * std::pow(mu - lam, k);
        prop = std::max(prop, std::abs(propagator_cross(P, i, w, w, lam, mu) - series) / std::abs(series));
      }
      c.add("periods.global_vs_local", per, std::max(tol, 1e-8));
      c.add("propagator.cross_vs_diag", prop, std::max(tol, 1e-6));
    }

    if (s.n == 1) {
      double dv = 0;
      for (auto& k : keys) {
        std::vector<int> ks;
        for (auto& x : k.ins) ks.push_back(x.m);
        dv = std::max(dv, rel(tab.value(k), cd(dvv_intersection(k.g, ks).convert_to<double>())));
      }
      c.add("oracle.dvv", dv, tol);
    }
  }
  rep["checks"] = c.list;
  rep["ok"] = c.ok;
  return {c.ok ? JobStatus::ok : JobStatus::verify_failed, std::move(rep), {}};
}

// ---------------------------------------------------------------- theorem2

JobResult cmd_theorem2(const json& job, const LogFn&) {
  const auto s = parse_model(job);
  const int gmax = get_int(job, "gmax", 2, 0, 4);
  const int nmax = get_int(job, "nmax", 3, 1, 5);
  const double tol = get_tol(job, 1e-5);
  const auto m = build_model<cd>(s.n, s.t);
  if (!m.semisimple) throw JobInvalid("theorem2 needs a semisimple point near the caustic");
  const auto r2 = verify_theorem2(m, gmax, nmax - 1, tol);
  const auto cl = find_cluster(m);
  json rep = header("theorem2", s, m);
  rep["bounds"] = {{"gmax", gmax}, {"nmax", nmax}, {"tol", tol}};
  rep["cluster"] = {{"critical_values", json::array({cl.i + 1, cl.j + 1})},
                    {"center", cjson(cl.center)},
                    {"radius", cl.radius}};
  json rows = json::array();
  for (auto& row : r2.rows) {
    json j = key_json(row.key);
    j["contour"] = cjson(row.contour);
    j["residues"] = cjson(row.residues);
    j["abs_diff"] = row.abs_diff;
    j["rel_diff"] = row.rel_diff;
    j["nodes"] = row.nodes;
    rows.push_back(std::move(j));
  }
  rep["rows"] = std::move(rows);
  rep["max_diff"] = r2.max_diff;
  rep["ok"] = r2.ok;
  return {r2.ok ? JobStatus::ok : JobStatus::verify_failed, std::move(rep), {}};
}

// ---------------------------------------------------------------- sweep

JobResult cmd_sweep(const json& job, const LogFn&) {
  const auto s = parse_model(job);
  const int gmax = get_int(job, "gmax", 2, 0, 3);
  const int nmax = get_int(job, "nmax", 3, 1, 4);
  const double tol = get_tol(job, 1e-3);
  if (s.n != 2) throw JobInvalid("sweep needs A2");
  std::vector<cd> dir(s.n, cd(0));
  dir[0] = cd(-1);
  int emin = 3, emax = 10;
  if (job.contains("sweep") && !job["sweep"].is_null()) {
    const json& sw = job["sweep"];
    if (!sw.is_object()) throw JobInvalid("sweep: expected an object");
    if (sw.contains("direction")) dir = parse_cvec(sw["direction"], "sweep.direction");
    emin = get_int(sw, "emin", emin, 0, 40);
    emax = get_int(sw, "emax", emax, 0, 40);
  }
  if (static_cast<int>(dir.size()) != s.n) throw JobInvalid("sweep.direction: wrong length");
  if (emax <= emin) throw JobInvalid("sweep: need at least two eps values to extrapolate");
  const auto m = build_model<cd>(s.n, s.t);
  const auto sr = caustic_sweep(s.n, s.t, dir, emin, emax, gmax, nmax, tol);
  json rep = header("sweep", s, m);
  rep["bounds"] = {{"gmax", gmax}, {"nmax", nmax}, {"tol", tol}};
  rep["path"] = {{"direction", cvec(dir)}, {"emin", emin}, {"emax", emax}};
  json pts = json::array();
  for (auto& p : sr.points) pts.push_back({{"eps", p.eps}, {"worst_cancellation", p.worst_cancellation}});
  rep["points"] = std::move(pts);
  json rows = json::array();
  for (auto& row : sr.rows) {
    json j = key_json(row.key);
    j["sequence"] = cvec(row.sequence);
    json dev = json::array();
    for (auto& v : row.sequence) dev.push_back(std::abs(v - row.caustic));
    j["deviation"] = std::move(dev);
    j["limit"] = cjson(row.limit);
    j["limit_error"] = row.limit_error;
    j["caustic"] = cjson(row.caustic);
    j["diff"] = row.diff;
    j["converges"] = row.converges;
    rows.push_back(std::move(j));
  }
  rep["rows"] = std::move(rows);
  rep["max_diff"] = sr.max_diff;
  rep["ok"] = sr.ok;
  return {sr.ok ? JobStatus::ok : JobStatus::verify_failed, std::move(rep), {}};
}

}  // namespace

JobResult run_job(const json& job, const LogFn& log) {
  try {
    if (!job.is_object()) throw JobInvalid("job: expected a JSON object");
    if (!job.contains("command") || !job["command"].is_string()) throw JobInvalid("job: missing command");
    const std::string cmd = job["command"].get<std::string>();
    if (cmd == "correlators") return cmd_correlators(job, log);
    if (cmd == "verify") return cmd_verify(job, log);
    if (cmd == "theorem2") return cmd_theorem2(job, log);
    if (cmd == "sweep") return cmd_sweep(job, log);
    throw JobInvalid("unknown command \"" + cmd + "\"");
  } catch (const JobInvalid& e) {
    return {JobStatus::invalid, nullptr, e.what()};
  } catch (const CausticError& e) {
    return {JobStatus::invalid, nullptr, e.what()};
  } catch (const std::invalid_argument& e) {
    return {JobStatus::invalid, nullptr, e.what()};
  } catch (const json::exception& e) {
    return {JobStatus::invalid, nullptr, e.what()};
  } catch (const std::exception& e) {
    return {JobStatus::numeric, nullptr, e.what()};
  }
}

std::string report_text(const json& report) { return report.dump() + "\n"; }

}  // namespace ancestrec
