#include "ancestrec/ancestrec.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <string>

#include "ancestrec/cache.hpp"
#include "ancestrec/jobs.hpp"
#include "ancestrec/version.hpp"

using namespace ancestrec;

struct ar_model {
  AnModel<cd> m;
};

struct ar_table {
  CorrelatorTable<cd> t;
};

namespace {

thread_local std::string last_error;

std::mutex log_mu;
ar_log_fn log_fn = nullptr;
void* log_user = nullptr;

void log_message(const std::string& msg) {
  std::lock_guard<std::mutex> lk(log_mu);
  if (log_fn) log_fn(msg.c_str(), log_user);
  else std::fprintf(stderr, "ancestrec: %s\n", msg.c_str());
}

ar_status fail(ar_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
ar_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const CausticError& e) {
    return fail(AR_INVALID, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(AR_INVALID, e.what());
  } catch (const std::bad_alloc&) {
    return fail(AR_NUMERIC, "out of memory");
  } catch (const std::exception& e) {
    return fail(AR_NUMERIC, e.what());
  } catch (...) {
    return fail(AR_NUMERIC, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* ar_version(void) { return kVersion; }

const char* ar_last_error(void) { return last_error.c_str(); }

void ar_set_log(ar_log_fn fn, void* user) {
  std::lock_guard<std::mutex> lk(log_mu);
  log_fn = fn;
  log_user = user;
}

ar_status ar_model_create(int n, const double* t, ar_model** out) {
  if (!out) return fail(AR_INVALID, "ar_model_create: null output");
  *out = nullptr;
  if (n < 1) return fail(AR_INVALID, "ar_model_create: n must be at least 1");
  if (!t) return fail(AR_INVALID, "ar_model_create: null t");
  return guarded([&] {
    std::vector<cd> tv(n);
    for (int a = 0; a < n; ++a) tv[a] = cd(t[2 * a], t[2 * a + 1]);
    auto h = std::make_unique<ar_model>();
    h->m = build_model<cd>(n, tv);
    *out = h.release();
    return AR_OK;
  });
}

void ar_model_free(ar_model* m) { delete m; }

int ar_model_n(const ar_model* m) { return m ? m->m.n : 0; }

int ar_model_semisimple(const ar_model* m) { return m && m->m.semisimple ? 1 : 0; }

ar_status ar_model_flat_point(const ar_model* m, double* out) {
  if (!m || !out) return fail(AR_INVALID, "ar_model_flat_point: null argument");
  for (int a = 0; a < m->m.n; ++a) {
    out[2 * a] = m->m.tau[a].real();
    out[2 * a + 1] = m->m.tau[a].imag();
  }
  return AR_OK;
}

ar_status ar_table_build(const ar_model* m, int gmax, int nmax, int K, const char* cache_dir, ar_table** out) {
  if (!out) return fail(AR_INVALID, "ar_table_build: null output");
  *out = nullptr;
  if (!m) return fail(AR_INVALID, "ar_table_build: null model");
  if (gmax < 0 || nmax < 1 || K < 0) return fail(AR_INVALID, "ar_table_build: bad bounds");
  if (!m->m.semisimple) return fail(AR_INVALID, "ar_table_build: point is not semisimple");
  return guarded([&] {
    std::unique_ptr<RCache> cache;
    if (cache_dir && *cache_dir) cache = std::make_unique<RCache>(cache_dir, kVersion, log_message);
    RecursionOptions opt;
    opt.K = K;
    opt.r_source = cache.get();
    auto h = std::make_unique<ar_table>();
    h->t = build_table(m->m, requested_keys(m->m.n, gmax, nmax), opt);
    *out = h.release();
    return AR_OK;
  });
}

void ar_table_free(ar_table* t) { delete t; }

size_t ar_table_size(const ar_table* t) { return t ? t->t.size() : 0; }

ar_status ar_table_value(const ar_table* t, int g, int n, const int* a, const int* m, double* re, double* im) {
  if (!t || !re || !im || (n > 0 && (!a || !m))) return fail(AR_INVALID, "ar_table_value: null argument");
  Slots s;
  for (int k = 0; k < n; ++k) {
    if (a[k] < 1 || a[k] > t->t.N() || m[k] < 0) return fail(AR_INVALID, "ar_table_value: insertion out of range");
    s.push_back({a[k] - 1, m[k]});
  }
  return guarded([&] {
    const cd v = t->t.value(CorrelatorKey(g, s));
    *re = v.real();
    *im = v.imag();
    return AR_OK;
  });
}

ar_status ar_run_job(const char* job_json, char** report) {
  if (!report) return fail(AR_INVALID, "ar_run_job: null output");
  *report = nullptr;
  if (!job_json) return fail(AR_INVALID, "ar_run_job: null job");
  return guarded([&] {
    auto job = nlohmann::json::parse(job_json, nullptr, false);
    if (job.is_discarded()) return fail(AR_INVALID, "job is not valid JSON");
    auto r = run_job(job, log_message);
    if (!r.report.is_null()) *report = dup(report_text(r.report));
    if (!r.message.empty()) last_error = r.message;
    return static_cast<ar_status>(r.status);
  });
}

void ar_string_free(char* s) { std::free(s); }

}  // extern "C"
