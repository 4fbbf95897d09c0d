#include "ancestrec/cache.hpp"

#include <unistd.h>

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ancestrec {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kCacheSchema = 1;

json cjson(const cd& z) { return json::array({z.real(), z.imag()}); }

cd from_cjson(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json r_json(const MatrixSeries<cd>& R) {
  json out = json::array();
  for (const auto& M : R.coeffs) {
    json rows = json::array();
    for (std::size_t i = 0; i < M.rows(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < M.cols(); ++j) row.push_back(cjson(M(i, j)));
      rows.push_back(std::move(row));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

MatrixSeries<cd> r_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("R: expected a non-empty array");
  MatrixSeries<cd> R;
  const std::size_t n = j[0].size();
  if (n == 0) throw std::invalid_argument("R: empty matrix");
  for (const auto& rows : j) {
    if (!rows.is_array() || rows.size() != n) throw std::invalid_argument("R: inconsistent dimension");
    Mat<cd> M(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!rows[i].is_array() || rows[i].size() != n) throw std::invalid_argument("R: inconsistent dimension");
      for (std::size_t k = 0; k < n; ++k) M(i, k) = from_cjson(rows[i][k]);
    }
    R.coeffs.push_back(std::move(M));
  }
  return R;
}

// empty means all +1, as in canonical_frame
std::vector<int> full_branch(const AnModel<cd>& m, const std::vector<int>& branch) {
  return branch.empty() ? std::vector<int>(m.n, 1) : branch;
}

json key_json(const AnModel<cd>& m, const std::vector<int>& branch, int K) {
  json t = json::array();
  for (auto& x : m.t) t.push_back(cjson(x));
  return {{"n", m.n}, {"t", t}, {"K", K}, {"branch", full_branch(m, branch)}};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace

std::string serialize_r(const MatrixSeries<cd>& R) {
  return json{{"schema", kCacheSchema}, {"R", r_json(R)}}.dump();
}

MatrixSeries<cd> parse_r(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("R: not valid JSON");
  if (!j.is_object() || !j.contains("R")) throw std::invalid_argument("R: missing field \"R\"");
  return r_from_json(j["R"]);
}

RCache::RCache(std::string dir, std::string version, Warn warn)
    : dir_(std::move(dir)), version_(std::move(version)), warn_(std::move(warn)) {
  if (dir_.empty()) throw std::invalid_argument("RCache: empty directory");
}

void RCache::warn(const std::string& msg) const {
  if (warn_) warn_(msg);
}

std::string RCache::key(const AnModel<cd>& m, const std::vector<int>& branch, int K) const {
  // exact bit patterns of t, so nearby points never share an entry
  std::string s = "A" + std::to_string(m.n) + "|";
  for (auto& x : m.t)
    s += hex64(std::bit_cast<std::uint64_t>(x.real())) + ":" + hex64(std::bit_cast<std::uint64_t>(x.imag())) + ",";
  s += "|K" + std::to_string(K) + "|b";
  for (int b : full_branch(m, branch)) s += std::to_string(b) + ",";
  s += "|v" + version_;
  return hex64(fnv1a(s));
}

std::string RCache::path(const AnModel<cd>& m, const std::vector<int>& branch, int K) const {
  return (fs::path(dir_) / ("r-" + key(m, branch, K) + ".json")).string();
}

std::optional<RMatrix<cd>> RCache::load(const AnModel<cd>& m, const CanonicalFrame<cd>& f, int K, double tol) {
  const std::string p = path(m, f.branch, K);
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    warn("corrupt cache entry " + p + " (not JSON); recomputing");
    return std::nullopt;
  }
  if (!j.contains("version") || j["version"] != version_) return std::nullopt;
  if (!j.contains("key") || j["key"] != key_json(m, f.branch, K)) return std::nullopt;
  RMatrix<cd> r;
  try {
    r.R = r_from_json(j.at("R"));
  } catch (const std::exception& e) {
    warn("corrupt cache entry " + p + " (" + e.what() + "); recomputing");
    return std::nullopt;
  }
  if (r.R.order() != K || r.R.dim() != static_cast<std::size_t>(m.n)) {
    warn("corrupt cache entry " + p + " (wrong shape); recomputing");
    return std::nullopt;
  }
  r.frame = f;
  r.residuals = verify_r(r.R, f);
  if (!(r_defect(r.R, r.residuals) <= tol)) {
    warn("corrupt cache entry " + p + " (residuals above tolerance); recomputing");
    return std::nullopt;
  }
  return r;
}

void RCache::store(const AnModel<cd>& m, const CanonicalFrame<cd>& f, const RMatrix<cd>& r) {
  static std::atomic<unsigned> counter{0};
  const std::string p = path(m, f.branch, r.K());
  json j = {{"schema", kCacheSchema}, {"version", version_}, {"key", key_json(m, f.branch, r.K())}, {"R", r_json(r.R)}};
  const std::string text = j.dump();
  std::error_code ec;
  fs::create_directories(dir_, ec);
  const std::string tmp = p + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      warn("cannot write cache entry " + p);
      return;
    }
    out << text;
    if (!out.flush()) {
      warn("cannot write cache entry " + p);
      fs::remove(tmp, ec);
      return;
    }
  }
  fs::rename(tmp, p, ec);
  if (ec) {
    warn("cannot write cache entry " + p + ": " + ec.message());
    fs::remove(tmp, ec);
  }
}

RMatrix<cd> RCache::r_matrix(const AnModel<cd>& m, const CanonicalFrame<cd>& f, int K, double tol) {
  std::lock_guard<std::mutex> lk(mu_);
  if (auto r = load(m, f, K, tol)) {
    ++hits_;
    return std::move(*r);
  }
  ++misses_;
  auto r = compute_r(m, f, K, tol);
  store(m, f, r);
  return r;
}

std::string cache_dir_from_env() {
  const char* e = std::getenv("ANCESTREC_CACHE");
  return e ? std::string(e) : std::string();
}

}  // namespace ancestrec
