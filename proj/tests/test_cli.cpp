#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ancestrec/cache.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;
using namespace ancestrec;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

const fs::path& scratch() {
  static const fs::path p = [] {
    auto d = fs::temp_directory_path() / ("ancestrec-cli-test-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const std::string& env = "") {
  const auto o = scratch() / "stdout", e = scratch() / "stderr";
  const std::string cmd = env + " '" ANCESTREC_CLI "' " + args + " >'" + o.string() + "' 2>'" + e.string() + "'";
  const int st = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

const json* find_correlator(const json& rep, int g, const json& ins) {
  for (auto& c : rep["correlators"])
    if (c["g"] == g && c["insertions"] == ins) return &c;
  return nullptr;
}

std::vector<fs::path> entries(const fs::path& dir) {
  std::vector<fs::path> v;
  if (fs::exists(dir))
    for (auto& e : fs::directory_iterator(dir)) v.push_back(e.path());
  return v;
}

const std::string kA2 = "--model A2 --t=-0.35+0.15i,0.2-0.1i";

}  // namespace

TEST_CASE("A1 table has the genus two one-point number") {
  auto r = run("correlators --model A1 --gmax 2");
  REQUIRE(r.code == 0);
  auto rep = json::parse(r.out);
  CHECK(rep["schema"] == 1);
  CHECK(rep["model"]["type"] == "A1");
  const json* c = find_correlator(rep, 2, json::parse("[[1,4]]"));
  REQUIRE(c != nullptr);
  CHECK((*c)["value"][0].get<double>() == doctest::Approx(1.0 / 1152).epsilon(1e-12));
  CHECK((*c)["value"][1].get<double>() == 0.0);
  CHECK((*c)["provenance"] == "recursion");
}

TEST_CASE("A2 at (-1, 0): three-point block is the structure constants") {
  auto r = run("correlators --model A2 --t=-1,0 --gmax 0");
  REQUIRE(r.code == 0);
  auto rep = json::parse(r.out);
  CHECK(rep["flat_point"] == json::parse("[[-1.0,0.0],[0.0,0.0]]"));
  auto v = [&](const char* ins) { return (*find_correlator(rep, 0, json::parse(ins)))["value"][0].get<double>(); };
  CHECK(v("[[1,0],[1,0],[1,0]]") == doctest::Approx(1.0));
  CHECK(v("[[1,0],[1,0],[2,0]]") == doctest::Approx(0.0));
  CHECK(v("[[1,0],[2,0],[2,0]]") == doctest::Approx(1.0));
  CHECK(v("[[2,0],[2,0],[2,0]]") == doctest::Approx(0.0));
  // correlators are listed by genus, then length, then insertions
  auto& cs = rep["correlators"];
  for (std::size_t k = 1; k < cs.size(); ++k) {
    auto key = [&](std::size_t j) { return std::tuple(cs[j]["g"].get<int>(), cs[j]["insertions"].size(), cs[j]["insertions"].dump()); };
    CHECK(key(k - 1) < key(k));
  }
}

TEST_CASE("validation errors exit with 2") {
  CHECK(run("correlators --model A0").code == 2);
  CHECK(run("correlators --model B2").code == 2);
  CHECK(run("correlators --model A2 --t 1,2,3").code == 2);
  CHECK(run("correlators --model A2 --t 1,x").code == 2);
  CHECK(run("correlators --model A2 --t 0,0").code == 2);
  CHECK(run("correlators --model A2 --gmax -1").code == 2);
  CHECK(run("correlators --model A2 --t=-0.3,0.1 --order 1 --gmax 2").code == 2);
  CHECK(run("sweep --model A2 --sweep 3:3").code == 2);
  CHECK(run("sweep --model A2 --sweep 3").code == 2);
  CHECK(run("theorem2 --model A2 --t 0,0").code == 2);
  CHECK(run("verify --model A2 --tol 0").code == 2);
  CHECK(run("frobnicate --model A2").code == 2);
  auto r = run("correlators --model A0");
  CHECK(r.err.find("n must be at least 1") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("caustic mode evaluates on the A2 caustic") {
  auto r = run("correlators --model A2 --t 0,0 --gmax 1 --caustic");
  REQUIRE(r.code == 0);
  auto rep = json::parse(r.out);
  CHECK(rep["residual_report"]["mode"] == "contour");
  // <v_2 psi>_1 = Tr(v_2 .)/24 = 1/12
  const json* c = find_correlator(rep, 1, json::parse("[[2,1]]"));
  REQUIRE(c != nullptr);
  CHECK((*c)["value"][0].get<double>() == doctest::Approx(1.0 / 12).epsilon(1e-10));
}

TEST_CASE("identical jobs give identical bytes, with and without the cache") {
  const auto dir = scratch() / "cache-det";
  auto a = run("correlators " + kA2 + " --gmax 2");
  auto b = run("correlators " + kA2 + " --gmax 2");
  auto c = run("correlators " + kA2 + " --gmax 2 --cache '" + dir.string() + "'");
  auto d = run("correlators " + kA2 + " --gmax 2 --cache '" + dir.string() + "'");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  CHECK(a.out == d.out);
  CHECK(entries(dir).size() == 1);
  const auto rp = scratch() / "report.json";
  CHECK(run("correlators " + kA2 + " --gmax 2 --report '" + rp.string() + "'").out.empty());
  CHECK(slurp(rp) == a.out);
}

TEST_CASE("cache directory from the environment, corrupt entries recomputed") {
  const auto dir = scratch() / "cache-env";
  const std::string env = "ANCESTREC_CACHE='" + dir.string() + "'";
  auto a = run("correlators " + kA2, env);
  REQUIRE(a.code == 0);
  auto files = entries(dir);
  REQUIRE(files.size() == 1);
  const std::string good = slurp(files[0]);
  { std::ofstream(files[0], std::ios::trunc) << "{\"schema\":1,\"version\""; }
  auto b = run("correlators " + kA2, env);
  CHECK(b.code == 0);
  CHECK(b.out == a.out);
  CHECK(b.err.find("warning: corrupt cache entry") != std::string::npos);
  CHECK(slurp(files[0]) == good);
  // entries of another version sit beside the current one and are not read
  auto c = run("correlators " + kA2, env);
  CHECK(c.err.empty());
}

TEST_CASE("verify passes on good input and fails on a corrupted R") {
  auto a1 = run("verify --model A1 --t 0.3-0.2i --gmax 3 --nmax 3");
  CHECK(a1.code == 0);
  auto rep = json::parse(a1.out);
  bool saw_dvv = false;
  for (auto& c : rep["checks"]) {
    CHECK(c["pass"] == true);
    saw_dvv = saw_dvv || c["name"] == "oracle.dvv";
  }
  CHECK(saw_dvv);

  auto m = build_model<cd>(2, {cd(-0.35, 0.15), cd(0.2, -0.1)});
  auto r = compute_r(m, canonical_frame(m), 8);
  r.R.coeffs[2](0, 1) += cd(0.05, 0.0);
  const auto bad = scratch() / "bad_r.json";
  { std::ofstream(bad) << serialize_r(r.R); }
  auto v = run("verify " + kA2 + " --r-file '" + bad.string() + "'");
  CHECK(v.code == 1);
  auto vr = json::parse(v.out);
  CHECK(vr["ok"] == false);
  bool unitarity_failed = false;
  for (auto& c : vr["checks"])
    if (c["name"] == "r.unitarity") unitarity_failed = c["pass"] == false;
  CHECK(unitarity_failed);

  r.R.coeffs[2](0, 1) -= cd(0.05, 0.0);
  { std::ofstream(bad, std::ios::trunc) << serialize_r(r.R); }
  CHECK(run("verify " + kA2 + " --r-file '" + bad.string() + "'").code == 0);
}

TEST_CASE("theorem2 and sweep reports") {
  auto t = run("theorem2 --model A2 --t=-0.1,0 --gmax 1 --nmax 2");
  REQUIRE(t.code == 0);
  auto tr = json::parse(t.out);
  CHECK(tr["ok"] == true);
  CHECK(tr["max_diff"].get<double>() < 1e-5);
  CHECK(tr["rows"].size() > 0);

  auto s = run("sweep --model A2 --gmax 1 --nmax 2 --sweep 3:7");
  REQUIRE(s.code == 0);
  auto sr = json::parse(s.out);
  CHECK(sr["points"].size() == 5);
  for (auto& row : sr["rows"]) {
    CHECK(row["converges"] == true);
    CHECK(row["deviation"].size() == 5);
  }
}

TEST_CASE("cleanup") { fs::remove_all(scratch()); }
