// ancestrec: command line front end over the C interface.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ancestrec/ancestrec.h"

using json = nlohmann::json;

namespace {

constexpr int kInvalid = AR_INVALID;

struct Options {
  std::string model;
  std::string t;
  std::optional<int> gmax, nmax, order;
  std::optional<double> tol;
  std::string cache;
  std::string sweep;
  std::string dir;
  bool caustic = false;
  std::string report;
  std::string r_file;
};

struct BadArg : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "1.5", "-2i", "0.3-0.1i", "1e-3+2e-2i"
json parse_complex(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
  if (s.empty()) throw BadArg("empty number");
  const char* p = s.c_str();
  char* end = nullptr;
  if (s.back() != 'i') {
    const double re = std::strtod(p, &end);
    if (*end) throw BadArg("bad number \"" + s + "\"");
    return json::array({re, 0.0});
  }
  std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not part of an exponent
  std::size_t cut = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;)
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      cut = k;
      break;
    }
  double re = 0.0, im = 0.0;
  std::string ims = cut == std::string::npos ? body : body.substr(cut);
  if (cut != std::string::npos) {
    const std::string res = body.substr(0, cut);
    re = std::strtod(res.c_str(), &end);
    if (*end) throw BadArg("bad number \"" + s + "\"");
  }
  if (ims.empty() || ims == "+") im = 1.0;
  else if (ims == "-") im = -1.0;
  else {
    im = std::strtod(ims.c_str(), &end);
    if (*end) throw BadArg("bad number \"" + s + "\"");
  }
  return json::array({re, im});
}

// JSON array, or comma separated numbers
json parse_list(const std::string& text) {
  if (!text.empty() && text.front() == '[') {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_array()) throw BadArg("bad list \"" + text + "\"");
    return j;
  }
  json out = json::array();
  std::size_t a = 0;
  while (a <= text.size()) {
    const std::size_t b = text.find(',', a);
    out.push_back(parse_complex(text.substr(a, b == std::string::npos ? std::string::npos : b - a)));
    if (b == std::string::npos) break;
    a = b + 1;
  }
  return out;
}

json make_job(const std::string& command, const Options& o) {
  json job = {{"command", command}};
  json model = {{"type", o.model}};
  if (!o.t.empty()) model["t"] = parse_list(o.t);
  job["model"] = model;
  if (o.gmax) job["gmax"] = *o.gmax;
  if (o.nmax) job["nmax"] = *o.nmax;
  if (o.order) job["order"] = *o.order;
  if (o.tol) job["tol"] = *o.tol;
  // explicit flag first, then the environment
  std::string cache = o.cache;
  if (cache.empty())
    if (const char* e = std::getenv("ANCESTREC_CACHE")) cache = e;
  if (!cache.empty()) job["cache"] = cache;
  if (o.caustic) job["caustic"] = true;
  if (!o.r_file.empty()) job["r_file"] = o.r_file;
  if (!o.sweep.empty() || !o.dir.empty()) {
    json sw = json::object();
    if (!o.sweep.empty()) {
      const auto colon = o.sweep.find(':');
      if (colon == std::string::npos) {
        // a single exponent is a list of length one
        sw["emin"] = std::stoi(o.sweep);
        sw["emax"] = std::stoi(o.sweep);
      } else {
        sw["emin"] = std::stoi(o.sweep.substr(0, colon));
        sw["emax"] = std::stoi(o.sweep.substr(colon + 1));
      }
    }
    if (!o.dir.empty()) sw["direction"] = parse_list(o.dir);
    job["sweep"] = sw;
  }
  return job;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--model", o.model, "A<n>, e.g. A2")->required();
  sub->add_option("--t", o.t, "point: comma separated (0.1-0.2i,0.3) or a JSON list of [re,im]");
  sub->add_option("--gmax", o.gmax, "largest genus");
  sub->add_option("--nmax", o.nmax, "largest number of insertions");
  sub->add_option("--tol", o.tol, "pass threshold");
  sub->add_option("--cache", o.cache, "directory for cached R matrices (default $ANCESTREC_CACHE)");
  sub->add_option("--report", o.report, "write the report here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ancestor correlators of A_n Frobenius manifolds by local topological recursion"};
  app.set_version_flag("--version", std::string(ar_version()));
  app.require_subcommand(1);
  Options o;

  auto* cor = app.add_subcommand("correlators", "table of correlators at a point");
  add_common(cor, o);
  cor->add_option("--order", o.order, "R truncation (default: automatic)");
  cor->add_flag("--caustic", o.caustic, "contour recursion, valid on the A2 caustic");

  auto* ver = app.add_subcommand("verify", "invariant checks and oracle comparisons");
  add_common(ver, o);
  ver->add_option("--order", o.order, "R truncation (default: automatic)");
  ver->add_option("--r-file", o.r_file, "check this R (JSON) instead of computing one");

  auto* swp = app.add_subcommand("sweep", "approach a caustic along t_c + eps dir");
  add_common(swp, o);
  swp->add_option("--sweep", o.sweep, "eps = 2^-emin .. 2^-emax as emin:emax (default 3:10)");
  swp->add_option("--dir", o.dir, "direction (default -1,0)");

  auto* th2 = app.add_subcommand("theorem2", "contour integral against the residue sum");
  add_common(th2, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalid;
  }

  std::string command;
  for (auto* s : {cor, ver, swp, th2})
    if (s->parsed()) command = s->get_name();

  json job;
  try {
    job = make_job(command, o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ancestrec: error: %s\n", e.what());
    return kInvalid;
  }

  char* report = nullptr;
  const ar_status st = ar_run_job(job.dump().c_str(), &report);
  if (st == AR_INVALID || st == AR_NUMERIC)
    std::fprintf(stderr, "ancestrec: error: %s\n", ar_last_error());
  if (report) {
    if (o.report.empty()) {
      std::fputs(report, stdout);
    } else {
      std::ofstream out(o.report, std::ios::binary | std::ios::trunc);
      out << report;
      if (!out.flush()) {
        std::fprintf(stderr, "ancestrec: error: cannot write %s\n", o.report.c_str());
        ar_string_free(report);
        return AR_NUMERIC;
      }
    }
    ar_string_free(report);
  }
  if (st == AR_VERIFY_FAILED) std::fprintf(stderr, "ancestrec: %s: checks failed\n", command.c_str());
  return static_cast<int>(st);
}
