#pragma once

// Batch jobs behind the CLI and the C API: a JSON job description in, a JSON
// report and a status out.
//
// Job fields (all optional except command and model):
//   command      "correlators" | "verify" | "sweep" | "theorem2"
//   model        {"type": "A<n>", "t": [[re, im], ...]}   t defaults to 0
//   gmax, nmax   bounds on genus and number of insertions
//   order        R truncation K, 0 = automatic
//   tol          pass threshold (verify, sweep, theorem2)
//   cache        directory for R matrices, "" = none
//   caustic      correlators: use the contour recursion (A2)
//   sweep        {"direction": [[re, im], ...], "emin": 3, "emax": 10}
//   r_file       verify: check this R instead of computing one

#include <functional>
#include <string>

#include <json.hpp>

namespace ancestrec {

enum class JobStatus { ok = 0, verify_failed = 1, invalid = 2, numeric = 3 };

struct JobResult {
  JobStatus status = JobStatus::ok;
  nlohmann::json report;  // null unless a report was produced
  std::string message;    // for invalid and numeric
};

using LogFn = std::function<void(const std::string&)>;

/// Never throws; bad input gives JobStatus::invalid.
JobResult run_job(const nlohmann::json& job, const LogFn& log = {});

/// Report text as written by the CLI.
std::string report_text(const nlohmann::json& report);

}  // namespace ancestrec
