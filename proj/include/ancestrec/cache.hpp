#pragma once

// Content-addressed store for R matrices. One JSON file per
// (n, t, K, branch, code version); writes go through a temporary file and a
// rename, so two processes writing the same entry leave the same bytes.

#include <complex>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include "ancestrec/recursion.hpp"
#include "ancestrec/version.hpp"

namespace ancestrec {

using cd = std::complex<double>;

/// R coefficients as JSON text: {"schema":1,"R":[[[[re,im],..] rows] per order]}.
std::string serialize_r(const MatrixSeries<cd>& R);
/// Throws std::invalid_argument on malformed text.
MatrixSeries<cd> parse_r(const std::string& text);

class RCache : public RSource {
 public:
  using Warn = std::function<void(const std::string&)>;

  explicit RCache(std::string dir, std::string version = kVersion, Warn warn = {});

  const std::string& dir() const { return dir_; }
  std::string key(const AnModel<cd>& m, const std::vector<int>& branch, int K) const;
  std::string path(const AnModel<cd>& m, const std::vector<int>& branch, int K) const;

  /// Nothing for a miss or an entry of another version; a warning and nothing
  /// for an unreadable entry or one whose residuals exceed tol.
  std::optional<RMatrix<cd>> load(const AnModel<cd>& m, const CanonicalFrame<cd>& f, int K, double tol);
  void store(const AnModel<cd>& m, const CanonicalFrame<cd>& f, const RMatrix<cd>& r);

  RMatrix<cd> r_matrix(const AnModel<cd>& m, const CanonicalFrame<cd>& f, int K, double tol) override;

  int hits() const { return hits_; }
  int misses() const { return misses_; }

 private:
  void warn(const std::string& msg) const;

  std::string dir_;
  std::string version_;
  Warn warn_;
  std::mutex mu_;
  int hits_ = 0, misses_ = 0;
};

/// ANCESTREC_CACHE if set, else empty.
std::string cache_dir_from_env();

}  // namespace ancestrec
