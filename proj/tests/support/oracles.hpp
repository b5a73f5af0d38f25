#pragma once

// Independent reference computations the tests check the library against.
// These deliberately use different formulas from the implementation (raw
// moments instead of centred sums, explicit enumeration instead of running
// extrema) and must stay free of lht:: internals beyond plain data access.

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace testsupport {

/// Univariate least-squares slope from the raw-moment normal equation
/// (n*Sxy - Sx*Sy) / (n*Sxx - Sx*Sx); zero when the denominator vanishes.
inline double ols_slope_oracle(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (n * sxy - sx * sy) / denom;
}

struct CountOracle {
  std::size_t n1 = 0, n2 = 0, n3 = 0, n4 = 0;
  double e = 0.0;
};

/// Exhaustive-count reference for the pure-side candidates over explicit
/// weighted-sum sets.
inline CountOracle count_oracle(std::span<const double> fs,
                                std::span<const std::uint8_t> is_target) {
  std::vector<double> tfs, nfs;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    (is_target[i] ? tfs : nfs).push_back(fs[i]);
  }
  const double min_tfs = *std::min_element(tfs.begin(), tfs.end());
  const double max_tfs = *std::max_element(tfs.begin(), tfs.end());
  const double min_nfs = *std::min_element(nfs.begin(), nfs.end());
  const double max_nfs = *std::max_element(nfs.begin(), nfs.end());

  CountOracle oracle;
  for (double v : tfs) {
    oracle.n1 += v < min_nfs;
    oracle.n2 += v > max_nfs;
  }
  for (double v : nfs) {
    oracle.n3 += v < min_tfs;
    oracle.n4 += v > max_tfs;
  }
  oracle.e = (min_nfs + max_nfs + min_tfs + max_tfs) / 4.0;
  return oracle;
}

}  // namespace testsupport
