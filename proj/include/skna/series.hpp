#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace skna {

// A single evenly sampled channel.  `rate` is in samples per second.
struct SampleSeries {
  std::vector<double> samples;
  double rate = 0.0;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration_s() const noexcept {
    return rate > 0.0 ? static_cast<double>(samples.size()) / rate : 0.0;
  }
};

// Throws DataError (with the first offending index) on NaN or infinity.
inline void require_finite(std::span<const double> x, const std::string& what) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw DataError(what + ": non-finite sample", static_cast<std::ptrdiff_t>(i));
    }
  }
}

inline void require_valid(const SampleSeries& s, const std::string& what) {
  if (!(s.rate > 0.0) || !std::isfinite(s.rate)) {
    throw ConfigError(what + ": sample rate must be positive");
  }
  require_finite(s.samples, what);
}

}  // namespace skna
