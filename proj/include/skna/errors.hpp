#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skna {

// Common base so callers can catch anything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents: bad header, wrong magic, unparsable field.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input with unusable values (NaN samples, ragged rows,
// out-of-range annotation windows).  Carries the offending sample/row index
// when one is known; -1 otherwise.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what, std::ptrdiff_t index = -1)
      : Error(what), index_(index) {}
  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  std::ptrdiff_t index_;
};

// Parameters that cannot be applied: band edges beyond Nyquist, unsupported
// rate grids, irrational resampling ratios, inconsistent configs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A statistical model that cannot be fitted on the given observations.
class ModelError : public Error {
 public:
  using Error::Error;
};

// A segment that falls outside every analysis category (e.g. a pain trial
// with VAS = 0, which is neither low-pain nor moderate/severe-pain).
class ExcludedSegment : public Error {
 public:
  using Error::Error;
};

}  // namespace skna
