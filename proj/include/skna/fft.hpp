#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "errors.hpp"

namespace skna::fftops {

// FFTW planning is not thread safe; execution of a ready plan is.
inline std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

namespace detail {

inline void transform(std::vector<std::complex<double>>& buf, int sign) {
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(buf.size()), data, data, sign, FFTW_ESTIMATE);
  }
  if (!plan) throw Error("fft: planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace detail

inline std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x) {
  if (x.empty()) throw DataError("fft: empty input");
  std::vector<std::complex<double>> buf(x.begin(), x.end());
  detail::transform(buf, FFTW_FORWARD);
  return buf;
}

// Inverse transform scaled by 1/N (so ifft(fft(x)) == x).
inline std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> x) {
  if (x.empty()) throw DataError("ifft: empty input");
  std::vector<std::complex<double>> buf(x.begin(), x.end());
  detail::transform(buf, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(buf.size());
  for (auto& v : buf) v *= scale;
  return buf;
}

// Analytic signal: one-sided spectrum (positive frequencies doubled, negative
// zeroed, DC and Nyquist kept), back-transformed.
inline std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw DataError("analytic_signal: input too short");
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = {x[i], 0.0};
  detail::transform(buf, FFTW_FORWARD);
  // DC stays; strictly positive bins double; for even n the Nyquist bin stays;
  // negative-frequency bins are zeroed.
  const std::size_t pos_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  for (std::size_t i = 1; i < pos_end; ++i) buf[i] *= 2.0;
  for (std::size_t i = (n % 2 == 0) ? pos_end + 1 : pos_end; i < n; ++i) buf[i] = {0.0, 0.0};
  detail::transform(buf, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : buf) v *= scale;
  return buf;
}

}  // namespace skna::fftops
