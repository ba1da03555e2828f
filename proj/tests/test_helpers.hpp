#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "skna/fft.hpp"
#include "skna/series.hpp"
#include "skna/synth.hpp"

namespace testutil {

inline skna::SampleSeries sine(double freq_hz, double rate, double duration_s,
                               double amplitude = 1.0, double phase = 0.0) {
  const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * rate));
  skna::SampleSeries s;
  s.rate = rate;
  s.samples.resize(n);
  const double w = 2.0 * std::numbers::pi * freq_hz / rate;
  for (std::size_t i = 0; i < n; ++i) {
    s.samples[i] = amplitude * std::sin(w * static_cast<double>(i) + phase);
  }
  return s;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double rms(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Middle portion of a series (default central 80%), away from filter edges.
inline std::vector<double> interior(const std::vector<double>& v, double frac = 0.1) {
  const std::size_t skip = static_cast<std::size_t>(static_cast<double>(v.size()) * frac);
  if (v.size() <= 2 * skip) return {};
  return {v.begin() + static_cast<std::ptrdiff_t>(skip),
          v.end() - static_cast<std::ptrdiff_t>(skip)};
}

// Total spectral energy of x inside [lo, hi] Hz (one-sided), via the FFT.
inline double band_energy(const std::vector<double>& x, double rate, double lo, double hi) {
  std::vector<std::complex<double>> buf(x.begin(), x.end());
  auto spec = skna::fftops::fft(buf);
  const std::size_t n = x.size();
  const double df = rate / static_cast<double>(n);
  double e = 0.0;
  for (std::size_t b = 0; b <= n / 2; ++b) {
    const double f = static_cast<double>(b) * df;
    if (f >= lo && f <= hi) e += std::norm(spec[b]);
  }
  return e;
}

inline double pearson_r(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Unique scratch directory under the build tree; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("skna_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace testutil
