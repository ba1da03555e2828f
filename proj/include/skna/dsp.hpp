#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "series.hpp"

namespace skna {

struct Fraction {
  long long num = 0;
  long long den = 1;
};

// Best rational approximation p/q with q <= max_den (continued fractions).
// Throws ConfigError when no approximation reaches `rel_tol`.
inline Fraction approximate_ratio(double ratio, long long max_den = 1000,
                                  double rel_tol = 1e-9) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw ConfigError("approximate_ratio: ratio must be positive and finite");
  }
  // Walk the continued-fraction convergents of `ratio`.
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = ratio;
  for (int iter = 0; iter < 64; ++iter) {
    double af = std::floor(x);
    if (af > 9e17) break;
    long long a = static_cast<long long>(af);
    long long p2 = a * p1 + p0;
    long long q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double frac = x - af;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  if (q1 == 0 || p1 == 0) {
    throw ConfigError("approximate_ratio: ratio out of representable range");
  }
  double err = std::abs(static_cast<double>(p1) / static_cast<double>(q1) - ratio) / ratio;
  if (err > rel_tol) {
    throw ConfigError("approximate_ratio: no rational p/q with q <= " +
                      std::to_string(max_den) + " approximates the rate ratio");
  }
  return {p1, q1};
}

namespace detail {

// Kaiser-windowed lowpass prototype for polyphase resampling, designed in the
// upsampled domain (rate * p).  66 dB stopband; passband edge 0.55 * f_cut,
// stopband edge at f_cut = min(src, dst) / 2.
inline std::vector<double> kaiser_lowpass(double fs_up, double f_cut) {
  const double atten_db = 66.0;
  const double beta = 0.1102 * (atten_db - 8.7);
  const double pass_edge = 0.55 * f_cut;
  const double stop_edge = f_cut;
  const double delta_omega = 2.0 * std::numbers::pi * (stop_edge - pass_edge) / fs_up;
  std::size_t taps = static_cast<std::size_t>(
      std::ceil((atten_db - 7.95) / (2.285 * delta_omega))) + 1;
  if (taps % 2 == 0) ++taps;  // odd length => integer group delay
  const double fc = 0.5 * (pass_edge + stop_edge);
  const double omega_c = 2.0 * std::numbers::pi * fc / fs_up;
  const double mid = static_cast<double>(taps - 1) / 2.0;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  std::vector<double> h(taps);
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i) - mid;
    const double x = omega_c * t;
    const double sinc = (t == 0.0) ? 1.0 : std::sin(x) / x;
    const double r = t / mid;
    const double win = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r)));
    h[i] = (omega_c / std::numbers::pi) * sinc * win / i0_beta;
  }
  return h;
}

}  // namespace detail

// Polyphase rational resampler.  Anti-alias/anti-image filtered at the lower
// of the two Nyquist frequencies; zero-padded at the edges; output length is
// round(n * target / source).
inline SampleSeries resample(const SampleSeries& x, double target_rate) {
  if (!(x.rate > 0.0)) throw ConfigError("resample: source rate must be positive");
  if (!(target_rate > 0.0)) throw ConfigError("resample: target rate must be positive");
  if (x.empty()) throw DataError("resample: empty input");
  if (target_rate == x.rate) return x;

  const Fraction r = approximate_ratio(target_rate / x.rate);
  const long long p = r.num, q = r.den;
  const double fs_up = x.rate * static_cast<double>(p);
  const double f_cut = std::min(x.rate, target_rate) / 2.0;
  std::vector<double> h = detail::kaiser_lowpass(fs_up, f_cut);
  const long long taps = static_cast<long long>(h.size());
  const long long mid = (taps - 1) / 2;

  const long long n = static_cast<long long>(x.size());
  const long long out_len = static_cast<long long>(std::llround(
      static_cast<long double>(n) * static_cast<long double>(p) / static_cast<long double>(q)));

  // Polyphase split: hp[phase][k] = p * h[k*p + phase].  Output sample m taps
  // input at t = (m*q + mid - j)/p for h-index j; grouping by j mod p turns
  // the inner sum into a contiguous dot product over descending input samples.
  const std::size_t per_phase = static_cast<std::size_t>((taps + p - 1) / p);
  std::vector<std::vector<double>> hp(static_cast<std::size_t>(p));
  for (long long phase = 0; phase < p; ++phase) {
    auto& v = hp[static_cast<std::size_t>(phase)];
    v.assign(per_phase, 0.0);
    for (long long k = 0;; ++k) {
      const long long j = k * p + phase;
      if (j >= taps) break;
      v[static_cast<std::size_t>(k)] = static_cast<double>(p) * h[static_cast<std::size_t>(j)];
    }
  }

  SampleSeries out;
  out.rate = target_rate;
  out.samples.resize(static_cast<std::size_t>(std::max<long long>(out_len, 0)));
  const double* xs = x.samples.data();
  for (long long m = 0; m < out_len; ++m) {
    const long long i0 = m * q + mid;       // upsampled-domain tap anchor
    const long long t_hi = i0 / p;          // input index hit by h[phase]
    const long long phase = i0 - t_hi * p;
    const auto& hv = hp[static_cast<std::size_t>(phase)];
    // y[m] = sum_k hv[k] * x[t_hi - k], clipped to the valid input range.
    const long long k_begin = std::max<long long>(0, t_hi - (n - 1));
    const long long k_end = std::min<long long>(static_cast<long long>(hv.size()) - 1, t_hi);
    double acc = 0.0;
    const double* hk = hv.data();
    for (long long k = k_begin; k <= k_end; ++k) acc += hk[k] * xs[t_hi - k];
    out.samples[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

// Full-wave rectification; rate-preserving.
inline SampleSeries rectify(const SampleSeries& x) {
  SampleSeries out = x;
  for (auto& v : out.samples) v = std::abs(v);
  return out;
}

// Centered moving average over round(window_s * rate) samples, shrinking the
// window at the edges (every output averages only real samples).  Prefix sums
// in extended precision keep the result independent of position.
inline SampleSeries moving_average(const SampleSeries& x, double window_s) {
  if (!(x.rate > 0.0)) throw ConfigError("moving_average: rate must be positive");
  if (x.empty()) throw DataError("moving_average: empty input");
  if (!(window_s > 0.0)) throw ConfigError("moving_average: window must be positive");
  const long long w = std::llround(window_s * x.rate);
  if (w < 1) {
    throw ConfigError("moving_average: window shorter than one sample at this rate");
  }
  const long long n = static_cast<long long>(x.size());
  const long long left = (w - 1) / 2;
  const long long right = w / 2;

  std::vector<long double> prefix(static_cast<std::size_t>(n) + 1, 0.0L);
  for (long long i = 0; i < n; ++i) {
    prefix[static_cast<std::size_t>(i + 1)] =
        prefix[static_cast<std::size_t>(i)] + static_cast<long double>(x.samples[static_cast<std::size_t>(i)]);
  }
  SampleSeries out;
  out.rate = x.rate;
  out.samples.resize(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const long long lo = std::max<long long>(0, i - left);
    const long long hi = std::min<long long>(n, i + right + 1);
    const long double sum = prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)];
    out.samples[static_cast<std::size_t>(i)] =
        static_cast<double>(sum / static_cast<long double>(hi - lo));
  }
  return out;
}

// Magnitude of the analytic signal (Hilbert envelope).
inline SampleSeries analytic_amplitude(const SampleSeries& x) {
  if (x.size() < 16) throw DataError("analytic_amplitude: input too short");
  auto a = fftops::analytic_signal(x.samples);
  SampleSeries out;
  out.rate = x.rate;
  out.samples.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.samples[i] = std::abs(a[i]);
  return out;
}

}  // namespace skna
