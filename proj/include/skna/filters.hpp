#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "series.hpp"

namespace skna {

enum class FilterKind { lowpass, highpass, bandpass, notch };

inline const char* to_string(FilterKind k) {
  switch (k) {
    case FilterKind::lowpass: return "lowpass";
    case FilterKind::highpass: return "highpass";
    case FilterKind::bandpass: return "bandpass";
    case FilterKind::notch: return "notch";
  }
  return "?";
}

// One design request.  `edges_hz[0]` is the cutoff for lowpass/highpass and
// the center for notch; bandpass uses both edges.  `order` is the analog
// prototype order (a bandpass of prototype order n has 2n poles).
struct FilterSpec {
  FilterKind kind = FilterKind::bandpass;
  std::array<double, 2> edges_hz{0.0, 0.0};
  int order = 4;
  double notch_q = 30.0;
};

struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;  // denominator, a0 normalized to 1
};

// Second-order-sections cascade tied to the rate it was designed for.
struct Sos {
  std::vector<Biquad> sections;
  double rate = 0.0;

  std::size_t order() const noexcept { return sections.size() * 2; }
};

namespace detail {

using cd = std::complex<double>;

// Butterworth prototype poles on the unit circle, left half plane.
inline std::vector<cd> butterworth_poles(int n) {
  std::vector<cd> poles;
  poles.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    double theta = std::numbers::pi * (2.0 * k + n - 1.0) / (2.0 * n);
    poles.emplace_back(std::cos(theta), std::sin(theta));
  }
  return poles;
}

struct AnalogDesign {
  std::vector<cd> zeros;  // finite zeros only
  std::vector<cd> poles;
  int zeros_at_infinity = 0;
};

inline cd bilinear_map(cd s, double fs2) { return (fs2 + s) / (fs2 - s); }

// Pairs a list of roots (closed under conjugation) into conjugate pairs plus
// at most one trailing real root per unpaired real.  Roots with tiny
// imaginary parts are flattened to real first.
inline std::vector<std::array<cd, 2>> pair_roots(std::vector<cd> roots, bool& has_lone,
                                                 cd& lone) {
  for (auto& r : roots) {
    if (std::abs(r.imag()) < 1e-12 * std::max(1.0, std::abs(r.real()))) r = cd(r.real(), 0.0);
  }
  std::vector<cd> upper, reals;
  for (const auto& r : roots) {
    if (r.imag() > 0.0) {
      upper.push_back(r);
    } else if (r.imag() == 0.0) {
      reals.push_back(r);
    }
  }
  std::sort(upper.begin(), upper.end(), [](cd a, cd b) {
    if (a.imag() != b.imag()) return a.imag() > b.imag();
    return a.real() < b.real();
  });
  std::sort(reals.begin(), reals.end(), [](cd a, cd b) { return a.real() < b.real(); });

  std::vector<std::array<cd, 2>> pairs;
  for (const auto& r : upper) pairs.push_back({r, std::conj(r)});
  std::size_t i = 0;
  for (; i + 1 < reals.size(); i += 2) pairs.push_back({reals[i], reals[i + 1]});
  has_lone = (i < reals.size());
  if (has_lone) lone = reals[i];
  return pairs;
}

inline Biquad biquad_from_digital(const std::array<cd, 2>& poles, const std::array<cd, 2>& zeros,
                                  int n_zeros) {
  Biquad q;
  // Denominator (z - p1)(z - p2) = 1 - (p1+p2) z^-1 + p1 p2 z^-2.
  q.a1 = -(poles[0] + poles[1]).real();
  q.a2 = (poles[0] * poles[1]).real();
  if (n_zeros == 2) {
    q.b0 = 1.0;
    q.b1 = -(zeros[0] + zeros[1]).real();
    q.b2 = (zeros[0] * zeros[1]).real();
  } else if (n_zeros == 1) {
    q.b0 = 1.0;
    q.b1 = -zeros[0].real();
    q.b2 = 0.0;
  } else {
    q.b0 = 1.0;
    q.b1 = 0.0;
    q.b2 = 0.0;
  }
  return q;
}

inline cd biquad_response(const Biquad& q, double omega) {
  cd e1 = std::polar(1.0, -omega);
  cd e2 = std::polar(1.0, -2.0 * omega);
  return (q.b0 + q.b1 * e1 + q.b2 * e2) / (1.0 + q.a1 * e1 + q.a2 * e2);
}

}  // namespace detail

inline std::complex<double> sos_response(const Sos& sos, double freq_hz) {
  double omega = 2.0 * std::numbers::pi * freq_hz / sos.rate;
  std::complex<double> h{1.0, 0.0};
  for (const auto& q : sos.sections) h *= detail::biquad_response(q, omega);
  return h;
}

// Designs a digital Butterworth (or RBJ notch) as second-order sections via
// the bilinear transform with frequency prewarping.
inline Sos design_filter(const FilterSpec& spec, double rate) {
  using detail::cd;
  if (!(rate > 0.0)) throw ConfigError("design_filter: rate must be positive");
  const double nyq = rate / 2.0;
  const double pi = std::numbers::pi;

  if (spec.kind == FilterKind::notch) {
    const double f0 = spec.edges_hz[0];
    if (!(f0 > 0.0 && f0 < nyq)) {
      throw ConfigError("design_filter: notch frequency must lie in (0, Nyquist)");
    }
    if (!(spec.notch_q > 0.0)) throw ConfigError("design_filter: notch Q must be positive");
    const double w0 = 2.0 * pi * f0 / rate;
    const double alpha = std::sin(w0) / (2.0 * spec.notch_q);
    const double a0 = 1.0 + alpha;
    Biquad q;
    q.b0 = 1.0 / a0;
    q.b1 = -2.0 * std::cos(w0) / a0;
    q.b2 = 1.0 / a0;
    q.a1 = -2.0 * std::cos(w0) / a0;
    q.a2 = (1.0 - alpha) / a0;
    Sos sos;
    sos.sections.push_back(q);
    sos.rate = rate;
    return sos;
  }

  if (spec.order < 1 || spec.order > 12) {
    throw ConfigError("design_filter: prototype order must be in [1, 12]");
  }

  const double fs2 = 2.0 * rate;
  auto prewarp = [&](double f) { return fs2 * std::tan(pi * f / rate); };

  detail::AnalogDesign an;
  auto proto = detail::butterworth_poles(spec.order);
  double ref_freq_hz = 0.0;  // digital frequency where gain is normalized to 1

  switch (spec.kind) {
    case FilterKind::lowpass: {
      const double fc = spec.edges_hz[0];
      if (!(fc > 0.0 && fc < nyq)) {
        throw ConfigError("design_filter: lowpass cutoff must lie in (0, Nyquist)");
      }
      const double wc = prewarp(fc);
      for (auto p : proto) an.poles.push_back(p * wc);
      an.zeros_at_infinity = spec.order;
      ref_freq_hz = 0.0;
      break;
    }
    case FilterKind::highpass: {
      const double fc = spec.edges_hz[0];
      if (!(fc > 0.0 && fc < nyq)) {
        throw ConfigError("design_filter: highpass cutoff must lie in (0, Nyquist)");
      }
      const double wc = prewarp(fc);
      for (auto p : proto) {
        an.poles.push_back(wc / p);
        an.zeros.push_back(cd(0.0, 0.0));
      }
      ref_freq_hz = nyq;  // normalize at z = -1
      break;
    }
    case FilterKind::bandpass: {
      const double f1 = spec.edges_hz[0], f2 = spec.edges_hz[1];
      if (!(f1 > 0.0 && f2 > f1 && f2 < nyq)) {
        throw ConfigError("design_filter: bandpass edges must satisfy 0 < low < high < Nyquist");
      }
      const double w1 = prewarp(f1), w2 = prewarp(f2);
      const double bw = w2 - w1;
      const double w0 = std::sqrt(w1 * w2);
      for (auto p : proto) {
        // s' -> (s^2 + w0^2)/(bw*s): each prototype pole becomes the two
        // roots of s^2 - bw*p*s + w0^2 = 0.
        cd half = bw * p / 2.0;
        cd disc = std::sqrt(half * half - cd(w0 * w0, 0.0));
        an.poles.push_back(half + disc);
        an.poles.push_back(half - disc);
        an.zeros.push_back(cd(0.0, 0.0));
      }
      an.zeros_at_infinity = spec.order;
      // The analog center maps to this digital frequency under the bilinear
      // transform; gain is pinned to 1 there.
      ref_freq_hz = std::atan(w0 / fs2) * rate / pi;
      break;
    }
    case FilterKind::notch:
      break;  // handled above
  }

  // Bilinear transform: finite roots map through (fs2 + s)/(fs2 - s); zeros
  // at infinity land on z = -1.
  std::vector<cd> zpoles, zzeros;
  for (auto p : an.poles) zpoles.push_back(detail::bilinear_map(p, fs2));
  for (auto z : an.zeros) zzeros.push_back(detail::bilinear_map(z, fs2));
  for (int i = 0; i < an.zeros_at_infinity; ++i) zzeros.push_back(cd(-1.0, 0.0));

  for (auto p : zpoles) {
    if (std::abs(p) >= 1.0 - 1e-10) {
      throw ConfigError("design_filter: design produced a pole on/outside the unit circle");
    }
  }

  bool lone_pole = false, lone_zero = false;
  cd lp{}, lz{};
  auto pole_pairs = detail::pair_roots(zpoles, lone_pole, lp);
  auto zero_pairs = detail::pair_roots(zzeros, lone_zero, lz);

  Sos sos;
  sos.rate = rate;
  std::size_t zi = 0;
  for (std::size_t i = 0; i < pole_pairs.size(); ++i) {
    std::array<cd, 2> zs{cd(0, 0), cd(0, 0)};
    int nz = 0;
    if (zi < zero_pairs.size()) {
      zs = zero_pairs[zi++];
      nz = 2;
    }
    sos.sections.push_back(detail::biquad_from_digital(pole_pairs[i], zs, nz));
  }
  if (lone_pole) {
    std::array<cd, 2> ps{lp, cd(0.0, 0.0)};
    std::array<cd, 2> zs{lone_zero ? lz : cd(0, 0), cd(0, 0)};
    Biquad q;
    q.a1 = -lp.real();
    q.a2 = 0.0;
    q.b0 = 1.0;
    q.b1 = lone_zero ? -lz.real() : 0.0;
    q.b2 = 0.0;
    (void)ps;
    sos.sections.push_back(q);
  }

  // Normalize overall gain at the reference frequency.
  double mag = std::abs(sos_response(sos, ref_freq_hz));
  if (!(mag > 0.0) || !std::isfinite(mag)) {
    throw ConfigError("design_filter: cannot normalize gain");
  }
  const double g = 1.0 / mag;
  sos.sections.front().b0 *= g;
  sos.sections.front().b1 *= g;
  sos.sections.front().b2 *= g;
  return sos;
}

namespace detail {

// Steady-state DF2T state for a unit-amplitude constant input; used to
// initialize filtfilt so constant extensions produce no start-up transient.
inline std::array<double, 2> biquad_steady_state(const Biquad& q) {
  const double den = 1.0 + q.a1 + q.a2;
  const double g = (q.b0 + q.b1 + q.b2) / (den != 0.0 ? den : 1e-300);
  const double s2 = q.b2 - q.a2 * g;
  const double s1 = q.b1 - q.a1 * g + s2;
  return {s1, s2};
}

inline double biquad_dc_gain(const Biquad& q) {
  const double den = 1.0 + q.a1 + q.a2;
  return (q.b0 + q.b1 + q.b2) / (den != 0.0 ? den : 1e-300);
}

// One cascade pass over x (in place), DF2T, with per-section initial state
// scaled by `x0` (the value the extension converges to on the far side).
inline void sosfilt_inplace(const Sos& sos, std::vector<double>& x, double x0) {
  double cumulative_dc = 1.0;
  for (const auto& q : sos.sections) {
    auto ss = biquad_steady_state(q);
    double s1 = ss[0] * cumulative_dc * x0;
    double s2 = ss[1] * cumulative_dc * x0;
    const double b0 = q.b0, b1 = q.b1, b2 = q.b2, a1 = q.a1, a2 = q.a2;
    double* p = x.data();
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double in = p[i];
      const double out = b0 * in + s1;
      s1 = b1 * in - a1 * out + s2;
      s2 = b2 * in - a2 * out;
      p[i] = out;
    }
    cumulative_dc *= biquad_dc_gain(q);
  }
}

}  // namespace detail

// Zero-phase filtering: forward pass, reverse, forward again, reverse, with
// odd (point-reflected) edge extensions and steady-state initial conditions.
// Doubles the magnitude response (|H|^2) and cancels the phase exactly.
inline void filtfilt_inplace(const Sos& sos, std::vector<double>& x) {
  if (sos.sections.empty()) throw ConfigError("filtfilt: empty filter");
  const std::size_t padlen = 3 * (2 * sos.sections.size() + 1);
  if (x.size() <= padlen) {
    throw DataError("filtfilt: input too short for edge padding (need > " +
                    std::to_string(padlen) + " samples)");
  }
  const std::size_t n = x.size();
  std::vector<double> ext(n + 2 * padlen);
  // Odd extension: reflect about the end samples.
  for (std::size_t i = 0; i < padlen; ++i) {
    ext[i] = 2.0 * x[0] - x[padlen - i];
    ext[padlen + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];
  }
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(padlen));

  detail::sosfilt_inplace(sos, ext, ext.front());
  std::reverse(ext.begin(), ext.end());
  detail::sosfilt_inplace(sos, ext, ext.front());
  std::reverse(ext.begin(), ext.end());

  std::copy(ext.begin() + static_cast<std::ptrdiff_t>(padlen),
            ext.begin() + static_cast<std::ptrdiff_t>(padlen + n), x.begin());
}

inline SampleSeries filtfilt(const Sos& sos, const SampleSeries& x) {
  if (x.rate != sos.rate) {
    throw ConfigError("filtfilt: series rate does not match filter design rate");
  }
  SampleSeries out = x;
  filtfilt_inplace(sos, out.samples);
  return out;
}

}  // namespace skna
