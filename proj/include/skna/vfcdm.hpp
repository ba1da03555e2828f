#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dsp.hpp"
#include "errors.hpp"
#include "filters.hpp"
#include "series.hpp"

namespace skna {

// Variable-frequency complex demodulation.  Component k owns the band
// ((2k-2)*Fw, 2k*Fw) with carrier (2k-1)*Fw, Fw = rate / 50.
//
// Pass 1 demodulates by each fixed carrier and lowpasses at Fw.  Zero-phase
// filtering squares the Butterworth magnitude, so adjacent components cross
// at exactly 0.5 amplitude on their shared band edge and the coherent sum of
// all resynthesized components reproduces in-band content to within a few
// percent; reconstruction therefore uses the pass-1 band contents.
//
// Pass 2 re-demodulates the signal along each component's estimated
// instantaneous frequency with the narrower Fw/2 lowpass, refining the
// frequency track beyond the fixed grid's resolution.
struct VfcdmConfig {
  int n_components = 12;
  double rate = 0.0;
  double half_bandwidth_hz = 0.0;                // Fw
  std::vector<double> center_frequencies_hz;     // (2k-1) * Fw, k = 1..n
  double first_pass_lpf_hz = 0.0;                // Fw
  double second_pass_lpf_hz = 0.0;               // Fw / 2 (frequency refinement)
  double freq_clamp_hz = 0.0;                    // max carrier deviation, Fw / 2
  double freq_smoothing_s = 0.05;
  int lpf_order = 4;

  static VfcdmConfig for_rate(double rate, int n_components = 12) {
    if (!(rate > 0.0)) throw ConfigError("VfcdmConfig: rate must be positive");
    if (n_components < 1) throw ConfigError("VfcdmConfig: need at least one component");
    VfcdmConfig cfg;
    cfg.rate = rate;
    cfg.n_components = n_components;
    cfg.half_bandwidth_hz = rate / 50.0;
    cfg.first_pass_lpf_hz = cfg.half_bandwidth_hz;
    cfg.second_pass_lpf_hz = cfg.half_bandwidth_hz / 2.0;
    cfg.freq_clamp_hz = cfg.half_bandwidth_hz / 2.0;
    for (int k = 1; k <= n_components; ++k) {
      cfg.center_frequencies_hz.push_back((2.0 * k - 1.0) * cfg.half_bandwidth_hz);
    }
    cfg.validate();
    return cfg;
  }

  // Band owned by component k (1-based): ((2k-2)*Fw, 2k*Fw).
  std::pair<double, double> band(int k) const {
    if (k < 1 || k > n_components) throw ConfigError("VfcdmConfig: component index out of range");
    return {(2.0 * k - 2.0) * half_bandwidth_hz, 2.0 * k * half_bandwidth_hz};
  }

  void validate() const {
    if (!(rate > 0.0)) throw ConfigError("VfcdmConfig: rate must be positive");
    if (n_components < 1 || static_cast<int>(center_frequencies_hz.size()) != n_components) {
      throw ConfigError("VfcdmConfig: center frequency list does not match n_components");
    }
    if (!(half_bandwidth_hz > 0.0)) throw ConfigError("VfcdmConfig: Fw must be positive");
    for (int k = 0; k < n_components; ++k) {
      if (k > 0 && !(center_frequencies_hz[k] > center_frequencies_hz[k - 1])) {
        throw ConfigError("VfcdmConfig: center frequencies must increase");
      }
    }
    if (2.0 * n_components * half_bandwidth_hz > rate / 2.0 + 1e-9) {
      throw ConfigError("VfcdmConfig: component bands exceed Nyquist");
    }
    if (!(first_pass_lpf_hz > 0.0) || !(second_pass_lpf_hz > 0.0)) {
      throw ConfigError("VfcdmConfig: lowpass cutoffs must be positive");
    }
    if (!(freq_clamp_hz > 0.0) || freq_clamp_hz > half_bandwidth_hz) {
      throw ConfigError("VfcdmConfig: carrier clamp must lie in (0, Fw]");
    }
    if (!(freq_smoothing_s > 0.0)) throw ConfigError("VfcdmConfig: smoothing window must be positive");
  }
};

// One demodulated component on the time-frequency grid.
// amplitude[i] * cos(phase[i]) is the component's share of the signal; a tone
// at the band center appears at its full amplitude, while content on a shared
// band edge splits 0.5/0.5 across the two adjacent components and is
// recovered by their coherent sum.  frequency is the refined (second pass)
// instantaneous-frequency estimate.
struct ComponentTrack {
  int index = 0;          // 1-based
  double center_hz = 0.0;
  double band_lo_hz = 0.0;
  double band_hi_hz = 0.0;
  std::vector<double> amplitude;   // instantaneous amplitude of the band content
  std::vector<double> frequency;   // instantaneous frequency, Hz
  std::vector<double> phase;       // unwrapped total phase, rad
};

struct TimeFrequencySpectrum {
  double rate = 0.0;
  std::size_t n_samples = 0;
  std::vector<ComponentTrack> components;
};

namespace vfcdm_detail {

// In-place complex zero-phase lowpass (real/imag filtered independently).
inline void filtfilt_complex(const Sos& sos, std::vector<double>& re, std::vector<double>& im) {
  filtfilt_inplace(sos, re);
  filtfilt_inplace(sos, im);
}

// Iterates cos/sin of the carrier phase step*i via a phasor recurrence (no
// per-sample trig), resynced to directly evaluated values every 4096 samples
// so phase error stays bounded on long inputs.  Demodulation and resynthesis
// both use this exact iteration, so their carriers agree bit for bit.
template <typename F>
inline void for_each_carrier(std::size_t n, double step, F&& f) {
  const double cd = std::cos(step), sd = std::sin(step);
  double c = 1.0, s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if ((i & 4095u) == 0u && i != 0u) {
      const double theta = step * static_cast<double>(i);
      c = std::cos(theta);
      s = std::sin(theta);
    }
    f(i, c, s);
    const double cn = c * cd - s * sd;
    const double sn = s * cd + c * sd;
    c = cn;
    s = sn;
  }
}

// Pass 1: z_k = LPF_Fw[x * exp(-j*2*pi*fk*t)], the component's band content.
inline void first_pass(const std::vector<double>& x, double fk, double rate, const Sos& lpf1,
                       std::vector<double>& zre, std::vector<double>& zim) {
  const std::size_t n = x.size();
  zre.resize(n);
  zim.resize(n);
  const double step = 2.0 * std::numbers::pi * fk / rate;
  for_each_carrier(n, step, [&](std::size_t i, double c, double s) {
    zre[i] = x[i] * c;
    zim[i] = -x[i] * s;
  });
  filtfilt_complex(lpf1, zre, zim);
}

// Instantaneous frequency deviation (Hz) of the analytic pair (re, im) via
// the phase discriminator d(phase)/dt = Im(z' conj(z)) / |z|^2, centered
// differences inside, one-sided copies at the ends.
inline std::vector<double> frequency_deviation(const std::vector<double>& re,
                                               const std::vector<double>& im, double rate) {
  const std::size_t n = re.size();
  std::vector<double> dev(n, 0.0);
  const double scale = rate / (4.0 * std::numbers::pi);  // centered diff over 2 samples
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dre = re[i + 1] - re[i - 1];
    const double dim = im[i + 1] - im[i - 1];
    const double mag2 = re[i] * re[i] + im[i] * im[i] + 1e-300;
    dev[i] = scale * (re[i] * dim - im[i] * dre) / mag2;
  }
  if (n >= 2) {
    dev[0] = dev[1];
    dev[n - 1] = dev[n - 2];
  }
  return dev;
}

// Pass 2: estimate each component's instantaneous frequency from its pass-1
// content, integrate that adapted carrier, demodulate the original signal
// along it, and lowpass at Fw/2.
struct RefinedComponent {
  std::vector<double> f_hat;       // adapted carrier frequency, Hz
  std::vector<double> wre, wim;    // lowpassed demodulate along the adapted carrier
};

inline RefinedComponent refine_component(const std::vector<double>& x, const VfcdmConfig& cfg,
                                         double fk, const std::vector<double>& zre,
                                         const std::vector<double>& zim, const Sos& lpf2) {
  std::vector<double> dev = frequency_deviation(zre, zim, cfg.rate);
  // Robustness: a near-null demodulate makes the discriminator blow up, so
  // bound the raw deviation to the component band before smoothing.
  const double band_half = cfg.half_bandwidth_hz;
  for (auto& d : dev) d = std::clamp(d, -band_half, band_half);

  SampleSeries dev_series{std::move(dev), cfg.rate};
  SampleSeries smooth = moving_average(dev_series, cfg.freq_smoothing_s);

  const std::size_t n = x.size();
  RefinedComponent out;
  out.f_hat.resize(n);
  const double clamp = cfg.freq_clamp_hz;
  for (std::size_t i = 0; i < n; ++i) {
    out.f_hat[i] = fk + std::clamp(smooth.samples[i], -clamp, clamp);
  }

  out.wre.resize(n);
  out.wim.resize(n);
  const double two_pi = 2.0 * std::numbers::pi;
  double theta = 0.0;  // wrapped to (-pi, pi] for cheap trig
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      // Trapezoidal integration of the instantaneous frequency.
      theta += std::numbers::pi * (out.f_hat[i - 1] + out.f_hat[i]) / cfg.rate;
      if (theta > std::numbers::pi) theta -= two_pi;
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    out.wre[i] = x[i] * c;
    out.wim[i] = -x[i] * s;
  }
  filtfilt_complex(lpf2, out.wre, out.wim);
  return out;
}

inline void check_input(const SampleSeries& x, const VfcdmConfig& cfg) {
  cfg.validate();
  if (x.rate != cfg.rate) {
    throw ConfigError("vfcdm: series rate does not match the configured grid");
  }
  const double min_len = 4.0 * cfg.rate / cfg.half_bandwidth_hz;
  if (static_cast<double>(x.size()) < min_len) {
    throw DataError("vfcdm: input shorter than 4 carrier-bandwidth periods");
  }
}

}  // namespace vfcdm_detail

// Validates that [lo, hi] tiles exactly onto whole component bands and
// returns the 1-based component ids covering it.
inline std::set<int> components_for_band(const VfcdmConfig& cfg, double lo_hz, double hi_hz) {
  cfg.validate();
  const double fw = cfg.half_bandwidth_hz;
  const double tol = 1e-6 * fw;
  const double k1f = lo_hz / (2.0 * fw) + 1.0;
  const double k2f = hi_hz / (2.0 * fw);
  const int k1 = static_cast<int>(std::lround(k1f));
  const int k2 = static_cast<int>(std::lround(k2f));
  if (std::abs(k1f - k1) * 2.0 * fw > tol || std::abs(k2f - k2) * 2.0 * fw > tol) {
    throw ConfigError("components_for_band: band edges are not multiples of 2*Fw");
  }
  if (k1 < 1 || k2 > cfg.n_components || k1 > k2) {
    throw ConfigError("components_for_band: band does not fit the component grid");
  }
  std::set<int> ids;
  for (int k = k1; k <= k2; ++k) ids.insert(k);
  return ids;
}

/// Full decomposition: every component's amplitude / frequency / phase track.
inline TimeFrequencySpectrum decompose(const SampleSeries& x, const VfcdmConfig& cfg) {
  vfcdm_detail::check_input(x, cfg);
  const Sos lpf1 = design_filter({FilterKind::lowpass, {cfg.first_pass_lpf_hz, 0.0},
                                  cfg.lpf_order}, cfg.rate);
  const Sos lpf2 = design_filter({FilterKind::lowpass, {cfg.second_pass_lpf_hz, 0.0},
                                  cfg.lpf_order}, cfg.rate);
  const std::size_t n = x.size();

  TimeFrequencySpectrum tfs;
  tfs.rate = cfg.rate;
  tfs.n_samples = n;
  tfs.components.resize(static_cast<std::size_t>(cfg.n_components));

  for (int k = 1; k <= cfg.n_components; ++k) {
    const double fk = cfg.center_frequencies_hz[static_cast<std::size_t>(k - 1)];
    std::vector<double> zre, zim;
    vfcdm_detail::first_pass(x.samples, fk, cfg.rate, lpf1, zre, zim);
    auto refined = vfcdm_detail::refine_component(x.samples, cfg, fk, zre, zim, lpf2);
    auto residual_freq = vfcdm_detail::frequency_deviation(refined.wre, refined.wim, cfg.rate);

    ComponentTrack& track = tfs.components[static_cast<std::size_t>(k - 1)];
    track.index = k;
    track.center_hz = fk;
    auto band = cfg.band(k);
    track.band_lo_hz = band.first;
    track.band_hi_hz = band.second;

    track.amplitude.resize(n);
    track.frequency.resize(n);
    track.phase.resize(n);
    const double step = 2.0 * std::numbers::pi * fk / cfg.rate;
    const double two_pi = 2.0 * std::numbers::pi;
    // The discriminator is unbounded where the amplitude passes through
    // zero; the adapted carrier already tracks the component, so the
    // residual is clamped to half the demodulation bandwidth.
    const double residual_limit = cfg.half_bandwidth_hz / 2.0;
    double prev_arg = 0.0;
    double unwrap_offset = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      track.amplitude[i] = 2.0 * std::sqrt(zre[i] * zre[i] + zim[i] * zim[i]);
      track.frequency[i] =
          refined.f_hat[i] + std::clamp(residual_freq[i], -residual_limit, residual_limit);
      const double arg = std::atan2(zim[i], zre[i]);
      if (i > 0) {
        const double d = arg - prev_arg;
        if (d > std::numbers::pi) unwrap_offset -= two_pi;
        else if (d < -std::numbers::pi) unwrap_offset += two_pi;
      }
      prev_arg = arg;
      track.phase[i] = step * static_cast<double>(i) + arg + unwrap_offset;
    }
  }
  return tfs;
}

// Sum of the selected components re-synthesized from their tracks.
inline SampleSeries reconstruct(const TimeFrequencySpectrum& tfs, const std::set<int>& ids) {
  if (tfs.components.empty()) throw ConfigError("reconstruct: empty spectrum");
  for (int k : ids) {
    if (k < 1 || k > static_cast<int>(tfs.components.size())) {
      throw ConfigError("reconstruct: component id out of range");
    }
  }
  SampleSeries out;
  out.rate = tfs.rate;
  out.samples.assign(tfs.n_samples, 0.0);
  for (int k : ids) {
    const auto& track = tfs.components[static_cast<std::size_t>(k - 1)];
    for (std::size_t i = 0; i < tfs.n_samples; ++i) {
      out.samples[i] += track.amplitude[i] * std::cos(track.phase[i]);
    }
  }
  return out;
}

// Streaming equivalent of reconstruct(decompose(x), ids): computes only the
// requested components' pass-1 band contents and accumulates their
// resynthesis directly, avoiding the full grid on long recordings.
inline SampleSeries reconstruct_band(const SampleSeries& x, const VfcdmConfig& cfg,
                                     const std::set<int>& ids) {
  vfcdm_detail::check_input(x, cfg);
  for (int k : ids) {
    if (k < 1 || k > cfg.n_components) {
      throw ConfigError("reconstruct_band: component id out of range");
    }
  }
  const Sos lpf1 = design_filter({FilterKind::lowpass, {cfg.first_pass_lpf_hz, 0.0},
                                  cfg.lpf_order}, cfg.rate);
  SampleSeries out;
  out.rate = cfg.rate;
  out.samples.assign(x.size(), 0.0);
  std::vector<double> zre, zim;
  for (int k : ids) {
    const double fk = cfg.center_frequencies_hz[static_cast<std::size_t>(k - 1)];
    vfcdm_detail::first_pass(x.samples, fk, cfg.rate, lpf1, zre, zim);
    const double step = 2.0 * std::numbers::pi * fk / cfg.rate;
    // amplitude * cos(total phase) == 2 * Re(z * exp(j*theta)).
    vfcdm_detail::for_each_carrier(x.size(), step, [&](std::size_t i, double c, double s) {
      out.samples[i] += 2.0 * (zre[i] * c - zim[i] * s);
    });
  }
  return out;
}

}  // namespace skna
