#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dsp.hpp"
#include "errors.hpp"
#include "filters.hpp"
#include "series.hpp"
#include "vfcdm.hpp"

namespace skna {

enum class SknaKind { iSKNA, TVSKNA };

inline const char* to_string(SknaKind k) {
  return k == SknaKind::iSKNA ? "iSKNA" : "TVSKNA";
}

inline SknaKind skna_kind_from(std::string_view s) {
  if (s == "iSKNA" || s == "iskna") return SknaKind::iSKNA;
  if (s == "TVSKNA" || s == "tvskna") return SknaKind::TVSKNA;
  throw FormatError("unknown SKNA kind '" + std::string(s) + "'");
}

struct NotchSpec {
  double freq_hz = 0.0;
  double q = 30.0;
};

// Per-rate extraction parameters.  The three supported grids:
//
//   rate   iSKNA band   TVSKNA band   VFCDM components
//   4000   500-1000     480-1120      4..7   (Fw = 80)
//   1000   250-500      240-480       7..12  (Fw = 20)
//    500   150-250      160-240       9..12  (Fw = 10)
struct PipelineConfig {
  double target_rate_hz = 0.0;
  std::pair<double, double> iskna_band_hz{0.0, 0.0};
  std::pair<double, double> tvskna_band_hz{0.0, 0.0};
  double tvskna_highpass_hz = 150.0;
  std::vector<NotchSpec> notches;
  bool notch_iskna = false;  // mains notches default to the TVSKNA path only
  double smoothing_window_s = 0.1;
  int filter_order = 4;
  VfcdmConfig vfcdm;

  void validate() const {
    if (!(target_rate_hz > 0.0)) throw ConfigError("pipeline: target rate must be positive");
    const double nyq = target_rate_hz / 2.0;
    if (!(iskna_band_hz.first > 0.0 && iskna_band_hz.second > iskna_band_hz.first &&
          iskna_band_hz.second <= nyq)) {
      throw ConfigError("pipeline: iSKNA band must satisfy 0 < low < high <= Nyquist");
    }
    if (!(tvskna_band_hz.first > 0.0 && tvskna_band_hz.second > tvskna_band_hz.first &&
          tvskna_band_hz.second <= nyq)) {
      throw ConfigError("pipeline: TVSKNA band must satisfy 0 < low < high <= Nyquist");
    }
    if (!(tvskna_highpass_hz > 0.0 && tvskna_highpass_hz < nyq)) {
      throw ConfigError("pipeline: highpass cutoff must lie in (0, Nyquist)");
    }
    for (const auto& nz : notches) {
      if (!(nz.freq_hz > 0.0 && nz.freq_hz < nyq)) {
        throw ConfigError("pipeline: notch frequency must lie in (0, Nyquist)");
      }
      if (!(nz.q > 0.0)) throw ConfigError("pipeline: notch Q must be positive");
    }
    if (!(smoothing_window_s > 0.0)) {
      throw ConfigError("pipeline: smoothing window must be positive");
    }
    vfcdm.validate();
    if (vfcdm.rate != target_rate_hz) {
      throw ConfigError("pipeline: VFCDM grid rate does not match target rate");
    }
    // The TVSKNA band must tile onto whole VFCDM components.
    components_for_band(vfcdm, tvskna_band_hz.first, tvskna_band_hz.second);
  }
};

// The supported rate grid; anything else is a configuration error.
inline PipelineConfig default_config(double target_rate_hz) {
  PipelineConfig cfg;
  cfg.target_rate_hz = target_rate_hz;
  if (target_rate_hz == 4000.0) {
    cfg.iskna_band_hz = {500.0, 1000.0};
    cfg.tvskna_band_hz = {480.0, 1120.0};
  } else if (target_rate_hz == 1000.0) {
    cfg.iskna_band_hz = {250.0, 500.0};
    cfg.tvskna_band_hz = {240.0, 480.0};
  } else if (target_rate_hz == 500.0) {
    cfg.iskna_band_hz = {150.0, 250.0};
    cfg.tvskna_band_hz = {160.0, 240.0};
  } else {
    throw ConfigError("default_config: supported target rates are 4000, 1000, 500 Hz");
  }
  // Mains notches (fundamental + harmonics) where they fit below Nyquist.
  for (double f : {60.0, 120.0, 180.0}) {
    if (f < target_rate_hz / 2.0) cfg.notches.push_back({f, 30.0});
  }
  cfg.vfcdm = VfcdmConfig::for_rate(target_rate_hz);
  return cfg;
}

// One extracted SKNA envelope plus the config that produced it.
struct SknaSeries {
  SknaKind kind = SknaKind::iSKNA;
  std::vector<double> samples;
  double rate = 0.0;
  double target_rate_hz = 0.0;

  std::size_t size() const noexcept { return samples.size(); }
  SampleSeries as_series() const { return SampleSeries{samples, rate}; }
};

namespace pipeline_detail {

inline SampleSeries prepare(const SampleSeries& channel, const PipelineConfig& cfg) {
  if (!(channel.rate >= cfg.target_rate_hz)) {
    throw ConfigError("pipeline: channel rate must be >= target rate");
  }
  return resample(channel, cfg.target_rate_hz);
}

inline void apply_notches(SampleSeries& x, const PipelineConfig& cfg) {
  for (const auto& nz : cfg.notches) {
    Sos sos = design_filter({FilterKind::notch, {nz.freq_hz, 0.0}, 2, nz.q}, x.rate);
    filtfilt_inplace(sos, x.samples);
  }
}

}  // namespace pipeline_detail

// iSKNA: resample -> Butterworth bandpass -> (optional notches) -> rectify ->
// 100 ms moving average.
inline SknaSeries compute_iskna(const SampleSeries& channel, const PipelineConfig& cfg) {
  cfg.validate();
  SampleSeries x = pipeline_detail::prepare(channel, cfg);
  // A band whose upper edge sits at Nyquist (the 250-500 Hz band at 1 kHz) is
  // open-ended in the digital domain: no bilinear bandpass can place a cutoff
  // there, so the band reduces to its highpass edge.
  const bool open_ended =
      cfg.iskna_band_hz.second >= cfg.target_rate_hz / 2.0 - 1e-9;
  Sos bp = open_ended
               ? design_filter({FilterKind::highpass, {cfg.iskna_band_hz.first, 0.0},
                                cfg.filter_order}, cfg.target_rate_hz)
               : design_filter({FilterKind::bandpass,
                                {cfg.iskna_band_hz.first, cfg.iskna_band_hz.second},
                                cfg.filter_order}, cfg.target_rate_hz);
  filtfilt_inplace(bp, x.samples);
  if (cfg.notch_iskna) pipeline_detail::apply_notches(x, cfg);
  x = rectify(x);
  x = moving_average(x, cfg.smoothing_window_s);

  SknaSeries out;
  out.kind = SknaKind::iSKNA;
  out.rate = x.rate;
  out.target_rate_hz = cfg.target_rate_hz;
  out.samples = std::move(x.samples);
  return out;
}

// TVSKNA: resample -> highpass 150 Hz -> mains notches -> VFCDM band
// reconstruction -> Hilbert envelope -> 100 ms moving average.
inline SknaSeries compute_tvskna(const SampleSeries& channel, const PipelineConfig& cfg) {
  cfg.validate();
  SampleSeries x = pipeline_detail::prepare(channel, cfg);
  Sos hp = design_filter({FilterKind::highpass, {cfg.tvskna_highpass_hz, 0.0},
                          cfg.filter_order}, cfg.target_rate_hz);
  filtfilt_inplace(hp, x.samples);
  pipeline_detail::apply_notches(x, cfg);

  auto ids = components_for_band(cfg.vfcdm, cfg.tvskna_band_hz.first, cfg.tvskna_band_hz.second);
  SampleSeries band = reconstruct_band(x, cfg.vfcdm, ids);
  SampleSeries env = analytic_amplitude(band);
  env = moving_average(env, cfg.smoothing_window_s);

  SknaSeries out;
  out.kind = SknaKind::TVSKNA;
  out.rate = env.rate;
  out.target_rate_hz = cfg.target_rate_hz;
  out.samples = std::move(env.samples);
  return out;
}

inline SknaSeries compute_skna(const SampleSeries& channel, const PipelineConfig& cfg,
                               SknaKind kind) {
  return kind == SknaKind::iSKNA ? compute_iskna(channel, cfg) : compute_tvskna(channel, cfg);
}

}  // namespace skna
