#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "recording.hpp"
#include "series.hpp"

namespace skna {

// Deterministic, portable normal/uniform draws on top of mt19937_64 (the
// distributions in <random> are not bit-stable across library versions).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {  // Box-Muller, one cached value
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct EcgSpec {
  double heart_rate_bpm = 70.0;
  double qrs_amplitude_mv = 1.0;
  double qrs_width_s = 0.024;  // full width; pulse sigma is width/4
};

struct BurstSpec {
  double band_lo_hz = 150.0;
  double band_hi_hz = 500.0;
  double amplitude_mv = 0.01;  // RMS of the burst core before enveloping
  double duration_s = 2.0;
  // Bursts per second of task time; a segment of duration T carries
  // max(1, round(rate_per_s * T)) bursts, keeping duty cycle equal across
  // task types of different lengths.
  double rate_per_s = 0.3;

  int count_for(double segment_duration_s) const {
    return std::max(1, static_cast<int>(std::llround(rate_per_s * segment_duration_s)));
  }
};

struct NoiseSpec {
  double white_sigma_mv = 0.002;
  double mains_hz = 60.0;
  double mains_amplitude_mv = 0.001;
};

struct SynthSpec {
  int n_participants = 16;
  double native_rate_hz = 10000.0;
  EcgSpec ecg;
  BurstSpec burst;
  NoiseSpec noise;
  std::vector<SegmentAnnotation> plan;  // task segments only
  double channel2_gain = 0.9;
  double tail_s = 2.0;  // quiet padding after the last segment
  std::uint64_t seed = 1;

  void validate() const {
    if (n_participants < 1) throw ConfigError("synth: need at least one participant");
    if (!(native_rate_hz > 0.0)) throw ConfigError("synth: native rate must be positive");
    const double nyq = native_rate_hz / 2.0;
    if (!(burst.band_lo_hz > 0.0 && burst.band_hi_hz > burst.band_lo_hz &&
          burst.band_hi_hz < nyq)) {
      throw ConfigError("synth: burst band must lie within (0, native Nyquist)");
    }
    if (!(burst.amplitude_mv >= 0.0)) throw ConfigError("synth: burst amplitude must be >= 0");
    if (!(burst.duration_s > 0.0)) throw ConfigError("synth: burst duration must be positive");
    if (!(ecg.heart_rate_bpm > 0.0)) throw ConfigError("synth: heart rate must be positive");
    if (!(noise.white_sigma_mv > 0.0)) throw ConfigError("synth: noise sigma must be positive");
    if (plan.empty()) throw ConfigError("synth: task plan is empty");
    std::vector<SegmentAnnotation> sorted = plan;
    std::sort(sorted.begin(), sorted.end(),
              [](const SegmentAnnotation& a, const SegmentAnnotation& b) {
                return a.start_s < b.start_s;
              });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i].label == TaskLabel::Baseline) {
        throw ConfigError("synth: plan lists task segments only");
      }
      try {
        validate_annotation(sorted[i]);
      } catch (const DataError& e) {
        throw ConfigError(std::string("synth: ") + e.what());
      }
      if (i > 0 && sorted[i].start_s < sorted[i - 1].end_s()) {
        throw ConfigError("synth: task segments overlap");
      }
    }
  }

  double recording_duration_s() const {
    double end = 0.0;
    for (const auto& a : plan) end = std::max(end, a.end_s());
    return end + tail_s;
  }
};

// Inter-participant variation; each factor is lognormal exp(sigma * z).
struct CohortJitter {
  double gain_sigma = 0.05;             // shared per-participant electrode gain
  double burst_amplitude_sigma = 0.1;   // SKNA responsiveness
  double heart_rate_sigma = 0.05;
  double noise_sigma = 0.0;             // noise-floor variation
};

struct ParticipantFactors {
  std::string participant_id;
  std::uint64_t seed = 0;
  double gain = 1.0;
  double burst_amplitude_mv = 0.0;
  double heart_rate_bpm = 0.0;
  double noise_sigma_mv = 0.0;
};

struct CohortMember {
  Recording recording;
  std::vector<SegmentAnnotation> annotations;
  ParticipantFactors factors;
};

namespace synth_detail {

// Band-limited unit-RMS noise via an explicit frequency-domain construction:
// only bins inside [lo, hi] are populated, so out-of-band energy is zero up
// to the envelope's spectral widening.
inline std::vector<double> band_noise(std::size_t n, double rate, double lo, double hi,
                                      RandomStream& rng) {
  std::vector<std::complex<double>> spec(n, {0.0, 0.0});
  const double df = rate / static_cast<double>(n);
  const std::size_t b_lo = static_cast<std::size_t>(std::ceil(lo / df));
  const std::size_t b_hi = std::min(static_cast<std::size_t>(std::floor(hi / df)), n / 2 - 1);
  if (b_lo >= b_hi) throw ConfigError("synth: burst band too narrow for the burst length");
  for (std::size_t b = b_lo; b <= b_hi; ++b) {
    const double re = rng.normal();
    const double im = rng.normal();
    spec[b] = {re, im};
    spec[n - b] = {re, -im};  // Hermitian symmetry -> real time series
  }
  auto x = fftops::ifft(spec);
  std::vector<double> out(n);
  long double power = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = x[i].real();
    power += out[i] * out[i];
  }
  const double rms = std::sqrt(static_cast<double>(power / static_cast<long double>(n)));
  const double scale = rms > 0.0 ? 1.0 / rms : 0.0;
  for (auto& v : out) v *= scale;
  return out;
}

inline void add_qrs_train(std::vector<double>& x, double rate, const EcgSpec& ecg,
                          double hr_bpm, RandomStream& rng) {
  const double period = 60.0 / hr_bpm;
  const double sigma = ecg.qrs_width_s / 4.0;
  // Gaussian-derivative pulse, peak normalized to the QRS amplitude.
  const double peak_norm = std::exp(-0.5);  // max of |t/s * exp(-t^2/2s^2)| at t = s
  const double amp = ecg.qrs_amplitude_mv / peak_norm;
  const double duration = static_cast<double>(x.size()) / rate;
  double t0 = rng.uniform() * period;
  const double support = 5.0 * sigma;
  while (t0 < duration + support) {
    const long long i_lo = std::max<long long>(0, std::llround((t0 - support) * rate));
    const long long i_hi =
        std::min<long long>(static_cast<long long>(x.size()) - 1, std::llround((t0 + support) * rate));
    for (long long i = i_lo; i <= i_hi; ++i) {
      const double t = static_cast<double>(i) / rate - t0;
      const double u = t / sigma;
      x[static_cast<std::size_t>(i)] += -amp * u * std::exp(-0.5 * u * u);
    }
    t0 += period;
  }
}

}  // namespace synth_detail

// One participant's recording: two channels sharing the ECG + burst content
// (channel 2 scaled by channel2_gain) with independent white noise.
inline std::pair<Recording, std::vector<SegmentAnnotation>> generate(const SynthSpec& spec) {
  spec.validate();
  const double rate = spec.native_rate_hz;
  const std::size_t n = static_cast<std::size_t>(std::llround(spec.recording_duration_s() * rate));
  RandomStream rng(spec.seed);

  // Shared content: ECG pulse train, mains, and the burst track.
  std::vector<double> shared(n, 0.0);
  synth_detail::add_qrs_train(shared, rate, spec.ecg, spec.ecg.heart_rate_bpm, rng);

  if (spec.noise.mains_amplitude_mv > 0.0) {
    const double phase = rng.uniform() * 2.0 * std::numbers::pi;
    const double w = 2.0 * std::numbers::pi * spec.noise.mains_hz / rate;
    for (std::size_t i = 0; i < n; ++i) {
      shared[i] += spec.noise.mains_amplitude_mv * std::sin(w * static_cast<double>(i) + phase);
    }
  }

  std::vector<SegmentAnnotation> plan = spec.plan;
  std::stable_sort(plan.begin(), plan.end(),
                   [](const SegmentAnnotation& a, const SegmentAnnotation& b) {
                     return a.start_s < b.start_s;
                   });
  const std::size_t burst_len = static_cast<std::size_t>(std::llround(spec.burst.duration_s * rate));
  for (const auto& seg : plan) {
    const int count = spec.burst.count_for(seg.duration_s);
    const double slot = seg.duration_s / count;
    for (int b = 0; b < count; ++b) {
      // Draws happen even at amplitude 0 so the null cohort shares the RNG
      // stream structure of the matched active cohort.
      const double jitter = (rng.uniform() - 0.5) * 0.4 * slot;
      std::vector<double> core = synth_detail::band_noise(
          std::max<std::size_t>(burst_len, 64), rate, spec.burst.band_lo_hz,
          spec.burst.band_hi_hz, rng);
      if (spec.burst.amplitude_mv <= 0.0) continue;
      double center = seg.start_s + (b + 0.5) * slot + jitter;
      center = std::clamp(center, seg.start_s + spec.burst.duration_s / 2.0,
                          seg.end_s() - spec.burst.duration_s / 2.0);
      const long long i0 = std::llround((center - spec.burst.duration_s / 2.0) * rate);
      for (std::size_t j = 0; j < core.size(); ++j) {
        const long long idx = i0 + static_cast<long long>(j);
        if (idx < 0 || idx >= static_cast<long long>(n)) continue;
        // Hann envelope keeps the on/off transitions band-limited.
        const double win =
            0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) /
                                 static_cast<double>(core.size()));
        shared[static_cast<std::size_t>(idx)] += spec.burst.amplitude_mv * core[j] * win;
      }
    }
  }

  Recording rec;
  rec.rate = rate;
  rec.channel_names = {"ch1", "ch2"};
  rec.channels.assign(2, std::vector<double>(n));
  const double gains[2] = {1.0, spec.channel2_gain};
  for (int ch = 0; ch < 2; ++ch) {
    auto& dst = rec.channels[static_cast<std::size_t>(ch)];
    for (std::size_t i = 0; i < n; ++i) {
      dst[i] = gains[ch] * shared[i] + spec.noise.white_sigma_mv * rng.normal();
    }
  }
  return {std::move(rec), std::move(plan)};
}

// Participant i of a cohort: its RNG stream is derived from the cohort seed
// by splitmix64, so any member is reproducible in isolation (and long cohorts
// can be processed one recording at a time).  The cohort seed is mixed before
// the member index is added; otherwise numerically adjacent cohort seeds
// (typical for replicate batches) would share most of their members, since
// seed+1 at index i-1 lands on the same stream as seed at index i.
inline CohortMember generate_member(const SynthSpec& spec, const CohortJitter& jitter, int i) {
  if (i < 0 || i >= spec.n_participants) {
    throw ConfigError("generate_member: participant index out of range");
  }
  const std::uint64_t pseed = splitmix64(splitmix64(spec.seed) + static_cast<std::uint64_t>(i));
  RandomStream factor_rng(splitmix64(pseed ^ 0xA5A5A5A5A5A5A5A5ull));

  ParticipantFactors f;
  char id[16];
  std::snprintf(id, sizeof(id), "P%02d", i + 1);
  f.participant_id = id;
  f.seed = pseed;
  f.gain = std::exp(jitter.gain_sigma * factor_rng.normal());
  const double burst_factor = std::exp(jitter.burst_amplitude_sigma * factor_rng.normal());
  const double hr_factor = std::exp(jitter.heart_rate_sigma * factor_rng.normal());
  const double noise_factor = std::exp(jitter.noise_sigma * factor_rng.normal());

  SynthSpec pspec = spec;
  pspec.seed = pseed;
  pspec.ecg.heart_rate_bpm = spec.ecg.heart_rate_bpm * hr_factor;
  pspec.ecg.qrs_amplitude_mv = spec.ecg.qrs_amplitude_mv * f.gain;
  pspec.burst.amplitude_mv = spec.burst.amplitude_mv * f.gain * burst_factor;
  pspec.noise.white_sigma_mv = spec.noise.white_sigma_mv * f.gain * noise_factor;
  pspec.noise.mains_amplitude_mv = spec.noise.mains_amplitude_mv * f.gain;
  f.burst_amplitude_mv = pspec.burst.amplitude_mv;
  f.heart_rate_bpm = pspec.ecg.heart_rate_bpm;
  f.noise_sigma_mv = pspec.noise.white_sigma_mv;

  auto [rec, anns] = generate(pspec);
  rec.participant_id = f.participant_id;
  return {std::move(rec), std::move(anns), std::move(f)};
}

// n participants with lognormal inter-subject factors.
inline std::vector<CohortMember> generate_cohort(const SynthSpec& spec,
                                                 const CohortJitter& jitter) {
  spec.validate();
  std::vector<CohortMember> cohort;
  cohort.reserve(static_cast<std::size_t>(spec.n_participants));
  for (int i = 0; i < spec.n_participants; ++i) {
    cohort.push_back(generate_member(spec, jitter, i));
  }
  return cohort;
}

// The default task plan: two Valsalva trials, one Stroop trial, four thermal
// grill trials with mixed VAS scores; every segment leaves room for an
// equal-length pre-task baseline plus a 5 s gap.
inline std::vector<SegmentAnnotation> standard_plan(
    int n_vm = 2, int n_st = 1, const std::vector<double>& tg_vas = {2.5, 3.0, 6.0, 7.5}) {
  std::vector<SegmentAnnotation> plan;
  double cursor = 1.0;
  auto push = [&](TaskLabel label, std::optional<double> vas) {
    SegmentAnnotation a;
    a.label = label;
    a.duration_s = default_duration_s(label);
    a.start_s = cursor + a.duration_s + 5.0;  // room for baseline + gap
    a.vas = vas;
    plan.push_back(a);
    cursor = a.end_s() + 1.0;
  };
  for (int i = 0; i < n_vm; ++i) push(TaskLabel::VM, std::nullopt);
  for (int i = 0; i < n_st; ++i) push(TaskLabel::ST, std::nullopt);
  for (double vas : tg_vas) push(TaskLabel::TG, vas);
  return plan;
}

}  // namespace skna
