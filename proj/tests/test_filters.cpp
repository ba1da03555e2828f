#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "skna/filters.hpp"
#include "test_helpers.hpp"

using namespace skna;

namespace {

double mag(const Sos& sos, double f) { return std::abs(sos_response(sos, f)); }

// Single-pass impulse response, long enough to decay to rounding noise.
std::vector<double> impulse_response(const Sos& sos, std::size_t n) {
  std::vector<double> x(n, 0.0);
  x[0] = 1.0;
  detail::sosfilt_inplace(sos, x, 0.0);
  return x;
}

}  // namespace

TEST_CASE("bandpass 500-1000 Hz at 4 kHz", "[filters]") {
  Sos sos = design_filter({FilterKind::bandpass, {500.0, 1000.0}, 4}, 4000.0);
  CHECK(mag(sos, 750.0) > 0.95);
  const double edge_db_lo = 20.0 * std::log10(mag(sos, 500.0));
  const double edge_db_hi = 20.0 * std::log10(mag(sos, 1000.0));
  CHECK(edge_db_lo == Catch::Approx(-3.01).margin(0.5));
  CHECK(edge_db_hi == Catch::Approx(-3.01).margin(0.5));
  CHECK(mag(sos, 100.0) < 0.01);
  CHECK(mag(sos, 1900.0) < 0.01);
  for (const auto& s : sos.sections) {
    // stable: |poles| < 1 for every section
    const double c = s.a2;          // product of pole pair magnitudes^2
    CHECK(std::abs(c) < 1.0);
  }
}

TEST_CASE("every designed cutoff lands at -3 dB", "[filters]") {
  struct Case {
    FilterSpec spec;
    double rate;
    std::vector<double> cutoffs;
  };
  const std::vector<Case> cases = {
      {{FilterKind::bandpass, {500.0, 1000.0}, 4}, 4000.0, {500.0, 1000.0}},
      {{FilterKind::bandpass, {160.0, 240.0}, 4}, 500.0, {160.0, 240.0}},
      {{FilterKind::highpass, {250.0, 0.0}, 4}, 1000.0, {250.0}},
      {{FilterKind::highpass, {150.0, 0.0}, 4}, 500.0, {150.0}},
      {{FilterKind::highpass, {150.0, 0.0}, 4}, 4000.0, {150.0}},
      {{FilterKind::lowpass, {80.0, 0.0}, 4}, 4000.0, {80.0}},
  };
  for (const auto& c : cases) {
    Sos sos = design_filter(c.spec, c.rate);
    for (double f : c.cutoffs) {
      const double db = 20.0 * std::log10(mag(sos, f));
      INFO(to_string(c.spec.kind) << " cutoff " << f << " Hz at rate " << c.rate);
      CHECK(db == Catch::Approx(-3.0103).margin(0.5));
    }
  }
}

TEST_CASE("notch 60 Hz Q=30 at 1 kHz", "[filters]") {
  Sos sos = design_filter({FilterKind::notch, {60.0, 0.0}, 2, 30.0}, 1000.0);
  CHECK(mag(sos, 60.0) < 0.03);
  CHECK(mag(sos, 50.0) > 0.9);
  CHECK(mag(sos, 70.0) > 0.9);
  CHECK(mag(sos, 300.0) > 0.99);
}

TEST_CASE("highpass has a hard zero at DC", "[filters]") {
  Sos sos = design_filter({FilterKind::highpass, {100.0, 0.0}, 4}, 1000.0);
  CHECK(mag(sos, 0.0) < 1e-12);
  CHECK(mag(sos, 499.0) > 0.99);
}

TEST_CASE("invalid designs are configuration errors", "[filters]") {
  CHECK_THROWS_AS(design_filter({FilterKind::bandpass, {500.0, 500.0}, 4}, 4000.0), ConfigError);
  CHECK_THROWS_AS(design_filter({FilterKind::bandpass, {250.0, 500.0}, 4}, 1000.0), ConfigError);
  CHECK_THROWS_AS(design_filter({FilterKind::highpass, {500.0, 0.0}, 4}, 1000.0), ConfigError);
  CHECK_THROWS_AS(design_filter({FilterKind::lowpass, {0.0, 0.0}, 4}, 1000.0), ConfigError);
  CHECK_THROWS_AS(design_filter({FilterKind::bandpass, {100.0, 200.0}, 0}, 1000.0), ConfigError);
  CHECK_THROWS_AS(design_filter({FilterKind::bandpass, {100.0, 200.0}, 13}, 1000.0), ConfigError);
  CHECK_THROWS_AS(design_filter({FilterKind::notch, {600.0, 0.0}, 2, 30.0}, 1000.0), ConfigError);
  CHECK_THROWS_AS(design_filter({FilterKind::lowpass, {100.0, 0.0}, 4}, -1.0), ConfigError);
}

TEST_CASE("filtfilt is zero-phase and squares the magnitude response", "[filters]") {
  Sos sos = design_filter({FilterKind::bandpass, {500.0, 1000.0}, 4}, 4000.0);

  SECTION("DC input maps to zero") {
    std::vector<double> x(4000, 1.0);
    filtfilt_inplace(sos, x);
    CHECK(testutil::max_abs(x) < 1e-9);
  }

  SECTION("in-band sine keeps its amplitude") {
    auto s = testutil::sine(750.0, 4000.0, 2.0);
    filtfilt_inplace(sos, s.samples);
    const auto mid = testutil::interior(s.samples);
    CHECK(testutil::max_abs(mid) >= 0.9);
    // amplitude should match |H(750)|^2
    const double expected = mag(sos, 750.0) * mag(sos, 750.0);
    CHECK(testutil::max_abs(mid) == Catch::Approx(expected).epsilon(0.01));
  }
}

TEST_CASE("filtfilt impulse response equals the autocorrelation oracle", "[filters]") {
  Sos sos = design_filter({FilterKind::bandpass, {100.0, 200.0}, 3}, 1000.0);
  const std::size_t n = 4096;
  const std::size_t m = n / 2;

  auto h = impulse_response(sos, n);

  // Forward+backward filtering of delta at m gives r[t - m] with
  // r[k] = sum_j h[j] * h[j + k]  (the filter's autocorrelation).
  std::vector<double> x(n, 0.0);
  x[m] = 1.0;
  filtfilt_inplace(sos, x);

  for (std::ptrdiff_t k = -512; k <= 512; ++k) {
    long double r = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      const std::ptrdiff_t jk = static_cast<std::ptrdiff_t>(j) + k;
      if (jk >= 0 && jk < static_cast<std::ptrdiff_t>(n)) r += (long double)h[j] * h[jk];
    }
    const double got = x[m + k];
    REQUIRE(std::abs(got - static_cast<double>(r)) < 1e-9);
  }
}

TEST_CASE("filtfilt rejects inputs shorter than its padding", "[filters]") {
  Sos sos = design_filter({FilterKind::bandpass, {100.0, 200.0}, 4}, 1000.0);
  std::vector<double> tiny(10, 1.0);
  CHECK_THROWS_AS(filtfilt_inplace(sos, tiny), DataError);
}

TEST_CASE("sos_response agrees with direct time-domain gain", "[filters]") {
  Sos sos = design_filter({FilterKind::lowpass, {50.0, 0.0}, 4}, 1000.0);
  auto s = testutil::sine(20.0, 1000.0, 4.0);
  std::vector<double> y = s.samples;
  detail::sosfilt_inplace(sos, y, y.front());
  const auto mid = testutil::interior(y, 0.25);
  CHECK(testutil::max_abs(mid) == Catch::Approx(mag(sos, 20.0)).epsilon(0.005));
}
