#include "kzp/simulate.hpp"

#include <cmath>
#include <numbers>

#include "kzp/error.hpp"

namespace kzp {

namespace {

// sin(2 pi f t + phase) with the cycle count reduced before scaling, so large
// t does not cost precision.
double tone(double f, std::int64_t t, double phase) {
  const double cycles = std::fmod(f * static_cast<double>(t), 1.0);
  return std::sin(2.0 * std::numbers::pi * cycles + phase);
}

std::vector<SinusoidComponent> resolved_components(const SignalSpec& spec) {
  auto comps = spec.components;
  if (spec.random_phase) {
    // Separate stream from the noise so toggling phases leaves noise intact.
    NormalGenerator rng(spec.seed ^ 0x5deece66dULL);
    for (auto& c : comps)
      c.phase = std::numbers::pi * (2.0 * rng.uniform() - 1.0);
  }
  return comps;
}

std::vector<double> deterministic_part(const SignalSpec& spec) {
  const auto comps = resolved_components(spec);
  std::vector<double> v(spec.n, 0.0);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const auto t = static_cast<std::int64_t>(i) + 1;
    double x = 0.0;
    for (const auto& c : comps) x += c.amplitude * tone(c.frequency, t, c.phase);
    v[i] = x;
  }
  return v;
}

}  // namespace

void SignalSpec::validate() const {
  require(n >= 1, "signal length n must be at least 1");
  require(noise_sigma >= 0.0 && std::isfinite(noise_sigma),
          "noise_sigma must be finite and >= 0");
  for (const auto& c : components) {
    require(c.frequency > 0.0 && c.frequency < 0.5,
            "component frequency must lie in (0, 0.5)");
    require(c.amplitude >= 0.0 && std::isfinite(c.amplitude),
            "component amplitude must be finite and >= 0");
    require(std::isfinite(c.phase), "component phase must be finite");
  }
}

double NormalGenerator::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalGenerator::operator()() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // Box-Muller; 1 - u keeps the logarithm's argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

TimeSeries generate(const SignalSpec& spec) {
  spec.validate();
  auto v = deterministic_part(spec);
  if (spec.noise_sigma > 0.0) {
    NormalGenerator rng(spec.seed);
    for (auto& x : v) x += spec.noise_sigma * rng();
  }
  return TimeSeries::complete(std::move(v), 1);
}

TimeSeries signal_only(const SignalSpec& spec) {
  spec.validate();
  return TimeSeries::complete(deterministic_part(spec), 1);
}

TimeSeries inject_missing(const TimeSeries& ts, double p, std::uint64_t seed) {
  require(p >= 0.0 && p <= 1.0, "missing probability must lie in [0, 1]");
  NormalGenerator rng(seed);
  std::vector<std::uint8_t> mask(ts.mask().begin(), ts.mask().end());
  for (auto& m : mask) {
    const double u = rng.uniform();
    if (m && u < p) m = 0;
  }
  return ts.with_mask(std::move(mask));
}

double snr(const SignalSpec& spec) {
  if (spec.noise_sigma == 0.0)
    fail(ErrorCode::Argument, "signal-to-noise ratio is infinite for noise_sigma = 0");
  require(spec.noise_sigma > 0.0, "noise_sigma must be positive");
  double power = 0.0;
  for (const auto& c : spec.components) power += c.amplitude * c.amplitude;
  return power / (spec.noise_sigma * spec.noise_sigma);
}

double amplitude_for_snr(double ratio, double noise_sigma) {
  require(ratio >= 0.0, "snr must be >= 0");
  require(noise_sigma > 0.0, "noise_sigma must be positive");
  return noise_sigma * std::sqrt(ratio);
}

}  // namespace kzp
