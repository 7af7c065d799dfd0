#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "kzp/series.hpp"

namespace kzp {

struct SinusoidComponent {
  double frequency = 0.0;  // cycles per step, in (0, 0.5)
  double amplitude = 0.0;
  double phase = 0.0;      // radians
};

/// Sum of sinusoids plus Gaussian noise:
///   x_t = sum_j a_j sin(2 pi f_j t + phi_j) + sigma z_t,  t = 1..n
struct SignalSpec {
  std::vector<SinusoidComponent> components;
  double noise_sigma = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  // Draw every phase uniformly on (-pi, pi) from the seed, ignoring the
  // configured phases.
  bool random_phase = false;

  void validate() const;
};

/// Standard normal deviates: mt19937_64 feeding the Box-Muller transform.
/// The stream is fixed for a given seed and does not depend on the standard
/// library's distribution implementations.
class NormalGenerator {
 public:
  explicit NormalGenerator(std::uint64_t seed) : engine_(seed) {}

  double operator()();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

TimeSeries generate(const SignalSpec& spec);

/// The noise-free part of generate(spec).
TimeSeries signal_only(const SignalSpec& spec);

/// Masks each observed sample independently with probability p. Uses one
/// uniform draw per sample, so for a fixed seed the masks are nested in p.
TimeSeries inject_missing(const TimeSeries& ts, double p, std::uint64_t seed);

/// (sum_j a_j^2) / sigma^2. Throws Argument when sigma == 0.
double snr(const SignalSpec& spec);

/// Amplitude giving a single-component signal the requested snr().
double amplitude_for_snr(double snr, double noise_sigma);

}  // namespace kzp
