#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "kzp/series.hpp"

namespace kzp {

/// Uniformly spaced frequencies in cycles per step.
struct FrequencyGrid {
  double step = 0.0;
  std::vector<double> points;

  /// f_j = j * step for j = 0 .. floor(0.5 / step).
  static FrequencyGrid half_band(double step);
  /// f_j = start + j * step for j = 0 .. count-1.
  static FrequencyGrid uniform(double start, double step, std::size_t count);

  std::size_t size() const noexcept { return points.size(); }
};

struct Periodogram {
  FrequencyGrid grid;
  std::vector<double> intensity;
  std::size_t n_used = 0;

  /// sum_j intensity_j * step
  double mass() const;
};

enum class WindowForm { Uniform, Bartlett, Gaussian, Parzen, TukeyHamming };

WindowForm parse_window_form(std::string_view name);
std::string_view to_string(WindowForm form);

/// Raw periodogram of the de-meaned observed samples:
///   I(f) = |sum_{t observed} (x_t - mean) exp(-i 2 pi f t)|^2 / (2 pi n_obs)
Periodogram raw_periodogram(const TimeSeries& ts, const FrequencyGrid& grid);

/// Symmetric weights w_{-A..A}, nonnegative, summing to one.
std::vector<double> window_weights(WindowForm form, int half_width);

/// Fixed-width spectral window smoothing. Indices past either end of the grid
/// reflect back into it (the spectrum is even about 0 and about 0.5).
Periodogram smooth_fixed(const Periodogram& pg, WindowForm form,
                         int half_width);

/// Maps index i in [-(len-1), 2(len-1)] back into [0, len).
std::size_t reflect_index(std::ptrdiff_t i, std::size_t len);

struct ComplexSeries {
  std::vector<std::int64_t> times;
  std::vector<std::complex<double>> coefficients;

  std::size_t size() const noexcept { return times.size(); }
};

enum class EdgePolicy {
  Drop,     // only times whose whole window lies inside the series
  Partial,  // samples beyond either end count as missing
};

struct KzOptions {
  EdgePolicy edge = EdgePolicy::Drop;
  // A coefficient is emitted at t when the observed kernel mass around t is
  // at least min_coverage times the series' observed fraction.
  double min_coverage = 0.5;
};

/// Weights of the k-fold self-convolution of the length-m uniform window.
std::vector<double> kz_weights(int m, int k);

/// Number of samples spanned by kz_weights(m, k).
std::size_t kz_support(int m, int k);

/// Kolmogorov-Zurbenko Fourier transform at frequency f:
///   c(t) = sum_s a_s x_{t+s} exp(-i 2 pi f (t+s)) / sum_{s observed} a_s
/// Missing samples drop out of both sums.
ComplexSeries kzft(const TimeSeries& ts, int m, int k, double f,
                   const KzOptions& options = {});

/// Kolmogorov-Zurbenko periodogram on the grid of step 1/(m * oversample):
///   I(f) = (m / 2 pi) * mean_t |kzft(x - mean)(t)|^2
/// For k = 1 and m = n this equals raw_periodogram on the same grid.
Periodogram kz_periodogram(const TimeSeries& ts, int m, int k,
                           const KzOptions& options = {}, int oversample = 1);

}  // namespace kzp

namespace kzp {

/// Writes `frequency,intensity` or, with half-widths, the extra
/// `window_halfwidth` column.
void save_periodogram_csv(const std::filesystem::path& path,
                          const Periodogram& pg,
                          std::span<const int> half_widths = {});

}  // namespace kzp
