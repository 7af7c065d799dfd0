#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kzp/series.hpp"
#include "kzp/spectrum.hpp"

namespace kzp {

enum class SmoothingMethod { DZ, NZ };

SmoothingMethod parse_method(std::string_view name);
std::string_view to_string(SmoothingMethod method);

/// What a DZ window accumulates while it grows.
enum class DzStatistic {
  SumOfSquares,      // sum of I^2 over the window
  FirstDifferences,  // sum of (I_i - I_{i-1})^2 over adjacent pairs
};

struct SmoothedPeriodogram {
  FrequencyGrid grid;
  std::vector<double> smoothed;
  std::vector<int> half_widths;
  SmoothingMethod method = SmoothingMethod::DZ;
  double smooth_level = 0.0;
};

/// Adaptive smoothing of the intensities.
///
/// At every grid index j the window [j-A, j+A] grows from A = 0 until the
/// statistic accumulated over the window reaches smooth_level times its
/// value over the whole grid. Indices outside the grid reflect. A window with
/// 2A+1 >= grid length stops and covers the grid exactly once. The output is
/// the mean intensity over the final window.
///
/// An all-zero input is returned unchanged with zero half-widths.
SmoothedPeriodogram dz_smooth(const Periodogram& pg, double smooth_level,
                              DzStatistic statistic = DzStatistic::SumOfSquares);

/// Same scan on L = log(I + delta), delta = 1e-12 * max(I), with the squared
/// first differences of L as statistic. The mean of L over the final window
/// is mapped back through exp(L) - delta.
SmoothedPeriodogram nz_smooth(const Periodogram& pg, double smooth_level);

/// Indices of strict local maxima (plateaus report their leftmost index).
/// Endpoints of the grid never qualify.
std::vector<std::size_t> local_maxima(std::span<const double> values);

/// Local maxima of the smoothed spectrum ranked by value (ties: lower
/// frequency first), excluding f = 0 and f = 0.5, rounded half-to-even to
/// `digits` decimals and de-duplicated after rounding.
std::vector<double> top_frequencies(const SmoothedPeriodogram& spg, int top,
                                    int digits);

/// Round half to even at `digits` decimal places.
double round_to_digits(double value, int digits);

struct KzpParams {
  int m = 500;
  int k = 3;
  double smooth_level = 0.05;
  SmoothingMethod method = SmoothingMethod::DZ;
  int digits = 3;
  int top = 1;
  int oversample = 1;
  DzStatistic dz_statistic = DzStatistic::SumOfSquares;
  KzOptions kz;

  void validate() const;
};

struct KzpResult {
  std::vector<double> top_frequencies;
  Periodogram raw;  // unsmoothed KZ periodogram
  SmoothedPeriodogram smoothed;
  double total_variance = 0.0;  // raw.mass()
};

/// kz_periodogram, then DZ or NZ smoothing, then top_frequencies.
KzpResult kzp(const TimeSeries& ts, const KzpParams& params);

}  // namespace kzp

namespace kzp {

/// `frequency,raw,smoothed,half_width` on the shared grid.
void save_kzp_spectrum_csv(const std::filesystem::path& path,
                           const KzpResult& result);

/// JSON document with the top frequencies, total variance and parameters.
std::string kzp_summary_json(const KzpResult& result, const KzpParams& params);

}  // namespace kzp
