#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "kzp/series.hpp"
#include "kzp/spectrum.hpp"

namespace kzp {

struct Reconstruction {
  TimeSeries estimate;
  std::vector<std::pair<double, ComplexSeries>> components;
  std::size_t warmup = 0;  // masked edge samples, leading plus trailing
};

/// estimate(t) = sum_f 2 Re(kzft(ts, m, k, f)(t) * exp(i 2 pi f t)).
/// Times without a coefficient are masked in the estimate.
Reconstruction reconstruct(const TimeSeries& ts, std::span<const double> freqs,
                           int m, int k, const KzOptions& options = {});

struct FitMetrics {
  double r = 0.0;
  double r_squared = 0.0;
  std::size_t n_scored = 0;
};

/// Pearson correlation over the times observed in both series.
FitMetrics fit_metrics(const TimeSeries& truth, const TimeSeries& estimate);

/// Writes `t,truth,observed,estimate`; missing cells are left empty. Without a
/// truth series that column is empty throughout.
void save_reconstruction_csv(const std::filesystem::path& path,
                             const std::optional<TimeSeries>& truth,
                             const TimeSeries& observed,
                             const TimeSeries& estimate);

}  // namespace kzp
