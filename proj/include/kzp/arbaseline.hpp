#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "kzp/series.hpp"

namespace kzp {

struct ARModel {
  int order = 0;
  std::vector<double> coefficients;
  double noise_variance = 0.0;
  double aic = 0.0;
  bool stationary = true;  // every reflection coefficient inside (-1, 1)
  // Innovation variance and AIC for orders 0..max_order of the same run.
  std::vector<double> noise_variance_by_order;
  std::vector<double> aic_by_order;
};

/// Sample autocorrelations at lags 0..max_lag over jointly observed pairs.
std::vector<double> acf(const TimeSeries& ts, int max_lag);

/// floor(10 log10 n), capped at n - 2.
int default_max_order(std::size_t n);

/// Yule-Walker fit by Levinson-Durbin on the de-meaned series, order chosen
/// by AIC = n log(sigma^2) + 2p over 0..max_order. Requires a fully observed
/// series.
ARModel yule_walker(const TimeSeries& ts,
                    std::optional<int> max_order = std::nullopt);

/// Innovation variance over sample variance, clamped to [0, 1].
double unexplained_ratio(const ARModel& model, const TimeSeries& ts);

void save_acf_csv(const std::filesystem::path& path,
                  const std::vector<double>& correlations);

}  // namespace kzp
