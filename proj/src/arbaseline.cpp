#include "kzp/arbaseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "kzp/error.hpp"

namespace kzp {

namespace {

// Biased autocovariances c(0..max_lag); with missing samples each lag is the
// pair average scaled by (n - lag) / n so full data gives the usual 1/n form.
std::vector<double> autocovariance(const TimeSeries& ts, int max_lag) {
  const double mean = observed_mean(ts);
  const std::size_t n = ts.size();
  std::vector<double> c(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int lag = 0; lag <= max_lag; ++lag) {
    const auto l = static_cast<std::size_t>(lag);
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t t = 0; t + l < n; ++t) {
      if (!ts.observed(t) || !ts.observed(t + l)) continue;
      sum += (ts.value(t) - mean) * (ts.value(t + l) - mean);
      ++pairs;
    }
    if (pairs == 0) continue;
    c[l] = sum / static_cast<double>(pairs) *
           static_cast<double>(n - l) / static_cast<double>(n);
  }
  return c;
}

}  // namespace

std::vector<double> acf(const TimeSeries& ts, int max_lag) {
  require(max_lag >= 0, "max_lag must be >= 0");
  if (ts.n_observed() < static_cast<std::size_t>(max_lag) + 2)
    fail(ErrorCode::InsufficientData, "too few observed samples for the requested lags");
  auto c = autocovariance(ts, max_lag);
  if (c[0] == 0.0)
    fail(ErrorCode::InsufficientData, "autocorrelation undefined for a constant series");
  const double c0 = c[0];
  for (auto& v : c) v /= c0;
  c[0] = 1.0;
  return c;
}

int default_max_order(std::size_t n) {
  const int by_length = static_cast<int>(std::floor(10.0 * std::log10(static_cast<double>(n))));
  return std::max(0, std::min(by_length, static_cast<int>(n) - 2));
}

ARModel yule_walker(const TimeSeries& ts, std::optional<int> max_order) {
  if (!ts.fully_observed())
    fail(ErrorCode::Unsupported,
         "autoregression baseline requires a series without missing samples");
  const std::size_t n = ts.size();
  const int p_max = max_order.value_or(default_max_order(n));
  require(p_max >= 0, "max_order must be >= 0");
  if (n < static_cast<std::size_t>(p_max) + 2)
    fail(ErrorCode::InsufficientData, "too few samples for the requested AR order");

  const auto c = autocovariance(ts, p_max);
  if (c[0] == 0.0)
    fail(ErrorCode::InsufficientData, "autoregression undefined for a constant series");

  const double nd = static_cast<double>(n);
  ARModel best;
  best.noise_variance_by_order.push_back(c[0]);
  best.aic_by_order.push_back(nd * std::log(c[0]));
  best.order = 0;
  best.noise_variance = c[0];
  best.aic = best.aic_by_order[0];

  // Levinson-Durbin: phi holds the order-p coefficients.
  std::vector<double> phi;
  double v = c[0];
  bool stationary = true;
  for (int p = 1; p <= p_max; ++p) {
    double acc = c[static_cast<std::size_t>(p)];
    for (int j = 1; j < p; ++j)
      acc -= phi[static_cast<std::size_t>(j - 1)] * c[static_cast<std::size_t>(p - j)];
    const double kappa = acc / v;
    if (!(std::abs(kappa) < 1.0)) stationary = false;
    std::vector<double> next(static_cast<std::size_t>(p));
    for (int j = 1; j < p; ++j)
      next[static_cast<std::size_t>(j - 1)] =
          phi[static_cast<std::size_t>(j - 1)] - kappa * phi[static_cast<std::size_t>(p - j - 1)];
    next[static_cast<std::size_t>(p - 1)] = kappa;
    phi = std::move(next);
    v *= (1.0 - kappa * kappa);
    v = std::max(v, 0.0);

    const double aic = v > 0.0 ? nd * std::log(v) + 2.0 * p
                               : -std::numeric_limits<double>::infinity();
    best.noise_variance_by_order.push_back(v);
    best.aic_by_order.push_back(aic);
    if (aic < best.aic) {
      best.aic = aic;
      best.order = p;
      best.noise_variance = v;
      best.coefficients = phi;
      best.stationary = stationary;
    }
  }
  return best;
}

double unexplained_ratio(const ARModel& model, const TimeSeries& ts) {
  const auto s = stats(ts);
  if (s.variance == 0.0)
    fail(ErrorCode::InsufficientData, "unexplained ratio undefined for zero variance");
  return std::clamp(model.noise_variance / s.variance, 0.0, 1.0);
}

void save_acf_csv(const std::filesystem::path& path,
                  const std::vector<double>& correlations) {
  std::ostringstream out;
  out << "lag,correlation\n";
  for (std::size_t l = 0; l < correlations.size(); ++l)
    out << l << ',' << format_double(correlations[l]) << '\n';
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::Io, "cannot write " + path.string());
  file << out.str();
}

}  // namespace kzp
