#include "kzp/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kzp/error.hpp"

namespace kzp {

Reconstruction reconstruct(const TimeSeries& ts, std::span<const double> freqs,
                           int m, int k, const KzOptions& options) {
  require(!freqs.empty(), "reconstruction needs at least one frequency");
  for (double f : freqs)
    require(f > 0.0 && f < 0.5, "reconstruction frequencies must lie in (0, 0.5)");

  const std::size_t n = ts.size();
  std::vector<double> estimate(n, 0.0);
  std::vector<int> hits(n, 0);
  Reconstruction out{TimeSeries::complete({0.0}), {}, 0};

  for (double f : freqs) {
    ComplexSeries c = kzft(ts, m, k, f, options);
    for (std::size_t j = 0; j < c.size(); ++j) {
      const std::int64_t t = c.times[j];
      const auto i = static_cast<std::size_t>(t - ts.start_index());
      // Restore the carrier removed by the demodulation.
      const double cycles = std::fmod(f * static_cast<double>(t), 1.0);
      const auto carrier = std::polar(1.0, 2.0 * std::numbers::pi * cycles);
      estimate[i] += 2.0 * (c.coefficients[j] * carrier).real();
      ++hits[i];
    }
    out.components.emplace_back(f, std::move(c));
  }

  std::vector<std::uint8_t> mask(n, 0);
  const auto want = static_cast<int>(freqs.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (hits[i] == want) {
      mask[i] = 1;
    } else {
      estimate[i] = 0.0;
    }
  }
  std::size_t lead = 0;
  while (lead < n && !mask[lead]) ++lead;
  std::size_t trail = 0;
  while (trail < n - lead && !mask[n - 1 - trail]) ++trail;
  out.warmup = lead + trail;
  out.estimate = TimeSeries(std::move(estimate), std::move(mask), ts.start_index());
  return out;
}

FitMetrics fit_metrics(const TimeSeries& truth, const TimeSeries& estimate) {
  require(truth.size() == estimate.size(), "series lengths differ");
  double mx = 0.0, my = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!truth.observed(i) || !estimate.observed(i)) continue;
    mx += truth.value(i);
    my += estimate.value(i);
    ++n;
  }
  if (n < 3)
    fail(ErrorCode::InsufficientData,
         "correlation needs at least 3 jointly observed samples, have " +
             std::to_string(n));
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!truth.observed(i) || !estimate.observed(i)) continue;
    const double dx = truth.value(i) - mx;
    const double dy = estimate.value(i) - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    fail(ErrorCode::InsufficientData, "correlation undefined for a constant series");
  FitMetrics fm;
  fm.n_scored = n;
  fm.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  fm.r_squared = fm.r * fm.r;
  return fm;
}

void save_reconstruction_csv(const std::filesystem::path& path,
                             const std::optional<TimeSeries>& truth,
                             const TimeSeries& observed,
                             const TimeSeries& estimate) {
  require(observed.size() == estimate.size(), "series lengths differ");
  require(!truth || truth->size() == observed.size(), "series lengths differ");
  const auto cell = [](const TimeSeries& s, std::size_t i) {
    return s.observed(i) ? format_double(s.value(i)) : std::string();
  };
  std::ostringstream out;
  out << "t,truth,observed,estimate\n";
  for (std::size_t i = 0; i < observed.size(); ++i) {
    out << observed.time(i) << ',' << (truth ? cell(*truth, i) : std::string())
        << ',' << cell(observed, i) << ',' << cell(estimate, i) << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::Io, "cannot write " + path.string());
  file << out.str();
}

}  // namespace kzp
