#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace kzp {

/// Time-ordered real samples with an explicit observation mask.
///
/// Missing samples keep whatever value was stored but are never read by any
/// estimator; callers must consult observed(i). Instances are immutable.
class TimeSeries {
 public:
  /// mask[i] != 0 marks sample i as observed. Throws on length mismatch or
  /// empty input.
  TimeSeries(std::vector<double> values, std::vector<std::uint8_t> mask,
             std::int64_t start_index = 1);

  /// All samples observed.
  static TimeSeries complete(std::vector<double> values,
                             std::int64_t start_index = 1);

  std::size_t size() const noexcept { return values_.size(); }
  std::int64_t start_index() const noexcept { return start_; }
  std::int64_t time(std::size_t i) const noexcept {
    return start_ + static_cast<std::int64_t>(i);
  }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const std::uint8_t> mask() const noexcept { return mask_; }
  double value(std::size_t i) const { return values_.at(i); }
  bool observed(std::size_t i) const { return mask_.at(i) != 0; }

  std::size_t n_observed() const noexcept { return n_observed_; }
  bool fully_observed() const noexcept { return n_observed_ == size(); }
  double observed_fraction() const noexcept {
    return static_cast<double>(n_observed_) / static_cast<double>(size());
  }

  TimeSeries with_mask(std::vector<std::uint8_t> mask) const;
  TimeSeries shifted(std::int64_t start_index) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
  std::int64_t start_;
  std::size_t n_observed_;
};

struct SeriesStats {
  std::size_t n_observed = 0;
  double mean = 0.0;
  double variance = 0.0;     // 1/(n-1), observed points only
  double total_power = 0.0;  // mean squared deviation, 1/n
};

/// Throws InsufficientData when fewer than two points are observed.
SeriesStats stats(const TimeSeries& ts);

/// Mean over observed points. Throws InsufficientData on an all-missing series.
double observed_mean(const TimeSeries& ts);

/// Reads `t,value` rows; an empty value field marks a missing sample.
/// A leading `t,value` header is optional.
TimeSeries load_csv(const std::filesystem::path& path);

/// Writes `t,value` rows without header using shortest round-trip formatting.
void save_csv(const TimeSeries& ts, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace kzp
