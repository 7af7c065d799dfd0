#include "kzp/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "kzp/error.hpp"

namespace kzp {

namespace {

std::size_t count_observed(const std::vector<std::uint8_t>& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.begin(), mask.end(), [](auto m) { return m != 0; }));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values,
                       std::vector<std::uint8_t> mask,
                       std::int64_t start_index)
    : values_(std::move(values)), mask_(std::move(mask)), start_(start_index) {
  if (values_.empty()) fail(ErrorCode::Argument, "time series must not be empty");
  if (values_.size() != mask_.size())
    fail(ErrorCode::Argument, "values and mask differ in length");
  for (auto& m : mask_) m = m ? 1 : 0;
  n_observed_ = count_observed(mask_);
}

TimeSeries TimeSeries::complete(std::vector<double> values,
                                std::int64_t start_index) {
  std::vector<std::uint8_t> mask(values.size(), 1);
  return TimeSeries(std::move(values), std::move(mask), start_index);
}

TimeSeries TimeSeries::with_mask(std::vector<std::uint8_t> mask) const {
  return TimeSeries(values_, std::move(mask), start_);
}

TimeSeries TimeSeries::shifted(std::int64_t start_index) const {
  return TimeSeries(values_, mask_, start_index);
}

double observed_mean(const TimeSeries& ts) {
  if (ts.n_observed() == 0)
    fail(ErrorCode::InsufficientData, "series has no observed samples");
  double sum = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts.observed(i)) sum += ts.value(i);
  return sum / static_cast<double>(ts.n_observed());
}

SeriesStats stats(const TimeSeries& ts) {
  const std::size_t n = ts.n_observed();
  if (n < 2)
    fail(ErrorCode::InsufficientData,
         "variance needs at least 2 observed samples, have " + std::to_string(n));
  SeriesStats s;
  s.n_observed = n;
  s.mean = observed_mean(ts);
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!ts.observed(i)) continue;
    const double d = ts.value(i) - s.mean;
    ss += d * d;
  }
  s.variance = ss / static_cast<double>(n - 1);
  s.total_power = ss / static_cast<double>(n);
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

TimeSeries load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());

  std::vector<double> values;
  std::vector<std::uint8_t> mask;
  std::int64_t start = 0;
  std::int64_t previous = 0;
  std::string line;
  std::size_t line_no = 0;
  const auto where = [&] { return path.string() + ":" + std::to_string(line_no); };

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos)
      fail(ErrorCode::Parse, where() + ": expected `t,value`");
    const std::string_view t_text = trim(row.substr(0, comma));
    const std::string_view v_text = trim(row.substr(comma + 1));
    if (v_text.find(',') != std::string_view::npos)
      fail(ErrorCode::Parse, where() + ": too many fields");

    std::int64_t t = 0;
    if (!parse_number(t_text, t)) {
      if (values.empty() && t_text == "t") continue;  // header
      fail(ErrorCode::Parse, where() + ": bad time index `" + std::string(t_text) + "`");
    }
    double v = 0.0;
    const bool present = !v_text.empty();
    if (present && !parse_number(v_text, v))
      fail(ErrorCode::Parse, where() + ": bad value `" + std::string(v_text) + "`");
    if (present && !std::isfinite(v))
      fail(ErrorCode::Parse, where() + ": non-finite value");

    if (values.empty()) {
      start = t;
    } else if (t != previous + 1) {
      fail(ErrorCode::Structure, where() + ": time index " + std::to_string(t) +
                                     " does not follow " + std::to_string(previous));
    }
    previous = t;
    values.push_back(present ? v : 0.0);
    mask.push_back(present ? 1 : 0);
  }
  if (in.bad()) fail(ErrorCode::Io, "read failure on " + path.string());
  if (values.empty()) fail(ErrorCode::Parse, path.string() + ": no data rows");
  return TimeSeries(std::move(values), std::move(mask), start);
}

void save_csv(const TimeSeries& ts, const std::filesystem::path& path) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out << ts.time(i) << ',';
    if (ts.observed(i)) out << format_double(ts.value(i));
    out << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::Io, "cannot write " + path.string());
  file << out.str();
  if (!file) fail(ErrorCode::Io, "write failure on " + path.string());
}

}  // namespace kzp
