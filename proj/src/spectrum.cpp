#include "kzp/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kzp/error.hpp"

namespace kzp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(-i 2 pi f t) for consecutive t, by rotation with an exact re-anchor every
// kAnchor steps.
class Phasor {
 public:
  Phasor(double f, std::int64_t t0) : f_(f), t_(t0) {
    step_ = std::polar(1.0, -kTwoPi * f);
    anchor();
  }

  std::complex<double> value() const { return current_; }

  void advance() {
    ++t_;
    if (++since_anchor_ == kAnchor) {
      anchor();
    } else {
      current_ *= step_;
    }
  }

 private:
  static constexpr int kAnchor = 64;

  void anchor() {
    const double cycles = std::fmod(f_ * static_cast<double>(t_), 1.0);
    current_ = std::polar(1.0, -kTwoPi * cycles);
    since_anchor_ = 0;
  }

  double f_;
  std::int64_t t_;
  std::complex<double> step_;
  std::complex<double> current_;
  int since_anchor_ = 0;
};

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double window_shape(WindowForm form, double x) {
  const double ax = std::abs(x);
  switch (form) {
    case WindowForm::Uniform:
      return 1.0;
    case WindowForm::Bartlett:
      return 1.0 - ax;
    case WindowForm::Gaussian:
      // Truncated at three standard deviations at the window edge.
      return std::exp(-0.5 * (3.0 * x) * (3.0 * x));
    case WindowForm::Parzen:
      return ax <= 0.5 ? 1.0 - 6.0 * ax * ax + 6.0 * ax * ax * ax
                       : 2.0 * (1.0 - ax) * (1.0 - ax) * (1.0 - ax);
    case WindowForm::TukeyHamming:
      return 0.54 + 0.46 * std::cos(std::numbers::pi * x);
  }
  fail(ErrorCode::Argument, "unknown window form");
}

// One pass of the length-m moving average, valid mode (output shrinks by m-1).
template <typename T>
void moving_average(std::vector<T>& data, int m) {
  const std::size_t len = data.size();
  const auto w = static_cast<std::size_t>(m);
  const std::size_t out_len = len - w + 1;
  const double scale = 1.0 / m;
  T running{};
  for (std::size_t i = 0; i < w; ++i) running += data[i];
  std::vector<T> out(out_len);
  out[0] = running * scale;
  for (std::size_t i = 1; i < out_len; ++i) {
    running += data[i + w - 1] - data[i - 1];
    out[i] = running * scale;
  }
  data = std::move(out);
}

// Frequency-independent part of a KZFT: where coefficients exist and how much
// observed kernel mass backs each of them.
struct KzPlan {
  int m = 0;
  int k = 0;
  std::size_t pad_left = 0;
  std::size_t pad_right = 0;
  std::vector<std::size_t> series_index;  // per valid output
  std::vector<std::size_t> output_index;  // position in the pass output
  std::vector<double> coverage;           // per valid output
};

KzPlan make_plan(const TimeSeries& ts, int m, int k, const KzOptions& options) {
  require(m >= 2, "KZFT window width m must be >= 2");
  require(k >= 1, "KZFT iterations k must be >= 1");
  require(options.min_coverage >= 0.0 && options.min_coverage <= 1.0,
          "min_coverage must lie in [0, 1]");
  const std::size_t support = kz_support(m, k);
  const std::size_t span = support - 1;

  KzPlan plan;
  plan.m = m;
  plan.k = k;
  std::size_t centre = span / 2;
  if (options.edge == EdgePolicy::Drop) {
    if (ts.size() < support)
      fail(ErrorCode::InsufficientData,
           "series of length " + std::to_string(ts.size()) +
               " is shorter than the KZ window support " + std::to_string(support));
  } else {
    plan.pad_left = centre;
    plan.pad_right = span - centre;
    centre = 0;
  }

  std::vector<double> weight(plan.pad_left + ts.size() + plan.pad_right, 0.0);
  for (std::size_t i = 0; i < ts.size(); ++i)
    weight[plan.pad_left + i] = ts.observed(i) ? 1.0 : 0.0;
  for (int pass = 0; pass < k; ++pass) moving_average(weight, m);

  const double threshold = options.min_coverage * ts.observed_fraction();
  for (std::size_t i = 0; i < weight.size(); ++i) {
    const double c = weight[i];
    if (c > 0.0 && c >= threshold * (1.0 - 1e-9)) {
      plan.output_index.push_back(i);
      plan.series_index.push_back(i + centre);
      plan.coverage.push_back(c);
    }
  }
  if (plan.output_index.empty())
    fail(ErrorCode::InsufficientData,
         "no time has enough observed kernel mass for a KZFT coefficient");
  return plan;
}

std::vector<std::complex<double>> apply_plan(const KzPlan& plan,
                                             const TimeSeries& ts, double f) {
  std::vector<std::complex<double>> data(
      plan.pad_left + ts.size() + plan.pad_right);
  Phasor phasor(f, ts.start_index());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts.observed(i)) data[plan.pad_left + i] = ts.value(i) * phasor.value();
    phasor.advance();
  }
  for (int pass = 0; pass < plan.k; ++pass) moving_average(data, plan.m);

  std::vector<std::complex<double>> out(plan.output_index.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = data[plan.output_index[j]] / plan.coverage[j];
  return out;
}

}  // namespace

FrequencyGrid FrequencyGrid::half_band(double step) {
  require(step > 0.0 && step <= 0.5, "grid step must lie in (0, 0.5]");
  const auto last = static_cast<std::size_t>(std::floor(0.5 / step + 1e-9));
  return uniform(0.0, step, last + 1);
}

FrequencyGrid FrequencyGrid::uniform(double start, double step, std::size_t count) {
  require(step > 0.0, "grid step must be positive");
  require(start >= 0.0, "grid start must be >= 0");
  FrequencyGrid g;
  g.step = step;
  g.points.reserve(count);
  for (std::size_t j = 0; j < count; ++j)
    g.points.push_back(start + static_cast<double>(j) * step);
  require(count == 0 || g.points.back() <= 0.5 + 1e-12,
          "grid frequencies must not exceed 0.5");
  return g;
}

double Periodogram::mass() const {
  CompensatedSum s;
  for (double v : intensity) s.add(v);
  return s.value() * grid.step;
}

WindowForm parse_window_form(std::string_view name) {
  if (name == "uniform") return WindowForm::Uniform;
  if (name == "bartlett") return WindowForm::Bartlett;
  if (name == "gaussian") return WindowForm::Gaussian;
  if (name == "parzen") return WindowForm::Parzen;
  if (name == "tukey_hamming" || name == "tukey-hamming")
    return WindowForm::TukeyHamming;
  fail(ErrorCode::Argument, "unknown window form `" + std::string(name) + "`");
}

std::string_view to_string(WindowForm form) {
  switch (form) {
    case WindowForm::Uniform: return "uniform";
    case WindowForm::Bartlett: return "bartlett";
    case WindowForm::Gaussian: return "gaussian";
    case WindowForm::Parzen: return "parzen";
    case WindowForm::TukeyHamming: return "tukey_hamming";
  }
  return "unknown";
}

Periodogram raw_periodogram(const TimeSeries& ts, const FrequencyGrid& grid) {
  if (grid.points.empty()) fail(ErrorCode::Argument, "frequency grid is empty");
  const std::size_t n_obs = ts.n_observed();
  if (n_obs < 2)
    fail(ErrorCode::InsufficientData, "periodogram needs at least 2 observed samples");
  const double mean = observed_mean(ts);
  const double norm = 1.0 / (kTwoPi * static_cast<double>(n_obs));

  Periodogram pg;
  pg.grid = grid;
  pg.n_used = n_obs;
  pg.intensity.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CompensatedSum re, im;
    Phasor phasor(grid.points[j], ts.start_index());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (ts.observed(i)) {
        const double d = ts.value(i) - mean;
        const auto z = phasor.value();
        re.add(d * z.real());
        im.add(d * z.imag());
      }
      phasor.advance();
    }
    const double r = re.value();
    const double q = im.value();
    pg.intensity[j] = (r * r + q * q) * norm;
  }
  return pg;
}

std::vector<double> window_weights(WindowForm form, int half_width) {
  require(half_width >= 0, "window half-width must be >= 0");
  const auto a = static_cast<std::size_t>(half_width);
  std::vector<double> w(2 * a + 1);
  double total = 0.0;
  for (std::size_t i = 0; i <= 2 * a; ++i) {
    const double offset = static_cast<double>(i) - static_cast<double>(a);
    w[i] = window_shape(form, offset / static_cast<double>(a + 1));
    total += w[i];
  }
  for (auto& v : w) v /= total;
  // Exact symmetry regardless of rounding in the shape functions.
  for (std::size_t i = 0; i < a; ++i) w[2 * a - i] = w[i];
  return w;
}

std::size_t reflect_index(std::ptrdiff_t i, std::size_t len) {
  if (len <= 1) return 0;
  const auto last = static_cast<std::ptrdiff_t>(len - 1);
  const std::ptrdiff_t period = 2 * last;
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i <= last ? i : period - i);
}

Periodogram smooth_fixed(const Periodogram& pg, WindowForm form, int half_width) {
  const std::size_t len = pg.intensity.size();
  require(half_width >= 0 && static_cast<std::size_t>(half_width) < std::max<std::size_t>(len, 1),
          "window half-width must be smaller than the grid length");
  const auto w = window_weights(form, half_width);
  Periodogram out = pg;
  for (std::size_t j = 0; j < len; ++j) {
    double acc = 0.0;
    for (int s = -half_width; s <= half_width; ++s) {
      const auto idx = reflect_index(static_cast<std::ptrdiff_t>(j) + s, len);
      acc += w[static_cast<std::size_t>(s + half_width)] * pg.intensity[idx];
    }
    out.intensity[j] = acc;
  }
  return out;
}

std::size_t kz_support(int m, int k) {
  require(m >= 1 && k >= 1, "KZ window needs m >= 1 and k >= 1");
  return static_cast<std::size_t>(k) * static_cast<std::size_t>(m - 1) + 1;
}

std::vector<double> kz_weights(int m, int k) {
  const std::size_t support = kz_support(m, k);
  std::vector<double> a(support, 0.0);
  a[0] = 1.0;
  std::size_t filled = 1;
  for (int pass = 0; pass < k; ++pass) {
    std::vector<double> next(support, 0.0);
    for (std::size_t i = 0; i < filled; ++i)
      for (int j = 0; j < m; ++j) next[i + static_cast<std::size_t>(j)] += a[i] / m;
    filled += static_cast<std::size_t>(m - 1);
    a = std::move(next);
  }
  return a;
}

ComplexSeries kzft(const TimeSeries& ts, int m, int k, double f,
                   const KzOptions& options) {
  require(f >= 0.0 && f <= 0.5, "KZFT frequency must lie in [0, 0.5]");
  const KzPlan plan = make_plan(ts, m, k, options);
  ComplexSeries out;
  out.coefficients = apply_plan(plan, ts, f);
  out.times.reserve(plan.series_index.size());
  for (auto i : plan.series_index) out.times.push_back(ts.time(i));
  return out;
}

Periodogram kz_periodogram(const TimeSeries& ts, int m, int k,
                           const KzOptions& options, int oversample) {
  require(oversample >= 1, "oversample factor must be >= 1");
  if (ts.n_observed() < 2)
    fail(ErrorCode::InsufficientData, "periodogram needs at least 2 observed samples");
  const double mean = observed_mean(ts);
  std::vector<double> centred(ts.values().begin(), ts.values().end());
  for (std::size_t i = 0; i < centred.size(); ++i)
    centred[i] = ts.observed(i) ? centred[i] - mean : 0.0;
  const TimeSeries x(std::move(centred),
                     std::vector<std::uint8_t>(ts.mask().begin(), ts.mask().end()),
                     ts.start_index());

  const KzPlan plan = make_plan(x, m, k, options);
  Periodogram pg;
  pg.grid = FrequencyGrid::half_band(1.0 / (static_cast<double>(m) * oversample));
  pg.n_used = ts.n_observed();
  pg.intensity.resize(pg.grid.size());
  const double scale = static_cast<double>(m) / kTwoPi;
  for (std::size_t j = 0; j < pg.grid.size(); ++j) {
    const auto coeffs = apply_plan(plan, x, pg.grid.points[j]);
    CompensatedSum power;
    for (const auto& c : coeffs) power.add(std::norm(c));
    pg.intensity[j] = scale * power.value() / static_cast<double>(coeffs.size());
  }
  return pg;
}

void save_periodogram_csv(const std::filesystem::path& path,
                          const Periodogram& pg, std::span<const int> half_widths) {
  const bool with_widths = !half_widths.empty();
  if (with_widths && half_widths.size() != pg.intensity.size())
    fail(ErrorCode::Argument, "half-width count does not match the grid");
  std::ostringstream out;
  out << "frequency,intensity" << (with_widths ? ",window_halfwidth" : "") << '\n';
  for (std::size_t j = 0; j < pg.intensity.size(); ++j) {
    out << format_double(pg.grid.points[j]) << ',' << format_double(pg.intensity[j]);
    if (with_widths) out << ',' << half_widths[j];
    out << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::Io, "cannot write " + path.string());
  file << out.str();
}

}  // namespace kzp
