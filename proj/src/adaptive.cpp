#include "kzp/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kzp/error.hpp"

namespace kzp {

namespace {

struct ScanResult {
  std::vector<int> half_widths;
  std::vector<double> means;  // mean of `avg` over each final window
};

// Grows a reflected window around every index until the accumulated mass
// reaches `level` times the total mass. With `pairwise` the mass lives on
// adjacent pairs: mass[i] belongs to the pair (i-1, i) and mass[0] is unused.
ScanResult adaptive_scan(std::span<const double> avg, std::span<const double> mass,
                         bool pairwise, double level) {
  const std::size_t len = avg.size();
  const auto n = static_cast<std::ptrdiff_t>(len);
  double total = 0.0;
  for (std::size_t i = pairwise ? 1 : 0; i < len; ++i) total += mass[i];
  const double threshold = level * total;

  const auto pair_mass = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
    return mass[std::max(reflect_index(a, len), reflect_index(b, len))];
  };

  ScanResult out;
  out.half_widths.resize(len);
  out.means.resize(len);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const auto centre = static_cast<std::size_t>(j);
    const double base = avg[centre];
    double acc = pairwise ? 0.0 : mass[centre];
    // Deviations from the centre value, so a flat window averages exactly.
    double sum = 0.0;
    std::ptrdiff_t a = 0;
    for (;;) {
      if (2 * a + 1 >= n) {
        sum = 0.0;
        for (double v : avg) sum += v - base;
        sum = base + sum / static_cast<double>(len);
        break;
      }
      if (acc >= threshold) {
        sum = base + sum / static_cast<double>(2 * a + 1);
        break;
      }
      ++a;
      const std::size_t lo = reflect_index(j - a, len);
      const std::size_t hi = reflect_index(j + a, len);
      if (pairwise) {
        acc += pair_mass(j - a, j - a + 1) + pair_mass(j + a - 1, j + a);
      } else {
        acc += mass[lo] + mass[hi];
      }
      sum += (avg[lo] - base) + (avg[hi] - base);
    }
    out.half_widths[centre] = static_cast<int>(a);
    out.means[centre] = sum;
  }
  return out;
}

void check_level(double smooth_level) {
  require(smooth_level > 0.0 && smooth_level < 1.0,
          "smooth_level must lie in (0, 1)");
}

std::vector<double> squared_differences(std::span<const double> v) {
  std::vector<double> d(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) d[i] = (v[i] - v[i - 1]) * (v[i] - v[i - 1]);
  return d;
}

SmoothedPeriodogram unchanged(const Periodogram& pg, SmoothingMethod method,
                              double level) {
  SmoothedPeriodogram out;
  out.grid = pg.grid;
  out.smoothed = pg.intensity;
  out.half_widths.assign(pg.intensity.size(), 0);
  out.method = method;
  out.smooth_level = level;
  return out;
}

}  // namespace

SmoothingMethod parse_method(std::string_view name) {
  if (name == "dz" || name == "DZ") return SmoothingMethod::DZ;
  if (name == "nz" || name == "NZ") return SmoothingMethod::NZ;
  fail(ErrorCode::Argument, "unknown smoothing method `" + std::string(name) + "`");
}

std::string_view to_string(SmoothingMethod method) {
  return method == SmoothingMethod::DZ ? "DZ" : "NZ";
}

SmoothedPeriodogram dz_smooth(const Periodogram& pg, double smooth_level,
                              DzStatistic statistic) {
  check_level(smooth_level);
  require(!pg.intensity.empty(), "periodogram is empty");
  const auto& I = pg.intensity;
  if (std::all_of(I.begin(), I.end(), [](double v) { return v == 0.0; }))
    return unchanged(pg, SmoothingMethod::DZ, smooth_level);

  ScanResult scan;
  if (statistic == DzStatistic::SumOfSquares) {
    std::vector<double> sq(I.size());
    std::transform(I.begin(), I.end(), sq.begin(), [](double v) { return v * v; });
    scan = adaptive_scan(I, sq, false, smooth_level);
  } else {
    scan = adaptive_scan(I, squared_differences(I), true, smooth_level);
  }
  SmoothedPeriodogram out;
  out.grid = pg.grid;
  out.smoothed = std::move(scan.means);
  out.half_widths = std::move(scan.half_widths);
  out.method = SmoothingMethod::DZ;
  out.smooth_level = smooth_level;
  return out;
}

SmoothedPeriodogram nz_smooth(const Periodogram& pg, double smooth_level) {
  check_level(smooth_level);
  require(!pg.intensity.empty(), "periodogram is empty");
  const auto& I = pg.intensity;
  const double peak = *std::max_element(I.begin(), I.end());
  if (peak <= 0.0) return unchanged(pg, SmoothingMethod::NZ, smooth_level);

  const double floor = 1e-12 * peak;
  std::vector<double> L(I.size());
  std::transform(I.begin(), I.end(), L.begin(),
                 [floor](double v) { return std::log(v + floor); });
  const auto scan = adaptive_scan(L, squared_differences(L), true, smooth_level);

  SmoothedPeriodogram out;
  out.grid = pg.grid;
  out.half_widths = scan.half_widths;
  out.smoothed.resize(I.size());
  for (std::size_t j = 0; j < I.size(); ++j) {
    out.smoothed[j] = scan.half_widths[j] == 0
                          ? I[j]
                          : std::max(0.0, std::exp(scan.means[j]) - floor);
  }
  out.method = SmoothingMethod::NZ;
  out.smooth_level = smooth_level;
  return out;
}

std::vector<std::size_t> local_maxima(std::span<const double> v) {
  std::vector<std::size_t> out;
  const std::size_t len = v.size();
  std::size_t i = 1;
  while (i + 1 < len) {
    if (v[i] > v[i - 1]) {
      std::size_t j = i;
      while (j + 1 < len && v[j + 1] == v[i]) ++j;
      if (j + 1 < len && v[j + 1] < v[i]) out.push_back(i);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

double round_to_digits(double value, int digits) {
  require(digits >= 0 && digits <= 15, "digits must lie in [0, 15]");
  const double scale = std::pow(10.0, digits);
  return std::nearbyint(value * scale) / scale;
}

std::vector<double> top_frequencies(const SmoothedPeriodogram& spg, int top,
                                    int digits) {
  require(top >= 1, "top must be >= 1");
  const auto& f = spg.grid.points;
  const auto& s = spg.smoothed;
  require(f.size() == s.size(), "grid and spectrum differ in length");

  std::vector<std::size_t> peaks;
  for (auto i : local_maxima(s))
    if (f[i] > 0.0 && f[i] < 0.5 - 1e-12) peaks.push_back(i);
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });

  std::vector<double> out;
  for (auto i : peaks) {
    const double rounded = round_to_digits(f[i], digits);
    if (std::find(out.begin(), out.end(), rounded) != out.end()) continue;
    out.push_back(rounded);
    if (out.size() == static_cast<std::size_t>(top)) break;
  }
  return out;
}

void KzpParams::validate() const {
  require(m >= 2, "m must be >= 2");
  require(k >= 1, "k must be >= 1");
  check_level(smooth_level);
  require(digits >= 0 && digits <= 15, "digits must lie in [0, 15]");
  require(top >= 1, "top must be >= 1");
  require(oversample >= 1, "oversample must be >= 1");
  require(kz.min_coverage >= 0.0 && kz.min_coverage <= 1.0, "min_coverage must lie in [0, 1]");
}

KzpResult kzp(const TimeSeries& ts, const KzpParams& params) {
  params.validate();
  KzpResult result;
  result.raw = kz_periodogram(ts, params.m, params.k, params.kz, params.oversample);
  result.smoothed = params.method == SmoothingMethod::DZ
                        ? dz_smooth(result.raw, params.smooth_level, params.dz_statistic)
                        : nz_smooth(result.raw, params.smooth_level);
  result.top_frequencies = top_frequencies(result.smoothed, params.top, params.digits);
  result.total_variance = result.raw.mass();
  return result;
}

void save_kzp_spectrum_csv(const std::filesystem::path& path,
                           const KzpResult& result) {
  std::ostringstream out;
  out << "frequency,raw,smoothed,half_width\n";
  const auto& g = result.raw.grid.points;
  for (std::size_t j = 0; j < g.size(); ++j) {
    out << format_double(g[j]) << ',' << format_double(result.raw.intensity[j])
        << ',' << format_double(result.smoothed.smoothed[j]) << ','
        << result.smoothed.half_widths[j] << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::Io, "cannot write " + path.string());
  file << out.str();
}

std::string kzp_summary_json(const KzpResult& result, const KzpParams& params) {
  nlohmann::ordered_json j;
  j["top_frequencies"] = result.top_frequencies;
  j["total_variance"] = result.total_variance;
  j["n_used"] = result.raw.n_used;
  j["grid_step"] = result.raw.grid.step;
  j["parameters"] = {
      {"m", params.m},
      {"k", params.k},
      {"smooth_level", params.smooth_level},
      {"method", std::string(to_string(params.method))},
      {"digits", params.digits},
      {"top", params.top},
      {"oversample", params.oversample},
      {"edge", params.kz.edge == EdgePolicy::Drop ? "drop" : "partial"},
      {"dz_statistic", params.dz_statistic == DzStatistic::SumOfSquares
                           ? "sum_of_squares"
                           : "first_differences"},
  };
  return j.dump(2);
}

}  // namespace kzp
