#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "kzp/adaptive.hpp"
#include "kzp/simulate.hpp"
#include "support/errors.hpp"
#include "support/property.hpp"
#include "support/tempdir.hpp"

using namespace kzp;
using kzp::testing::code_of;
using kzp::testing::for_all;
using kzp::testing::Gen;

namespace {

Periodogram make_pg(std::vector<double> intensity) {
  Periodogram pg;
  const std::size_t len = intensity.size();
  pg.grid = FrequencyGrid::uniform(0.0, len > 1 ? 0.5 / static_cast<double>(len - 1) : 0.5, len);
  pg.intensity = std::move(intensity);
  return pg;
}

std::size_t mirror(std::ptrdiff_t i, std::size_t len) {
  const auto n = static_cast<std::ptrdiff_t>(len);
  if (i < 0) i = -i;
  if (i >= n) i = 2 * (n - 1) - i;
  return static_cast<std::size_t>(i);
}

// Window growth recomputed from scratch for every candidate width. Returns
// the half-width and mean, or a negative half-width when the stopping test
// is too close to call in floating point.
std::pair<int, double> brute_force_window(const std::vector<double>& I, std::size_t j,
                                          double level, DzStatistic stat) {
  const std::size_t len = I.size();
  long double total = 0;
  if (stat == DzStatistic::SumOfSquares) {
    for (double v : I) total += static_cast<long double>(v) * v;
  } else {
    for (std::size_t i = 1; i < len; ++i) total += std::pow(static_cast<long double>(I[i]) - I[i - 1], 2);
  }
  const long double threshold = level * total;
  for (int a = 0;; ++a) {
    if (2 * static_cast<std::size_t>(a) + 1 >= len) {
      long double mean = 0;
      for (double v : I) mean += v;
      return {a, static_cast<double>(mean / len)};
    }
    long double acc = 0, sum = 0;
    const auto c = static_cast<std::ptrdiff_t>(j);
    for (std::ptrdiff_t i = c - a; i <= c + a; ++i) {
      sum += I[mirror(i, len)];
      if (stat == DzStatistic::SumOfSquares) {
        acc += static_cast<long double>(I[mirror(i, len)]) * I[mirror(i, len)];
      } else if (i > c - a) {
        acc += std::pow(static_cast<long double>(I[mirror(i, len)]) - I[mirror(i - 1, len)], 2);
      }
    }
    if (std::fabs(acc - threshold) <= 1e-9 * total) return {-1, 0.0};
    if (acc >= threshold) return {a, static_cast<double>(sum / (2 * a + 1))};
  }
}

}  // namespace

TEST(DzSmooth, ConstantSpectrumGrowsToTheClosedFormWidth) {
  // Sum of squares over 2A+1 equal ordinates reaches s * L * c^2 at the
  // smallest A with (2A+1) / L >= s.
  const auto pg = make_pg(std::vector<double>(101, 4.0));
  const auto s = dz_smooth(pg, 0.05);
  for (std::size_t j = 0; j < 101; ++j) {
    EXPECT_EQ(s.half_widths[j], 3) << j;
    EXPECT_DOUBLE_EQ(s.smoothed[j], 4.0);
  }
  const auto wide = dz_smooth(pg, 0.5);
  EXPECT_EQ(wide.half_widths[50], 25);
}

TEST(DzSmooth, IsolatedSpikeKeepsItsHeightAndSpreadsToNeighbours) {
  std::vector<double> I(201, 0.0);
  I[100] = 9.0;
  const auto s = dz_smooth(make_pg(I), 0.05);
  EXPECT_EQ(s.half_widths[100], 0);
  EXPECT_EQ(s.smoothed[100], 9.0);
  for (int d = 1; d <= 50; ++d) {
    EXPECT_EQ(s.half_widths[100 + d], d);
    EXPECT_NEAR(s.smoothed[100 - d], 9.0 / (2 * d + 1), 1e-14);
  }
}

TEST(DzSmooth, AllZeroInputIsReturnedUnchanged) {
  const auto s = dz_smooth(make_pg(std::vector<double>(30, 0.0)), 0.05);
  for (std::size_t j = 0; j < 30; ++j) {
    EXPECT_EQ(s.smoothed[j], 0.0);
    EXPECT_EQ(s.half_widths[j], 0);
  }
}

TEST(DzSmooth, LevelNearOneFlattensToTheGridMean) {
  for_all(300, 10000, [](Gen& g) {
    const auto len = static_cast<std::size_t>(g.integer(3, 100));
    std::vector<double> I(len);
    for (auto& v : I) v = g.uniform(1.0, 1.01);
    const double mean = std::accumulate(I.begin(), I.end(), 0.0) / static_cast<double>(len);
    const auto s = dz_smooth(make_pg(I), 0.999999);
    for (double v : s.smoothed) ASSERT_NEAR(v, mean, 1e-12);
  });
}

TEST(DzSmooth, RejectsLevelsOutsideTheUnitInterval) {
  const auto pg = make_pg({1, 2, 3});
  EXPECT_EQ(code_of([&] { dz_smooth(pg, 0.0); }), ErrorCode::Argument);
  EXPECT_EQ(code_of([&] { dz_smooth(pg, 1.0); }), ErrorCode::Argument);
  EXPECT_EQ(code_of([&] { nz_smooth(pg, -0.5); }), ErrorCode::Argument);
  EXPECT_EQ(code_of([&] { dz_smooth(Periodogram{}, 0.1); }), ErrorCode::Argument);
}

TEST(DzSmooth, MatchesBruteForceWindowSearch) {
  for_all(1000, 11000, [](Gen& g) {
    const auto len = static_cast<std::size_t>(g.integer(1, 80));
    std::vector<double> I(len);
    for (auto& v : I) v = g.coin(0.1) ? g.uniform(0, 100) : g.uniform(0, 1);
    const double level = g.uniform(0.001, 0.999);
    const auto stat = g.coin() ? DzStatistic::SumOfSquares : DzStatistic::FirstDifferences;
    const auto s = dz_smooth(make_pg(I), level, stat);
    for (std::size_t j = 0; j < len; ++j) {
      const auto [a, mean] = brute_force_window(I, j, level, stat);
      if (a < 0) continue;
      ASSERT_EQ(s.half_widths[j], a) << "j=" << j;
      ASSERT_NEAR(s.smoothed[j], mean, 1e-12 * (1 + std::fabs(mean))) << "j=" << j;
    }
  });
}

TEST(DzSmooth, WidthsGrowWithTheLevel) {
  for_all(1000, 12000, [](Gen& g) {
    const auto len = static_cast<std::size_t>(g.integer(2, 120));
    std::vector<double> I(len);
    for (auto& v : I) v = std::pow(g.uniform(0, 3), 4);
    const double lo = g.uniform(0.001, 0.998);
    const double hi = g.uniform(lo, 0.999);
    const auto stat = g.coin() ? DzStatistic::SumOfSquares : DzStatistic::FirstDifferences;
    const auto a = dz_smooth(make_pg(I), lo, stat);
    const auto b = dz_smooth(make_pg(I), hi, stat);
    for (std::size_t j = 0; j < len; ++j) ASSERT_LE(a.half_widths[j], b.half_widths[j]) << j;
  });
}

TEST(DzSmooth, OutputStaysWithinTheInputRange) {
  for_all(1000, 13000, [](Gen& g) {
    const auto len = static_cast<std::size_t>(g.integer(1, 120));
    std::vector<double> I(len);
    for (auto& v : I) v = g.uniform(0, g.coin() ? 1e-6 : 1e6);
    const auto [lo, hi] = std::minmax_element(I.begin(), I.end());
    const auto stat = g.coin() ? DzStatistic::SumOfSquares : DzStatistic::FirstDifferences;
    const auto s = dz_smooth(make_pg(I), g.uniform(0.001, 0.999), stat);
    const double slack = 1e-12 * *hi;
    for (std::size_t j = 0; j < len; ++j) {
      ASSERT_GE(s.smoothed[j], *lo - slack);
      ASSERT_LE(s.smoothed[j], *hi + slack);
      ASSERT_GE(s.half_widths[j], 0);
      ASSERT_LE(2 * static_cast<std::size_t>(s.half_widths[j]) + 1, 2 * len + 1);
    }
  });
}

TEST(DzSmooth, DominantPeakKeepsItsLocation) {
  for_all(1000, 14000, [](Gen& g) {
    const auto len = static_cast<std::size_t>(g.integer(5, 300));
    std::vector<double> I(len);
    for (auto& v : I) v = g.uniform(0, 1);
    const auto p = static_cast<std::size_t>(g.integer(1, static_cast<int>(len) - 2));
    I[p] = 10 * std::sqrt(static_cast<double>(len)) * g.uniform(1, 5);
    const auto s = dz_smooth(make_pg(I), g.uniform(0.001, 0.5));
    ASSERT_EQ(std::max_element(s.smoothed.begin(), s.smoothed.end()) - s.smoothed.begin(),
              static_cast<std::ptrdiff_t>(p));
  });
}

TEST(NzSmooth, ConstantSpectrumIsUnchanged) {
  const auto s = nz_smooth(make_pg(std::vector<double>(40, 2.5)), 0.05);
  for (std::size_t j = 0; j < 40; ++j) {
    EXPECT_EQ(s.half_widths[j], 0);
    EXPECT_EQ(s.smoothed[j], 2.5);
  }
}

TEST(NzSmooth, AgreesWithDzOnConstantSpectra) {
  for_all(1000, 18000, [](Gen& g) {
    const auto len = static_cast<std::size_t>(g.integer(1, 200));
    const auto pg = make_pg(std::vector<double>(len, std::exp(g.uniform(-20, 20))));
    const double level = g.uniform(0.001, 0.999);
    ASSERT_EQ(nz_smooth(pg, level).smoothed, dz_smooth(pg, level).smoothed);
  });
}

TEST(NzSmooth, FlatLogSpectrumSmoothsTowardsTheGeometricMean) {
  // Alternating 1, 4: every adjacent pair carries the same log difference,
  // so windows grow to the closed-form width and average log I.
  std::vector<double> I(101);
  for (std::size_t i = 0; i < I.size(); ++i) I[i] = i % 2 ? 4.0 : 1.0;
  const auto s = nz_smooth(make_pg(I), 0.1);
  // Pairs inside a window: 2A; total pairs: 100. Smallest A with 2A >= 10.
  EXPECT_EQ(s.half_widths[50], 5);
  const double expected = std::exp((5 * std::log(1.0) + 6 * std::log(4.0)) / 11);
  EXPECT_NEAR(s.smoothed[50], expected, 1e-9);
}

TEST(NzSmooth, HalfWidthsAreScaleInvariant) {
  for_all(1000, 15000, [](Gen& g) {
    const auto len = static_cast<std::size_t>(g.integer(2, 100));
    std::vector<double> I(len);
    for (auto& v : I) v = std::exp(g.uniform(-5, 5));
    const double scale = std::ldexp(1.0, g.integer(-30, 30));
    auto J = I;
    for (auto& v : J) v *= scale;
    const double level = g.uniform(0.01, 0.99);
    const auto a = nz_smooth(make_pg(I), level);
    const auto b = nz_smooth(make_pg(J), level);
    for (std::size_t j = 0; j < len; ++j) {
      ASSERT_EQ(a.half_widths[j], b.half_widths[j]) << j;
      ASSERT_NEAR(b.smoothed[j], scale * a.smoothed[j], 1e-9 * scale * a.smoothed[j]) << j;
    }
  });
}

TEST(NzSmooth, OutputStaysPositiveAndBounded) {
  for_all(1000, 16000, [](Gen& g) {
    const auto len = static_cast<std::size_t>(g.integer(1, 100));
    std::vector<double> I(len);
    for (auto& v : I) v = g.coin(0.05) ? 0.0 : std::exp(g.uniform(-10, 10));
    const auto [lo, hi] = std::minmax_element(I.begin(), I.end());
    const auto s = nz_smooth(make_pg(I), g.uniform(0.001, 0.999));
    for (double v : s.smoothed) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, *hi * (1 + 1e-9));
      if (*lo > 0) { ASSERT_GE(v, *lo * (1 - 1e-9)); }
    }
  });
}

TEST(LocalMaxima, Examples) {
  using V = std::vector<double>;
  using R = std::vector<std::size_t>;
  EXPECT_EQ(local_maxima(V{1, 3, 2, 5, 4}), (R{1, 3}));
  EXPECT_EQ(local_maxima(V{0, 2, 2, 1}), (R{1}));
  EXPECT_EQ(local_maxima(V{0, 2, 2}), R{});
  EXPECT_EQ(local_maxima(V{1, 2, 3, 4}), R{});
  EXPECT_EQ(local_maxima(V{4, 3, 2, 1}), R{});
  EXPECT_EQ(local_maxima(V{5}), R{});
  EXPECT_EQ(local_maxima(V{1, 1, 1}), R{});
}

TEST(LocalMaxima, EveryReportedIndexIsAStrictPeakOrPlateauStart) {
  for_all(1000, 17000, [](Gen& g) {
    const auto len = static_cast<std::size_t>(g.integer(0, 60));
    std::vector<double> v(len);
    for (auto& x : v) x = g.integer(0, 4);
    const auto peaks = local_maxima(v);
    // Reference: collapse plateaus, then look for strict up-down patterns.
    std::vector<std::size_t> expected;
    for (std::size_t i = 1; i + 1 < len; ++i) {
      if (!(v[i] > v[i - 1])) continue;
      std::size_t j = i;
      while (j + 1 < len && v[j + 1] == v[i]) ++j;
      if (j + 1 < len && v[j + 1] < v[i]) expected.push_back(i);
    }
    ASSERT_EQ(peaks, expected);
  });
}

TEST(TopFrequencies, RanksPeaksByHeight) {
  SmoothedPeriodogram s;
  s.grid = FrequencyGrid::half_band(0.1);
  s.smoothed = {0, 3, 2, 5, 4, 1};
  EXPECT_EQ(top_frequencies(s, 1, 3), (std::vector<double>{0.3}));
  EXPECT_EQ(top_frequencies(s, 5, 3), (std::vector<double>{0.3, 0.1}));
}

TEST(TopFrequencies, EndpointsNeverQualify) {
  SmoothedPeriodogram s;
  s.grid = FrequencyGrid::half_band(0.125);
  s.smoothed = {1, 0, 0, 0, 7};
  EXPECT_TRUE(top_frequencies(s, 3, 3).empty());
}

TEST(TopFrequencies, TiesFavourLowerFrequencyAndRoundingDeduplicates) {
  SmoothedPeriodogram s;
  s.grid = FrequencyGrid::half_band(0.001);
  s.smoothed.assign(s.grid.size(), 0.0);
  s.smoothed[101] = 5;
  s.smoothed[104] = 6;
  s.smoothed[300] = 5;
  s.smoothed[200] = 5;
  EXPECT_EQ(top_frequencies(s, 3, 2), (std::vector<double>{0.1, 0.2, 0.3}));
  EXPECT_EQ(top_frequencies(s, 4, 3), (std::vector<double>{0.104, 0.101, 0.2, 0.3}));
  EXPECT_EQ(code_of([&] { top_frequencies(s, 0, 3); }), ErrorCode::Argument);
}

TEST(RoundToDigits, HalfToEven) {
  EXPECT_EQ(round_to_digits(0.125, 2), 0.12);
  EXPECT_EQ(round_to_digits(0.375, 2), 0.38);
  EXPECT_EQ(round_to_digits(2.5, 0), 2.0);
  EXPECT_EQ(round_to_digits(3.5, 0), 4.0);
  EXPECT_EQ(round_to_digits(0.0984, 3), 0.098);
  EXPECT_EQ(code_of([] { round_to_digits(1.0, -1); }), ErrorCode::Argument);
  EXPECT_EQ(code_of([] { round_to_digits(1.0, 16); }), ErrorCode::Argument);
}

TEST(Kzp, NoiselessToneIsFoundExactly) {
  SignalSpec spec;
  spec.n = 2000;
  spec.components = {{.frequency = 0.25, .amplitude = 1.0}};
  spec.noise_sigma = 0.0;
  KzpParams dz;
  dz.m = 100;
  const auto r = kzp::kzp(generate(spec), dz);
  EXPECT_EQ(r.top_frequencies, (std::vector<double>{0.25}));
  EXPECT_EQ(r.smoothed.half_widths[25], 0);
  EXPECT_EQ(r.total_variance, r.raw.mass());
}

TEST(Kzp, BothMethodsFindAToneInLightNoise) {
  // Without any noise the log spectrum is a lone spike over round-off, and
  // the NZ window around it averages the spike away.
  SignalSpec spec;
  spec.n = 2000;
  spec.components = {{.frequency = 0.25, .amplitude = 1.0}};
  spec.noise_sigma = 0.1;
  spec.seed = 4;
  KzpParams p;
  p.m = 100;
  for (auto method : {SmoothingMethod::DZ, SmoothingMethod::NZ}) {
    p.method = method;
    const auto r = kzp::kzp(generate(spec), p);
    EXPECT_EQ(r.top_frequencies, (std::vector<double>{0.25}));
  }
}

TEST(Kzp, TonesTwoGridStepsApartStayResolved) {
  // Noiseless equal amplitudes on the 1/m grid: two steps apart leaves a null
  // between the peaks, one step apart merges them into a single maximum.
  auto maxima_near = [](double f1, double f2) {
    SignalSpec spec;
    spec.n = 5000;
    spec.components = {{.frequency = f1, .amplitude = 1.0}, {.frequency = f2, .amplitude = 1.0, .phase = 0.7}};
    KzpParams p;
    p.top = 5;
    const auto r = kzp::kzp(generate(spec), p);
    const double peak = *std::max_element(r.smoothed.smoothed.begin(), r.smoothed.smoothed.end());
    std::vector<double> found;
    for (auto i : local_maxima(r.smoothed.smoothed))
      if (r.smoothed.smoothed[i] > 0.01 * peak) found.push_back(round_to_digits(r.smoothed.grid.points[i], 3));
    return found;
  };
  EXPECT_EQ(maxima_near(0.100, 0.104), (std::vector<double>{0.1, 0.104}));
  EXPECT_EQ(maxima_near(0.300, 0.306), (std::vector<double>{0.3, 0.306}));
  EXPECT_EQ(maxima_near(0.100, 0.102).size(), 1u);
  EXPECT_EQ(maxima_near(0.250, 0.252).size(), 1u);
}

TEST(Kzp, FindsTwoTonesInNoise) {
  SignalSpec spec;
  spec.n = 5000;
  spec.components = {{.frequency = 0.1, .amplitude = 1.0}, {.frequency = 0.3, .amplitude = 1.0, .phase = 1.0}};
  spec.noise_sigma = 1.0;
  spec.seed = 99;
  KzpParams p;
  p.top = 2;
  auto top = kzp::kzp(generate(spec), p).top_frequencies;
  std::sort(top.begin(), top.end());
  EXPECT_EQ(top, (std::vector<double>{0.1, 0.3}));
}

TEST(Kzp, IsDeterministic) {
  SignalSpec spec;
  spec.n = 1500;
  spec.components = {{.frequency = 0.123, .amplitude = 0.7, .phase = 0.4}};
  spec.noise_sigma = 1.0;
  const auto ts = inject_missing(generate(spec), 0.3, 5);
  KzpParams p;
  p.m = 150;
  p.top = 3;
  const auto a = kzp::kzp(ts, p);
  const auto b = kzp::kzp(ts, p);
  EXPECT_EQ(a.top_frequencies, b.top_frequencies);
  EXPECT_EQ(a.raw.intensity, b.raw.intensity);
  EXPECT_EQ(a.smoothed.smoothed, b.smoothed.smoothed);
  EXPECT_EQ(a.total_variance, b.total_variance);
}

TEST(Kzp, ValidatesParameters) {
  const auto ts = TimeSeries::complete(std::vector<double>(100, 1.0));
  auto bad = [&](auto mutate) {
    KzpParams p;
    p.m = 20;
    mutate(p);
    return code_of([&] { kzp::kzp(ts, p); });
  };
  EXPECT_EQ(bad([](KzpParams& p) { p.m = 1; }), ErrorCode::Argument);
  EXPECT_EQ(bad([](KzpParams& p) { p.k = 0; }), ErrorCode::Argument);
  EXPECT_EQ(bad([](KzpParams& p) { p.smooth_level = 1.0; }), ErrorCode::Argument);
  EXPECT_EQ(bad([](KzpParams& p) { p.digits = 16; }), ErrorCode::Argument);
  EXPECT_EQ(bad([](KzpParams& p) { p.top = 0; }), ErrorCode::Argument);
  EXPECT_EQ(bad([](KzpParams& p) { p.oversample = 0; }), ErrorCode::Argument);
  EXPECT_EQ(bad([](KzpParams& p) { p.kz.min_coverage = 1.5; }), ErrorCode::Argument);
  EXPECT_EQ(bad([](KzpParams& p) { p.m = 60; }), ErrorCode::InsufficientData);
  EXPECT_EQ(code_of([] { parse_method("ls"); }), ErrorCode::Argument);
  EXPECT_EQ(parse_method("nz"), SmoothingMethod::NZ);
}

TEST(Kzp, SummaryJsonAndSpectrumCsv) {
  SignalSpec spec;
  spec.n = 400;
  spec.components = {{.frequency = 0.2, .amplitude = 1.0}};
  spec.noise_sigma = 0.1;
  KzpParams p;
  p.m = 40;
  const auto r = kzp::kzp(generate(spec), p);
  const auto j = nlohmann::json::parse(kzp_summary_json(r, p));
  EXPECT_EQ(j["top_frequencies"][0].get<double>(), 0.2);
  EXPECT_EQ(j["parameters"]["m"].get<int>(), 40);
  EXPECT_EQ(j["parameters"]["method"].get<std::string>(), "DZ");
  kzp::testing::TempDir dir;
  save_kzp_spectrum_csv(dir / "s.csv", r);
  const auto text = kzp::testing::read_file(dir / "s.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "frequency,raw,smoothed,half_width");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 21);
}
