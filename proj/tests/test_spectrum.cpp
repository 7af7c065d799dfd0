#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "kzp/spectrum.hpp"
#include "support/errors.hpp"
#include "support/oracles.hpp"
#include "support/property.hpp"
#include "support/tempdir.hpp"

using namespace kzp;
using kzp::testing::code_of;
using kzp::testing::for_all;
using kzp::testing::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> cosine(std::size_t n, double amp, double f, double phase = 0.0,
                           std::int64_t start = 1) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = amp * std::cos(2 * kPi * f * static_cast<double>(start + static_cast<std::int64_t>(i)) + phase);
  return x;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST(FrequencyGrid, HalfBandEndsAtNyquist) {
  const auto g = FrequencyGrid::half_band(0.1);
  ASSERT_EQ(g.size(), 6u);
  EXPECT_DOUBLE_EQ(g.points.front(), 0.0);
  EXPECT_NEAR(g.points.back(), 0.5, 1e-15);
  EXPECT_EQ(FrequencyGrid::half_band(1.0 / 7).size(), 4u);
}

TEST(RawPeriodogram, MatchesDirectSummation) {
  for_all(300, 1000, [](Gen& g) {
    const auto n = static_cast<std::size_t>(g.integer(2, 160));
    const auto x = g.normals(n, g.uniform(0.1, 10.0));
    const auto mask = g.coin() ? std::vector<std::uint8_t>(n, 1) : g.mask(n, g.uniform(0, 0.7));
    const auto start = static_cast<std::int64_t>(g.integer(-50, 50));
    const TimeSeries ts(x, mask, start);
    const auto grid = FrequencyGrid::half_band(1.0 / static_cast<double>(g.integer(2, 300)));
    const auto pg = raw_periodogram(ts, grid);
    const auto expected = oracle::naive_periodogram(x, mask, grid.points, start);
    const double scale = std::max(1e-300, max_of(expected));
    for (std::size_t j = 0; j < grid.size(); ++j)
      ASSERT_NEAR(pg.intensity[j], expected[j], 1e-9 * scale) << "f=" << grid.points[j];
  });
}

TEST(RawPeriodogram, CosinePeakHeight) {
  // Whole number of cycles: the peak sits on the Fourier grid and carries
  // a^2 N / (8 pi); every other Fourier frequency is empty.
  const std::size_t n = 400;
  const double a = 2.5;
  const auto ts = TimeSeries::complete(cosine(n, a, 40.0 / n, 0.3));
  const auto pg = raw_periodogram(ts, FrequencyGrid::half_band(1.0 / n));
  const double peak = a * a * n / (8 * kPi);
  EXPECT_NEAR(pg.intensity[40], peak, 1e-9 * peak);
  for (std::size_t j = 0; j < pg.intensity.size(); ++j)
    if (j != 40) { EXPECT_LT(pg.intensity[j], 1e-12 * peak) << j; }
}

TEST(RawPeriodogram, ZeroSeriesGivesZeroSpectrum) {
  const auto pg = raw_periodogram(TimeSeries::complete(std::vector<double>(64, 0.0)),
                                  FrequencyGrid::half_band(1.0 / 64));
  for (double v : pg.intensity) EXPECT_EQ(v, 0.0);
}

TEST(RawPeriodogram, ConstantSeriesIsRemovedByDemeaning) {
  const auto pg = raw_periodogram(TimeSeries::complete(std::vector<double>(50, 3.25)),
                                  FrequencyGrid::half_band(1.0 / 50));
  for (double v : pg.intensity) EXPECT_NEAR(v, 0.0, 1e-20);
}

TEST(RawPeriodogram, ParsevalOnFullFourierGrid) {
  for_all(200, 2000, [](Gen& g) {
    const auto n = static_cast<std::size_t>(g.integer(2, 200));
    const auto x = g.normals(n, g.uniform(0.5, 3));
    const auto ts = TimeSeries::complete(x);
    // I(j/n) = I((n-j)/n), so the full Fourier grid folds onto the half band.
    const auto pg = raw_periodogram(ts, FrequencyGrid::half_band(1.0 / n));
    long double total = 0;
    for (std::size_t j = 0; j < pg.intensity.size(); ++j)
      total += (j == 0 || 2 * j == n ? 1 : 2) * static_cast<long double>(pg.intensity[j]);
    long double mean = 0, var = 0;
    for (double v : x) mean += v;
    mean /= n;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= n;
    ASSERT_NEAR(static_cast<double>(2 * kPi / n * total), static_cast<double>(var),
                1e-10 * static_cast<double>(var));
  });
}

TEST(RawPeriodogram, MissingValuesDoNotLeakThroughTheMask) {
  for_all(200, 3000, [](Gen& g) {
    const auto n = static_cast<std::size_t>(g.integer(3, 120));
    auto x = g.normals(n);
    const auto mask = g.mask(n, 0.4);
    auto y = x;
    for (std::size_t i = 0; i < n; ++i)
      if (!mask[i]) {
        x[i] = 0.0;
        y[i] = g.uniform(-1e12, 1e12);
      }
    const auto grid = FrequencyGrid::half_band(1.0 / n);
    const auto a = raw_periodogram(TimeSeries(x, mask), grid);
    const auto b = raw_periodogram(TimeSeries(y, mask), grid);
    ASSERT_EQ(a.intensity, b.intensity);
  });
}

TEST(RawPeriodogram, AllObservedMaskEqualsCompleteSeries) {
  Gen g(7);
  const auto x = g.normals(257);
  const auto grid = FrequencyGrid::half_band(1.0 / 257);
  const auto a = raw_periodogram(TimeSeries::complete(x), grid);
  const auto b = raw_periodogram(TimeSeries(x, std::vector<std::uint8_t>(x.size(), 1)), grid);
  EXPECT_EQ(a.intensity, b.intensity);
}

TEST(RawPeriodogram, RejectsDegenerateInput) {
  const auto grid = FrequencyGrid::half_band(0.25);
  EXPECT_EQ(code_of([&] { raw_periodogram(TimeSeries({1.0, 2.0}, {1, 0}), grid); }),
            ErrorCode::InsufficientData);
  EXPECT_EQ(code_of([&] { raw_periodogram(TimeSeries::complete({1.0, 2.0}), FrequencyGrid{}); }),
            ErrorCode::Argument);
}

TEST(WindowWeights, Examples) {
  EXPECT_EQ(window_weights(WindowForm::Uniform, 0), std::vector<double>{1.0});
  const auto u = window_weights(WindowForm::Uniform, 1);
  ASSERT_EQ(u.size(), 3u);
  for (double w : u) EXPECT_NEAR(w, 1.0 / 3, 1e-15);
  const auto b = window_weights(WindowForm::Bartlett, 2);
  const std::vector<double> expected{1.0 / 9, 2.0 / 9, 3.0 / 9, 2.0 / 9, 1.0 / 9};
  ASSERT_EQ(b.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(b[i], expected[i], 1e-15);
}

TEST(WindowWeights, NormalisedSymmetricAndNonnegative) {
  const WindowForm forms[] = {WindowForm::Uniform, WindowForm::Bartlett, WindowForm::Gaussian,
                              WindowForm::Parzen, WindowForm::TukeyHamming};
  for_all(1000, 4000, [&](Gen& g) {
    const auto form = forms[g.integer(0, 4)];
    const int a = g.integer(0, 300);
    const auto w = window_weights(form, a);
    ASSERT_EQ(w.size(), static_cast<std::size_t>(2 * a + 1));
    long double sum = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      ASSERT_GE(w[i], 0.0);
      ASSERT_EQ(w[i], w[w.size() - 1 - i]);
      sum += w[i];
    }
    ASSERT_NEAR(static_cast<double>(sum), 1.0, 1e-12);
    ASSERT_EQ(w[a], max_of(w));
  });
}

TEST(WindowWeights, NamesRoundTrip) {
  for (auto form : {WindowForm::Uniform, WindowForm::Bartlett, WindowForm::Gaussian,
                    WindowForm::Parzen, WindowForm::TukeyHamming})
    EXPECT_EQ(parse_window_form(to_string(form)), form);
  EXPECT_EQ(parse_window_form("tukey-hamming"), WindowForm::TukeyHamming);
  EXPECT_EQ(code_of([] { parse_window_form("hann"); }), ErrorCode::Argument);
  EXPECT_EQ(code_of([] { window_weights(WindowForm::Uniform, -1); }), ErrorCode::Argument);
}

TEST(ReflectIndex, Examples) {
  EXPECT_EQ(reflect_index(0, 5), 0u);
  EXPECT_EQ(reflect_index(-1, 5), 1u);
  EXPECT_EQ(reflect_index(-4, 5), 4u);
  EXPECT_EQ(reflect_index(5, 5), 3u);
  EXPECT_EQ(reflect_index(8, 5), 0u);
  EXPECT_EQ(reflect_index(0, 1), 0u);
}

TEST(SmoothFixed, Examples) {
  Periodogram pg;
  pg.grid = FrequencyGrid::half_band(0.1);
  pg.intensity = {1, 0, 0, 0, 0, 0};
  const auto identity = smooth_fixed(pg, WindowForm::Bartlett, 0);
  EXPECT_EQ(identity.intensity, pg.intensity);
  // Index -1 reflects onto index 1.
  const auto s = smooth_fixed(pg, WindowForm::Uniform, 1);
  EXPECT_NEAR(s.intensity[0], 1.0 / 3, 1e-15);
  EXPECT_NEAR(s.intensity[1], 1.0 / 3, 1e-15);
  EXPECT_EQ(s.intensity[2], 0.0);
  pg.intensity.assign(6, 2.5);
  for (double v : smooth_fixed(pg, WindowForm::Parzen, 4).intensity) EXPECT_NEAR(v, 2.5, 1e-14);
  EXPECT_EQ(code_of([&] { smooth_fixed(pg, WindowForm::Uniform, 6); }), ErrorCode::Argument);
}

TEST(SmoothFixed, MatchesExplicitReflectedSum) {
  for_all(300, 5000, [](Gen& g) {
    Periodogram pg;
    const auto len = static_cast<std::size_t>(g.integer(2, 60));
    pg.grid = FrequencyGrid::uniform(0.0, 0.5 / static_cast<double>(len - 1), len);
    pg.intensity.resize(len);
    for (auto& v : pg.intensity) v = g.uniform(0, 5);
    const int a = g.integer(0, static_cast<int>(len) - 1);
    const auto w = window_weights(WindowForm::Gaussian, a);
    const auto s = smooth_fixed(pg, WindowForm::Gaussian, a);
    for (std::size_t j = 0; j < len; ++j) {
      long double acc = 0;
      for (int o = -a; o <= a; ++o) {
        auto i = static_cast<std::ptrdiff_t>(j) + o;
        if (i < 0) i = -i;
        if (i >= static_cast<std::ptrdiff_t>(len)) i = 2 * static_cast<std::ptrdiff_t>(len - 1) - i;
        acc += w[o + a] * pg.intensity[i];
      }
      ASSERT_NEAR(s.intensity[j], static_cast<double>(acc), 1e-12);
    }
  });
}

TEST(KzWeights, MatchRepeatedConvolution) {
  for (int m : {2, 3, 5, 10}) {
    for (int k : {1, 2, 3, 4}) {
      const auto w = kz_weights(m, k);
      const auto expected = oracle::kz_kernel(m, k);
      ASSERT_EQ(w.size(), expected.size());
      ASSERT_EQ(kz_support(m, k), static_cast<std::size_t>(k * (m - 1) + 1));
      long double sum = 0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        EXPECT_NEAR(w[i], static_cast<double>(expected[i]), 1e-15);
        EXPECT_NEAR(w[i], w[w.size() - 1 - i], 1e-15);
        sum += w[i];
      }
      EXPECT_NEAR(static_cast<double>(sum), 1.0, 1e-13);
    }
  }
}

TEST(Kzft, RecoversHalfAmplitudeOfOnGridSinusoid) {
  const double a = 3.0;
  const auto ts = TimeSeries::complete(cosine(1000, a, 0.1, 0.7));
  const auto c = kzft(ts, 100, 3, 0.1);
  ASSERT_EQ(c.size(), 1000u - 297u);
  EXPECT_EQ(c.times.front(), 1 + 148);
  for (const auto& z : c.coefficients) ASSERT_NEAR(std::abs(z), a / 2, 1e-9);
}

TEST(Kzft, ZeroSeriesGivesZeroCoefficients) {
  const auto c = kzft(TimeSeries::complete(std::vector<double>(50, 0.0)), 10, 2, 0.2);
  for (const auto& z : c.coefficients) EXPECT_EQ(std::abs(z), 0.0);
}

TEST(Kzft, SingleFullWindowAtZeroFrequencyIsTheMean) {
  Gen g(3);
  const auto x = g.normals(37);
  const auto c = kzft(TimeSeries::complete(x), 37, 1, 0.0);
  ASSERT_EQ(c.size(), 1u);
  long double mean = 0;
  for (double v : x) mean += v;
  mean /= x.size();
  EXPECT_NEAR(c.coefficients[0].real(), static_cast<double>(mean), 1e-14);
  EXPECT_NEAR(c.coefficients[0].imag(), 0.0, 1e-14);
  EXPECT_EQ(c.times[0], 19);
}

TEST(Kzft, MatchesDirectWindowedSum) {
  for_all(300, 6000, [](Gen& g) {
    const int m = g.integer(2, 12);
    const int k = g.integer(1, 4);
    const auto support = static_cast<int>(kz_support(m, k));
    const bool partial = g.coin();
    const int n = partial ? g.integer(2, support + 60) : g.integer(support, support + 60);
    const auto x = g.normals(static_cast<std::size_t>(n));
    const auto mask = g.coin(0.3) ? std::vector<std::uint8_t>(n, 1)
                                  : g.mask(static_cast<std::size_t>(n), g.uniform(0, 0.6));
    const auto start = static_cast<std::int64_t>(g.integer(-5, 5));
    const double f = g.uniform(0, 0.5);
    const TimeSeries ts(x, mask, start);
    KzOptions opts;
    opts.edge = partial ? EdgePolicy::Partial : EdgePolicy::Drop;
    opts.min_coverage = g.uniform(0, 1);

    std::vector<std::pair<std::int64_t, oracle::cld>> expected;
    const int left = (support - 1) / 2;
    const int first = partial ? 0 : left;
    const int last = partial ? n - 1 : n - support + left;
    const long double threshold = opts.min_coverage * ts.observed_fraction();
    for (int t = first; t <= last; ++t) {
      const auto [coef, den] = oracle::kz_coefficient(x, mask, start, m, k, f, t);
      if (den > 1e-12 && den >= threshold * (1 - 1e-6)) expected.emplace_back(start + t, coef);
    }
    if (expected.empty()) {
      ASSERT_EQ(code_of([&] { kzft(ts, m, k, f, opts); }), ErrorCode::InsufficientData);
      return;
    }
    const auto c = kzft(ts, m, k, f, opts);
    // Coverage right at the threshold may round either way.
    std::size_t j = 0;
    for (const auto& [t, coef] : expected) {
      while (j < c.size() && c.times[j] < t) ++j;
      if (j == c.size() || c.times[j] != t) {
        const auto den = oracle::kz_coefficient(x, mask, start, m, k, f, t - start).second;
        ASSERT_NEAR(static_cast<double>(den), static_cast<double>(threshold), 1e-6) << "t=" << t;
        continue;
      }
      ASSERT_NEAR(c.coefficients[j].real(), static_cast<double>(coef.real()), 1e-9) << "t=" << t;
      ASSERT_NEAR(c.coefficients[j].imag(), static_cast<double>(coef.imag()), 1e-9) << "t=" << t;
    }
    ASSERT_LE(c.size(), expected.size() + 2);
  });
}

TEST(Kzft, IsLinearInTheSeries) {
  for_all(200, 7000, [](Gen& g) {
    const int m = g.integer(2, 20);
    const int k = g.integer(1, 3);
    const auto n = kz_support(m, k) + static_cast<std::size_t>(g.integer(0, 40));
    const auto x = g.normals(n);
    const auto y = g.normals(n);
    const double a = g.uniform(-3, 3), b = g.uniform(-3, 3);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = a * x[i] + b * y[i];
    const auto mask = g.mask(n, 0.2, n / 2 + 1);
    const double f = g.uniform(0, 0.5);
    const auto cx = kzft(TimeSeries(x, mask), m, k, f);
    const auto cy = kzft(TimeSeries(y, mask), m, k, f);
    const auto cz = kzft(TimeSeries(z, mask), m, k, f);
    ASSERT_EQ(cz.size(), cx.size());
    for (std::size_t j = 0; j < cz.size(); ++j)
      ASSERT_LT(std::abs(cz.coefficients[j] - (a * cx.coefficients[j] + b * cy.coefficients[j])),
                1e-10);
  });
}

TEST(Kzft, RejectsBadArguments) {
  const auto ts = TimeSeries::complete(std::vector<double>(20, 1.0));
  EXPECT_EQ(code_of([&] { kzft(ts, 1, 1, 0.1); }), ErrorCode::Argument);
  EXPECT_EQ(code_of([&] { kzft(ts, 5, 0, 0.1); }), ErrorCode::Argument);
  EXPECT_EQ(code_of([&] { kzft(ts, 5, 1, 0.6); }), ErrorCode::Argument);
  EXPECT_EQ(code_of([&] { kzft(ts, 5, 1, -0.1); }), ErrorCode::Argument);
  EXPECT_EQ(code_of([&] { kzft(ts, 8, 3, 0.1); }), ErrorCode::InsufficientData);
  KzOptions partial;
  partial.edge = EdgePolicy::Partial;
  EXPECT_NO_THROW(kzft(ts, 8, 3, 0.1, partial));
}

TEST(KzPeriodogram, SingleFullWindowEqualsRawPeriodogram) {
  for_all(100, 8000, [](Gen& g) {
    const int n = g.integer(2, 200);
    const auto x = g.normals(static_cast<std::size_t>(n));
    const auto ts = TimeSeries::complete(x, g.integer(-3, 3));
    const auto kz = kz_periodogram(ts, n, 1);
    const auto raw = raw_periodogram(ts, kz.grid);
    const double scale = max_of(raw.intensity);
    for (std::size_t j = 0; j < raw.intensity.size(); ++j)
      ASSERT_NEAR(kz.intensity[j], raw.intensity[j], 1e-10 * scale);
  });
}

TEST(KzPeriodogram, NonnegativeAndZeroForZeroInput) {
  for_all(100, 9000, [](Gen& g) {
    const int m = g.integer(2, 30);
    const int k = g.integer(1, 3);
    const auto n = kz_support(m, k) + static_cast<std::size_t>(g.integer(0, 100));
    const TimeSeries ts(g.normals(n, 4), g.mask(n, g.uniform(0, 0.5), std::max<std::size_t>(2, n / 2)));
    for (double v : kz_periodogram(ts, m, k).intensity) ASSERT_GE(v, 0.0);
  });
  for (double v : kz_periodogram(TimeSeries::complete(std::vector<double>(100, 0.0)), 20, 3).intensity)
    EXPECT_EQ(v, 0.0);
}

TEST(KzPeriodogram, PeakMassMatchesRawPeriodogram) {
  // A unit sinusoid carries 1/(8 pi) of mass in its grid cell on either grid.
  const std::size_t n = 2000;
  const auto ts = TimeSeries::complete(cosine(n, 1.0, 0.1));
  const auto raw = raw_periodogram(ts, FrequencyGrid::half_band(1.0 / n));
  const auto kz = kz_periodogram(ts, 100, 3);
  const double raw_mass = max_of(raw.intensity) / n;
  const double kz_mass = max_of(kz.intensity) / 100;
  EXPECT_NEAR(raw_mass, 1 / (8 * kPi), 1e-9);
  EXPECT_NEAR(kz_mass, raw_mass, 1e-6);
  EXPECT_NEAR(kz.grid.points[argmax(kz.intensity)], 0.1, 1e-12);
}

TEST(KzPeriodogram, IteratingSuppressesSidelobes) {
  // Off-grid tone: with k = 1 leakage is spread over the band, k = 3 keeps
  // it within a few cells of the peak.
  const std::size_t n = 3000;
  const auto ts = TimeSeries::complete(cosine(n, 1.0, 0.1234));
  const auto k1 = kz_periodogram(ts, 100, 1);
  const auto k3 = kz_periodogram(ts, 100, 3);
  EXPECT_EQ(argmax(k1.intensity), argmax(k3.intensity));
  const auto p = argmax(k1.intensity);
  auto far = [&](const Periodogram& pg) {
    double worst = 0;
    for (std::size_t j = 0; j < pg.intensity.size(); ++j)
      if (j + 5 < p || j > p + 5) worst = std::max(worst, pg.intensity[j]);
    return worst / max_of(pg.intensity);
  };
  EXPECT_LT(far(k3), 1e-3 * far(k1));
}

TEST(KzPeriodogram, OversampledGridContainsBaseGrid) {
  Gen g(11);
  const TimeSeries ts(g.normals(600), g.mask(600, 0.2));
  const auto base = kz_periodogram(ts, 60, 2);
  const auto fine = kz_periodogram(ts, 60, 2, {}, 3);
  EXPECT_NEAR(fine.grid.step, 1.0 / 180, 1e-15);
  for (std::size_t j = 0; j < base.intensity.size(); ++j)
    EXPECT_NEAR(fine.intensity[3 * j], base.intensity[j], 1e-10 * max_of(base.intensity));
}

TEST(PeriodogramCsv, WritesHeaderAndRows) {
  kzp::testing::TempDir dir;
  Periodogram pg;
  pg.grid = FrequencyGrid::half_band(0.25);
  pg.intensity = {0.5, 1.0, 0.25};
  const std::vector<int> widths{0, 2, 1};
  save_periodogram_csv(dir / "a.csv", pg);
  save_periodogram_csv(dir / "b.csv", pg, widths);
  EXPECT_EQ(kzp::testing::read_file(dir / "a.csv"), "frequency,intensity\n0,0.5\n0.25,1\n0.5,0.25\n");
  EXPECT_EQ(kzp::testing::read_file(dir / "b.csv"),
            "frequency,intensity,window_halfwidth\n0,0.5,0\n0.25,1,2\n0.5,0.25,1\n");
  EXPECT_EQ(code_of([&] { save_periodogram_csv(dir / "c.csv", pg, std::vector<int>{1}); }),
            ErrorCode::Argument);
  EXPECT_NEAR(pg.mass(), 0.4375, 1e-15);
}
