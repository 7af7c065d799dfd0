#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kzp/adaptive.hpp"
#include "kzp/arbaseline.hpp"
#include "kzp/config.hpp"
#include "kzp/reconstruct.hpp"
#include "kzp/series.hpp"

namespace kzp {

enum class Study { Sensitivity, Accuracy, Resolution, Robustness, Showcase };

Study parse_study(std::string_view name);
std::string_view to_string(Study study);

/// Parameters of one limit study. default_config() fills in the published
/// design; a key-value file can override any field (see README).
struct ScenarioConfig {
  Study study = Study::Sensitivity;
  std::vector<std::size_t> n;
  std::vector<double> dz;
  int m = 500;
  int k = 3;
  double noise_sigma = 16.0;
  std::uint64_t base_seed = 20200101;
  int replicates = 20;
  SmoothingMethod method = SmoothingMethod::DZ;
  DzStatistic dz_statistic = DzStatistic::SumOfSquares;
  int digits = 3;

  // S/N sweep per smoothing level (sensitivity, robustness).
  std::map<double, std::vector<double>> snr_by_dz;
  // Fixed amplitudes (accuracy, resolution, showcase).
  std::vector<double> amplitudes;
  // Signal frequencies: the accuracy sweep, the fixed resolution partner, the
  // single sensitivity/robustness tone, or the showcase pair.
  std::vector<double> frequencies;
  // Resolution: the moving second frequency.
  std::vector<double> second_frequencies;
  // Robustness and showcase: fractions of samples removed.
  std::vector<double> missing;

  // Hit tolerance in grid steps; `partial` applies to series shorter than the
  // KZ support, which are analysed with EdgePolicy::Partial.
  int tolerance_steps = 1;
  int tolerance_steps_partial = 2;

  // Showcase only.
  std::optional<int> ar_max_order;

  void validate() const;
};

ScenarioConfig default_config(Study study);

/// default_config(study) with every key present in `overrides` applied.
/// Unknown keys are rejected.
ScenarioConfig load_config(Study study, const KeyValueConfig& overrides);

struct ExperimentRow {
  std::size_t cell = 0;
  std::size_t n = 0;
  double dz = 0.0;
  double snr = 0.0;
  double amplitude = 0.0;
  double missing = 0.0;
  std::vector<double> true_frequencies;
  EdgePolicy edge = EdgePolicy::Drop;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::vector<double> observed;
  std::size_t matched = 0;  // true frequencies recovered within tolerance
  bool hit = false;
  std::string error;  // set when the estimator could not run
};

struct CellSummary {
  std::size_t cell = 0;
  std::size_t n = 0;
  double dz = 0.0;
  double snr = 0.0;
  double amplitude = 0.0;
  double missing = 0.0;
  std::vector<double> true_frequencies;
  int hits = 0;
  int replicates = 0;
  double detection_rate() const {
    return replicates ? static_cast<double>(hits) / replicates : 0.0;
  }
};

struct ExperimentTable {
  ScenarioConfig config;
  std::vector<ExperimentRow> rows;
  std::vector<CellSummary> cells;

  std::string rows_csv() const;
  std::string summary_csv() const;
};

ExperimentTable run_sensitivity(const ScenarioConfig& cfg);
ExperimentTable run_accuracy(const ScenarioConfig& cfg);
ExperimentTable run_resolution(const ScenarioConfig& cfg);
ExperimentTable run_robustness(const ScenarioConfig& cfg);

/// Dispatches on cfg.study; Showcase is rejected (see run_showcase).
ExperimentTable run_study(const ScenarioConfig& cfg);

/// Seed of replicate r. Replicates share noise across the cells of a sweep
/// (common random numbers), so comparisons between cells are paired.
std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate);

struct ShowcaseReport {
  SeriesStats stats;
  double snr = 0.0;
  std::vector<double> top_complete;
  std::vector<double> top_missing;
  FitMetrics fit_complete;          // reconstruction vs noise-free signal
  FitMetrics fit_missing;           // same, with samples removed
  FitMetrics fit_missing_observed;  // reconstruction vs the observed data
  double observed_fraction = 1.0;
  ARModel ar;
  double unexplained = 0.0;
  std::vector<double> acf;
};

/// The two-tone end-to-end run: spectrum, reconstruction, autoregression
/// baseline and the rerun with missing samples. With an output directory all
/// CSV and SVG artifacts plus a manifest are written there.
ShowcaseReport run_showcase(
    const ScenarioConfig& cfg,
    const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Writes <study>.csv, <study>_summary.csv and manifest.json into out_dir.
/// Returns the written artifact paths.
std::vector<std::filesystem::path> write_study(
    const ExperimentTable& table, const std::filesystem::path& out_dir);

/// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

/// Replicates averaged out: true when the sequence (in sweep order) is
/// non-decreasing up to at most `allowed_inversions` drops larger than
/// `slack`.
bool monotone_with_inversions(const std::vector<double>& rates, double slack,
                              int allowed_inversions);

}  // namespace kzp
