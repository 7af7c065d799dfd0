#include "kzp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "kzp/error.hpp"
#include "kzp/plot.hpp"
#include "kzp/simulate.hpp"
#include "kzp/spectrum.hpp"

namespace kzp {

namespace {

constexpr std::uint64_t kMissingStream = 0x9e3779b97f4a7c15ULL;

std::vector<double> sweep(double from, double to, double step) {
  std::vector<double> out;
  const int count = static_cast<int>(std::lround((from - to) / step)) + 1;
  for (int i = 0; i < count; ++i) out.push_back(round_to_digits(from - i * step, 6) + 0.0);
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_double(v[i]);
  }
  return out;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Largest number of true frequencies matched one-to-one by observed peaks
// within the tolerance.
std::size_t match_count(const std::vector<double>& truth,
                        const std::vector<double>& observed, double tol) {
  std::vector<std::size_t> order(observed.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t best = 0;
  // Peak lists here hold at most a handful of entries; try every assignment.
  std::sort(order.begin(), order.end());
  do {
    std::size_t matched = 0;
    for (std::size_t i = 0; i < truth.size() && i < order.size(); ++i)
      if (std::abs(observed[order[i]] - truth[i]) <= tol + 1e-9) ++matched;
    best = std::max(best, matched);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

struct Cell {
  std::size_t n = 0;
  double dz = 0.0;
  double snr = 0.0;
  double amplitude = 0.0;
  double missing = 0.0;
  std::vector<SinusoidComponent> components;
};

KzpParams params_for(const ScenarioConfig& cfg, std::size_t n, double dz, int top) {
  KzpParams p;
  p.m = cfg.m;
  p.k = cfg.k;
  p.smooth_level = dz;
  p.method = cfg.method;
  p.dz_statistic = cfg.dz_statistic;
  p.digits = cfg.digits;
  p.top = top;
  p.kz.edge = n < kz_support(cfg.m, cfg.k) ? EdgePolicy::Partial : EdgePolicy::Drop;
  return p;
}

ExperimentTable run_cells(const ScenarioConfig& cfg, const std::vector<Cell>& cells) {
  cfg.validate();
  ExperimentTable table;
  table.config = cfg;
  const double step = 1.0 / cfg.m;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    std::vector<double> truth;
    for (const auto& comp : cell.components) truth.push_back(comp.frequency);
    const KzpParams params =
        params_for(cfg, cell.n, cell.dz, static_cast<int>(truth.size()));
    const int tol_steps = params.kz.edge == EdgePolicy::Partial
                              ? cfg.tolerance_steps_partial
                              : cfg.tolerance_steps;

    CellSummary summary{c, cell.n, cell.dz, cell.snr, cell.amplitude, cell.missing,
                        truth, 0, cfg.replicates};
    for (int r = 0; r < cfg.replicates; ++r) {
      ExperimentRow row;
      row.cell = c;
      row.n = cell.n;
      row.dz = cell.dz;
      row.snr = cell.snr;
      row.amplitude = cell.amplitude;
      row.missing = cell.missing;
      row.true_frequencies = truth;
      row.edge = params.kz.edge;
      row.replicate = r;
      row.seed = replicate_seed(cfg.base_seed, r);

      SignalSpec spec;
      spec.components = cell.components;
      spec.noise_sigma = cfg.noise_sigma;
      spec.n = cell.n;
      spec.seed = row.seed;
      TimeSeries x = generate(spec);
      if (cell.missing > 0.0) x = inject_missing(x, cell.missing, row.seed ^ kMissingStream);
      try {
        row.observed = kzp(x, params).top_frequencies;
        row.matched = match_count(truth, row.observed, tol_steps * step);
        row.hit = row.matched == truth.size();
      } catch (const Error& e) {
        row.error = e.what();
      }
      if (row.hit) ++summary.hits;
      table.rows.push_back(std::move(row));
    }
    table.cells.push_back(std::move(summary));
  }
  return table;
}

nlohmann::ordered_json config_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["study"] = std::string(to_string(cfg.study));
  j["n"] = cfg.n;
  j["dz"] = cfg.dz;
  j["m"] = cfg.m;
  j["k"] = cfg.k;
  j["noise_sigma"] = cfg.noise_sigma;
  j["noise_variance"] = cfg.noise_sigma * cfg.noise_sigma;
  j["base_seed"] = cfg.base_seed;
  j["replicates"] = cfg.replicates;
  j["method"] = std::string(to_string(cfg.method));
  j["dz_statistic"] = cfg.dz_statistic == DzStatistic::SumOfSquares ? "squares" : "differences";
  j["digits"] = cfg.digits;
  nlohmann::ordered_json snr = nlohmann::ordered_json::object();
  for (const auto& [dz, list] : cfg.snr_by_dz) snr[format_double(dz)] = list;
  j["snr_by_dz"] = snr;
  j["amplitudes"] = cfg.amplitudes;
  j["frequencies"] = cfg.frequencies;
  j["second_frequencies"] = cfg.second_frequencies;
  j["missing"] = cfg.missing;
  j["tolerance_steps"] = cfg.tolerance_steps;
  j["tolerance_steps_partial"] = cfg.tolerance_steps_partial;
  if (cfg.ar_max_order) j["ar_max_order"] = *cfg.ar_max_order;
  j["seed_rule"] = "replicate seed = base_seed + replicate; missing mask seed = "
                   "replicate seed XOR 0x9e3779b97f4a7c15";
  return j;
}

svg::LineChart make_chart(std::string title, std::string x_label, std::string y_label) {
  svg::LineChart chart;
  chart.title = std::move(title);
  chart.x_label = std::move(x_label);
  chart.y_label = std::move(y_label);
  return chart;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::Io, "cannot write " + path.string());
  file << text;
  if (!file) fail(ErrorCode::Io, "write failure on " + path.string());
}

void write_manifest(const std::filesystem::path& out_dir, const ScenarioConfig& cfg,
                    const std::vector<std::filesystem::path>& artifacts,
                    const nlohmann::ordered_json& extra) {
  nlohmann::ordered_json j;
  j["config"] = config_json(cfg);
  if (!extra.is_null()) j["results"] = extra;
  auto list = nlohmann::ordered_json::array();
  for (const auto& p : artifacts)
    list.push_back({{"path", p.filename().string()}, {"sha256", sha256_file(p)}});
  j["artifacts"] = list;
  write_text(out_dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace

Study parse_study(std::string_view name) {
  if (name == "sensitivity") return Study::Sensitivity;
  if (name == "accuracy") return Study::Accuracy;
  if (name == "resolution") return Study::Resolution;
  if (name == "robustness") return Study::Robustness;
  if (name == "showcase") return Study::Showcase;
  fail(ErrorCode::Argument, "unknown study `" + std::string(name) + "`");
}

std::string_view to_string(Study study) {
  switch (study) {
    case Study::Sensitivity: return "sensitivity";
    case Study::Accuracy: return "accuracy";
    case Study::Resolution: return "resolution";
    case Study::Robustness: return "robustness";
    case Study::Showcase: return "showcase";
  }
  return "unknown";
}

void ScenarioConfig::validate() const {
  require(!n.empty() && !dz.empty(), "sweeps over n and dz must be nonempty");
  for (auto v : n) require(v >= 2, "n must be >= 2");
  for (auto v : dz) require(v > 0.0 && v < 1.0, "dz must lie in (0, 1)");
  require(m >= 2 && k >= 1, "need m >= 2 and k >= 1");
  require(noise_sigma >= 0.0, "noise_sigma must be >= 0");
  require(replicates >= 1, "replicates must be >= 1");
  require(tolerance_steps >= 0 && tolerance_steps_partial >= 0,
          "tolerances must be >= 0");
  require(!frequencies.empty(), "frequency list must be nonempty");
  for (auto f : frequencies) require(f > 0.0 && f < 0.5, "frequencies must lie in (0, 0.5)");
  for (auto f : second_frequencies)
    require(f > 0.0 && f < 0.5, "frequencies must lie in (0, 0.5)");
  for (auto p : missing) require(p >= 0.0 && p <= 1.0, "missing fractions must lie in [0, 1]");
  switch (study) {
    case Study::Sensitivity:
    case Study::Robustness:
      for (auto d : dz) {
        auto it = snr_by_dz.find(d);
        require(it != snr_by_dz.end() && !it->second.empty(),
                "no S/N sweep configured for dz = " + format_double(d));
      }
      if (study == Study::Robustness) require(!missing.empty(), "missing sweep is empty");
      break;
    case Study::Accuracy:
      require(!amplitudes.empty(), "amplitude must be configured");
      break;
    case Study::Resolution:
      require(!amplitudes.empty(), "amplitude must be configured");
      require(!second_frequencies.empty(), "second frequency sweep is empty");
      break;
    case Study::Showcase:
      require(amplitudes.size() == frequencies.size(),
              "showcase needs one amplitude per frequency");
      require(!missing.empty(), "showcase needs a missing fraction");
      break;
  }
}

ScenarioConfig default_config(Study study) {
  ScenarioConfig cfg;
  cfg.study = study;
  cfg.n = {5000, 1000};
  cfg.dz = {0.05, 0.01};
  cfg.frequencies = {0.040};
  switch (study) {
    case Study::Sensitivity:
      cfg.snr_by_dz = {{0.05, sweep(0.052, 0.045, 0.001)},
                       {0.01, sweep(0.017, 0.010, 0.001)}};
      break;
    case Study::Accuracy:
      cfg.amplitudes = {2.0};
      cfg.frequencies = {0.400, 0.440, 0.444};
      break;
    case Study::Resolution:
      cfg.amplitudes = {8.0};
      cfg.second_frequencies = {0.030, 0.033, 0.036, 0.037, 0.038, 0.039};
      break;
    case Study::Robustness:
      cfg.snr_by_dz = {{0.05, {0.055}}, {0.01, {0.015}}};
      cfg.missing = sweep(0.7, 0.0, 0.1);
      std::reverse(cfg.missing.begin(), cfg.missing.end());
      break;
    case Study::Showcase:
      cfg.n = {5000};
      cfg.dz = {0.01};
      cfg.noise_sigma = 4.0;  // N(0, 16)
      cfg.replicates = 1;
      cfg.frequencies = {0.084, 0.098};
      cfg.amplitudes = {1.0, 1.5};
      cfg.missing = {0.5};
      break;
  }
  return cfg;
}

ScenarioConfig load_config(Study study, const KeyValueConfig& kv) {
  ScenarioConfig cfg = default_config(study);
  std::map<double, std::vector<double>> snr_overrides;
  for (const auto& [key, value] : kv.entries()) {
    if (key == "n") {
      cfg.n.clear();
      for (double v : parse_double_list(value)) {
        require(v >= 1 && v == std::floor(v), "n must be a positive integer");
        cfg.n.push_back(static_cast<std::size_t>(v));
      }
    } else if (key == "dz") {
      cfg.dz = parse_double_list(value);
    } else if (key == "m") {
      cfg.m = static_cast<int>(*kv.get_int(key));
    } else if (key == "k") {
      cfg.k = static_cast<int>(*kv.get_int(key));
    } else if (key == "noise_sigma") {
      cfg.noise_sigma = *kv.get_double(key);
    } else if (key == "noise_variance") {
      cfg.noise_sigma = std::sqrt(*kv.get_double(key));
    } else if (key == "base_seed") {
      const auto v = *kv.get_int(key);
      require(v >= 0, "base_seed must be >= 0");
      cfg.base_seed = static_cast<std::uint64_t>(v);
    } else if (key == "replicates") {
      cfg.replicates = static_cast<int>(*kv.get_int(key));
    } else if (key == "method") {
      cfg.method = parse_method(value);
    } else if (key == "dz_statistic") {
      if (value == "squares") {
        cfg.dz_statistic = DzStatistic::SumOfSquares;
      } else if (value == "differences") {
        cfg.dz_statistic = DzStatistic::FirstDifferences;
      } else {
        fail(ErrorCode::Argument, "dz_statistic must be `squares` or `differences`");
      }
    } else if (key == "digits") {
      cfg.digits = static_cast<int>(*kv.get_int(key));
    } else if (key == "snr") {
      snr_overrides[-1.0] = parse_double_list(value);
    } else if (key.rfind("snr.", 0) == 0) {
      const auto level = parse_double_list(key.substr(4));
      require(level.size() == 1, "bad key `" + key + "`");
      snr_overrides[level[0]] = parse_double_list(value);
    } else if (key == "amplitudes" || key == "amplitude") {
      cfg.amplitudes = parse_double_list(value);
    } else if (key == "frequencies" || key == "frequency") {
      cfg.frequencies = parse_double_list(value);
    } else if (key == "second_frequencies") {
      cfg.second_frequencies = parse_double_list(value);
    } else if (key == "missing") {
      cfg.missing = parse_double_list(value);
    } else if (key == "tolerance_steps") {
      cfg.tolerance_steps = static_cast<int>(*kv.get_int(key));
    } else if (key == "tolerance_steps_partial") {
      cfg.tolerance_steps_partial = static_cast<int>(*kv.get_int(key));
    } else if (key == "ar_max_order") {
      cfg.ar_max_order = static_cast<int>(*kv.get_int(key));
    } else {
      fail(ErrorCode::Argument, "unknown config key `" + key + "`");
    }
  }
  if (auto it = snr_overrides.find(-1.0); it != snr_overrides.end()) {
    cfg.snr_by_dz.clear();
    for (double d : cfg.dz) cfg.snr_by_dz[d] = it->second;
  }
  for (const auto& [level, list] : snr_overrides)
    if (level >= 0.0) cfg.snr_by_dz[level] = list;
  cfg.validate();
  return cfg;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate) {
  return base_seed + static_cast<std::uint64_t>(replicate);
}

ExperimentTable run_sensitivity(const ScenarioConfig& cfg) {
  cfg.validate();
  std::vector<Cell> cells;
  for (auto n : cfg.n)
    for (auto dz : cfg.dz)
      for (auto ratio : cfg.snr_by_dz.at(dz)) {
        const double a = amplitude_for_snr(ratio, cfg.noise_sigma);
        cells.push_back({n, dz, ratio, a, 0.0, {{cfg.frequencies.front(), a, 0.0}}});
      }
  return run_cells(cfg, cells);
}

ExperimentTable run_accuracy(const ScenarioConfig& cfg) {
  cfg.validate();
  const double a = cfg.amplitudes.front();
  const double ratio = cfg.noise_sigma > 0 ? a * a / (cfg.noise_sigma * cfg.noise_sigma) : 0.0;
  std::vector<Cell> cells;
  for (auto n : cfg.n)
    for (auto dz : cfg.dz)
      for (auto f : cfg.frequencies) cells.push_back({n, dz, ratio, a, 0.0, {{f, a, 0.0}}});
  return run_cells(cfg, cells);
}

ExperimentTable run_resolution(const ScenarioConfig& cfg) {
  cfg.validate();
  const double a = cfg.amplitudes.front();
  const double f1 = cfg.frequencies.front();
  const double ratio =
      cfg.noise_sigma > 0 ? a * a / (cfg.noise_sigma * cfg.noise_sigma) : 0.0;
  std::vector<Cell> cells;
  for (auto n : cfg.n)
    for (auto dz : cfg.dz)
      for (auto f2 : cfg.second_frequencies)
        cells.push_back({n, dz, ratio, a, 0.0, {{f1, a, 0.0}, {f2, a, 0.0}}});
  return run_cells(cfg, cells);
}

ExperimentTable run_robustness(const ScenarioConfig& cfg) {
  cfg.validate();
  std::vector<Cell> cells;
  for (auto n : cfg.n)
    for (auto dz : cfg.dz)
      for (auto ratio : cfg.snr_by_dz.at(dz)) {
        const double a = amplitude_for_snr(ratio, cfg.noise_sigma);
        for (auto p : cfg.missing)
          cells.push_back({n, dz, ratio, a, p, {{cfg.frequencies.front(), a, 0.0}}});
      }
  return run_cells(cfg, cells);
}

ExperimentTable run_study(const ScenarioConfig& cfg) {
  switch (cfg.study) {
    case Study::Sensitivity: return run_sensitivity(cfg);
    case Study::Accuracy: return run_accuracy(cfg);
    case Study::Resolution: return run_resolution(cfg);
    case Study::Robustness: return run_robustness(cfg);
    case Study::Showcase: break;
  }
  fail(ErrorCode::Argument, "the showcase is not a table study; use run_showcase");
}

std::string ExperimentTable::rows_csv() const {
  std::ostringstream out;
  out << "study,cell,n,dz,m,k,method,noise_sigma,noise_variance,snr,amplitude,missing,"
         "true_frequencies,edge,replicate,seed,observed,matched,hit,error\n";
  const std::string study(to_string(config.study));
  const std::string method(to_string(config.method));
  for (const auto& r : rows) {
    out << study << ',' << r.cell << ',' << r.n << ',' << format_double(r.dz) << ','
        << config.m << ',' << config.k << ',' << method << ','
        << format_double(config.noise_sigma) << ','
        << format_double(config.noise_sigma * config.noise_sigma) << ','
        << format_double(r.snr) << ',' << format_double(r.amplitude) << ','
        << format_double(r.missing) << ',' << join(r.true_frequencies) << ','
        << (r.edge == EdgePolicy::Drop ? "drop" : "partial") << ',' << r.replicate
        << ',' << r.seed << ',' << join(r.observed) << ',' << r.matched << ','
        << (r.hit ? 1 : 0) << ',' << csv_field(r.error) << '\n';
  }
  return out.str();
}

std::string ExperimentTable::summary_csv() const {
  std::ostringstream out;
  out << "study,cell,n,dz,snr,amplitude,missing,true_frequencies,hits,replicates,"
         "detection_rate\n";
  const std::string study(to_string(config.study));
  for (const auto& c : cells) {
    out << study << ',' << c.cell << ',' << c.n << ',' << format_double(c.dz) << ','
        << format_double(c.snr) << ',' << format_double(c.amplitude) << ','
        << format_double(c.missing) << ',' << join(c.true_frequencies) << ','
        << c.hits << ',' << c.replicates << ',' << format_double(c.detection_rate())
        << '\n';
  }
  return out.str();
}

std::vector<std::filesystem::path> write_study(const ExperimentTable& table,
                                               const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string name(to_string(table.config.study));
  const auto rows = out_dir / (name + ".csv");
  const auto summary = out_dir / (name + "_summary.csv");
  write_text(rows, table.rows_csv());
  write_text(summary, table.summary_csv());
  std::vector<std::filesystem::path> artifacts{rows, summary};
  write_manifest(out_dir, table.config, artifacts, nullptr);
  artifacts.push_back(out_dir / "manifest.json");
  return artifacts;
}

ShowcaseReport run_showcase(const ScenarioConfig& cfg,
                            const std::optional<std::filesystem::path>& out_dir) {
  require(cfg.study == Study::Showcase, "run_showcase needs a showcase config");
  cfg.validate();
  const std::size_t n = cfg.n.front();
  const std::uint64_t seed = replicate_seed(cfg.base_seed, 0);

  SignalSpec spec;
  for (std::size_t i = 0; i < cfg.frequencies.size(); ++i)
    spec.components.push_back({cfg.frequencies[i], cfg.amplitudes[i], 0.0});
  spec.noise_sigma = cfg.noise_sigma;
  spec.n = n;
  spec.seed = seed;

  const TimeSeries truth = signal_only(spec);
  const TimeSeries x = generate(spec);
  const KzpParams params =
      params_for(cfg, n, cfg.dz.front(), static_cast<int>(cfg.frequencies.size()));

  ShowcaseReport report;
  report.stats = stats(x);
  report.snr = cfg.noise_sigma > 0 ? snr(spec) : 0.0;

  const KzpResult complete = kzp(x, params);
  report.top_complete = complete.top_frequencies;
  require(!report.top_complete.empty(), "no spectral peak found in the complete series");
  const Reconstruction rec = reconstruct(x, report.top_complete, cfg.m, cfg.k, params.kz);
  report.fit_complete = fit_metrics(truth, rec.estimate);

  report.ar = yule_walker(x, cfg.ar_max_order);
  report.unexplained = unexplained_ratio(report.ar, x);
  report.acf = acf(x, std::min<int>(40, static_cast<int>(n) - 2));

  const TimeSeries xm = inject_missing(x, cfg.missing.front(), seed ^ kMissingStream);
  report.observed_fraction = xm.observed_fraction();
  const KzpResult partial = kzp(xm, params);
  report.top_missing = partial.top_frequencies;
  require(!report.top_missing.empty(), "no spectral peak found with missing samples");
  const Reconstruction rec_m =
      reconstruct(xm, report.top_missing, cfg.m, cfg.k, params.kz);
  report.fit_missing = fit_metrics(truth, rec_m.estimate);
  report.fit_missing_observed = fit_metrics(xm, rec_m.estimate);

  if (!out_dir) return report;

  const auto& dir = *out_dir;
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> artifacts;
  const auto add = [&](const std::string& name) {
    artifacts.push_back(dir / name);
    return dir / name;
  };

  save_csv(x, add("series.csv"));
  save_csv(xm, add("series_missing.csv"));
  const Periodogram standard = raw_periodogram(x, FrequencyGrid::half_band(1.0 / n));
  save_periodogram_csv(add("raw_periodogram.csv"), standard);
  save_kzp_spectrum_csv(add("kzp_spectrum.csv"), complete);
  save_kzp_spectrum_csv(add("kzp_spectrum_missing.csv"), partial);
  save_reconstruction_csv(add("reconstruction.csv"), truth, x, rec.estimate);
  save_reconstruction_csv(add("reconstruction_missing.csv"), truth, xm, rec_m.estimate);
  save_acf_csv(add("acf.csv"), report.acf);

  {
    svg::LineChart chart = make_chart("Standard periodogram", "frequency (cycles/step)", "intensity");
    chart.lines.push_back({"", standard.grid.points, standard.intensity});
    chart.save(add("raw_periodogram.svg"));
  }
  const auto spectrum_chart = [&](const KzpResult& r, const std::string& title,
                                  const std::string& file) {
    svg::LineChart chart = make_chart(title, "frequency (cycles/step)", "intensity");
    chart.log_y = true;
    chart.lines.push_back({"KZ periodogram", r.raw.grid.points, r.raw.intensity, "#bbbbbb"});
    chart.lines.push_back({"DZ smoothed", r.smoothed.grid.points, r.smoothed.smoothed});
    chart.save(add(file));
  };
  spectrum_chart(complete, "KZ periodogram, complete data", "kzp_spectrum.svg");
  spectrum_chart(partial, "KZ periodogram, missing data", "kzp_spectrum_missing.svg");

  const auto overlay = [&](const TimeSeries& observed, const Reconstruction& r,
                           const std::string& title, const std::string& file) {
    // Fifty steps starting at the first reconstructed time.
    const std::size_t first = r.warmup == 0 ? 0 : [&] {
      std::size_t i = 0;
      while (i < r.estimate.size() && !r.estimate.observed(i)) ++i;
      return i;
    }();
    const std::size_t last = std::min(first + 51, observed.size());
    const auto slice = [&](const TimeSeries& s) {
      std::vector<double> v;
      for (std::size_t i = first; i < last; ++i)
        v.push_back(s.observed(i) ? s.value(i) : std::nan(""));
      return v;
    };
    std::vector<double> t;
    for (std::size_t i = first; i < last; ++i) t.push_back(static_cast<double>(observed.time(i)));
    svg::LineChart chart = make_chart(title, "t", "x");
    chart.lines.push_back({"signal + noise", t, slice(observed), "#bbbbbb"});
    chart.lines.push_back({"signal", t, slice(truth), "#1f77b4"});
    chart.lines.push_back({"reconstructed", t, slice(r.estimate), "#d62728"});
    chart.save(add(file));
  };
  overlay(x, rec, "Reconstruction, complete data", "reconstruction.svg");
  overlay(xm, rec_m, "Reconstruction, missing data", "reconstruction_missing.svg");

  {
    std::vector<double> lags;
    for (std::size_t l = 0; l < report.acf.size(); ++l) lags.push_back(static_cast<double>(l));
    svg::LineChart chart = make_chart("Correlogram", "lag", "autocorrelation");
    chart.lines.push_back({"", lags, report.acf, "#1f77b4", true});
    chart.save(add("correlogram.svg"));
  }

  nlohmann::ordered_json results;
  results["variance"] = report.stats.variance;
  results["snr"] = report.snr;
  results["top_frequencies"] = report.top_complete;
  results["top_frequencies_missing"] = report.top_missing;
  results["total_variance"] = complete.total_variance;
  results["reconstruction"] = {{"r", report.fit_complete.r},
                               {"r_squared", report.fit_complete.r_squared},
                               {"n_scored", report.fit_complete.n_scored},
                               {"edge_loss", rec.warmup}};
  results["reconstruction_missing"] = {
      {"observed_fraction", report.observed_fraction},
      {"r", report.fit_missing.r},
      {"r_squared", report.fit_missing.r_squared},
      {"r_vs_observed", report.fit_missing_observed.r},
      {"n_scored", report.fit_missing.n_scored}};
  results["autoregression"] = {{"order", report.ar.order},
                               {"noise_variance", report.ar.noise_variance},
                               {"aic", report.ar.aic},
                               {"stationary", report.ar.stationary},
                               {"unexplained_ratio", report.unexplained}};
  write_text(add("report.json"), results.dump(2) + "\n");
  write_manifest(dir, cfg, artifacts, results);
  return report;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) fail(ErrorCode::Io, "hash context allocation failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

bool monotone_with_inversions(const std::vector<double>& rates, double slack,
                              int allowed_inversions) {
  int inversions = 0;
  for (std::size_t i = 1; i < rates.size(); ++i)
    if (rates[i] < rates[i - 1] - slack) ++inversions;
  return inversions <= allowed_inversions;
}

}  // namespace kzp
