// Command-line front end. Talks to the library only through kzp.h.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kzp/kzp.h"

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kMissingStream = 0x9e3779b97f4a7c15ULL;

struct Failure {
  int exit_code;
};

void check(kzp_status status, const std::string& context) {
  if (status == KZP_OK) return;
  std::cerr << "kzp: " << context << ": " << kzp_status_name(status) << ": "
            << kzp_last_error() << "\n";
  throw Failure{1};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "kzp: usage error: " << message << "\nRun with --help for usage.\n";
  throw Failure{2};
}

fs::path output_dir() {
  const char* env = std::getenv("KZP_OUTPUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

std::string default_path(const std::string& given, const std::string& name) {
  if (!given.empty()) return given;
  const fs::path dir = output_dir();
  fs::create_directories(dir);
  return (dir / name).string();
}

std::string svg_beside(const std::string& csv) {
  return fs::path(csv).replace_extension(".svg").string();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Owning wrappers so every exit path releases handles.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  operator T*() const { return p; }
};
using Series = Handle<kzp_series, kzp_series_free>;
using Result = Handle<kzp_result, kzp_result_free>;
using Recon = Handle<kzp_reconstruction, kzp_reconstruction_free>;
using ARModel = Handle<kzp_ar_model, kzp_ar_free>;

void load(const std::string& path, Series& s) {
  check(kzp_series_load_csv(path.c_str(), s.out()), "reading " + path);
}

const std::map<std::string, int> kMethods{{"dz", KZP_METHOD_DZ}, {"nz", KZP_METHOD_NZ}};
const std::map<std::string, int> kEdges{{"drop", KZP_EDGE_DROP},
                                        {"partial", KZP_EDGE_PARTIAL}};
const std::map<std::string, int> kStatistics{
    {"squares", KZP_DZ_SUM_OF_SQUARES}, {"differences", KZP_DZ_FIRST_DIFFERENCES}};

struct KzpOptions {
  std::string in;
  std::string out;
  std::string json;
  std::string svg;
  bool plot = false;
  kzp_params params{};
};

void add_kzp_options(CLI::App& app, KzpOptions& o) {
  kzp_params_default(&o.params);
  auto& p = o.params;
  app.add_option("--in,-i", o.in, "input CSV (t,value; empty value = missing)");
  app.add_option("--m", p.m, "KZ window length")->capture_default_str();
  app.add_option("--k", p.k, "KZ iterations")->capture_default_str();
  app.add_option("--smooth,--smooth-level", p.smooth_level,
                 "proportion of smoothness in (0,1]")
      ->capture_default_str();
  app.add_option("--method", p.method, "adaptive smoothing: dz or nz")
      ->transform(CLI::CheckedTransformer(kMethods, CLI::ignore_case))
      ->default_str("dz");
  app.add_option("--digits", p.digits, "decimal places of reported frequencies")
      ->capture_default_str();
  app.add_option("--top", p.top, "number of frequencies reported")->capture_default_str();
  app.add_option("--oversample", p.oversample, "grid points per 1/m")->capture_default_str();
  app.add_option("--edge", p.edge, "KZ edge policy: drop or partial")
      ->transform(CLI::CheckedTransformer(kEdges, CLI::ignore_case))
      ->default_str("drop");
  app.add_option("--min-coverage", p.min_coverage,
                 "KZ coverage threshold relative to the observed fraction")
      ->capture_default_str();
  app.add_option("--statistic", p.dz_statistic,
                 "DZ window statistic: squares or differences")
      ->transform(CLI::CheckedTransformer(kStatistics, CLI::ignore_case))
      ->default_str("squares");
  app.add_option("--out,-o", o.out, "spectrum CSV (default $KZP_OUTPUT_DIR/kzp_spectrum.csv)");
  app.add_option("--json", o.json, "also write a JSON summary");
  app.add_flag("--plot", o.plot, "write an SVG of the spectrum (log scale)");
  app.add_option("--svg", o.svg, "SVG path (implies --plot)");
}

int cmd_kzp(KzpOptions& o) {
  if (o.in.empty()) usage_error("--in is required");
  if (kzp_params_validate(&o.params) != KZP_OK) usage_error(kzp_last_error());
  Series s;
  load(o.in, s);
  Result r;
  check(kzp_run(s, &o.params, r.out()), "kzp");

  size_t count = 0;
  check(kzp_result_top(r, nullptr, 0, &count), "kzp");
  std::vector<double> top(count);
  check(kzp_result_top(r, top.data(), top.size(), &count), "kzp");

  const std::string csv = default_path(o.out, "kzp_spectrum.csv");
  check(kzp_result_write_csv(r, csv.c_str()), "writing " + csv);
  if (!o.json.empty()) check(kzp_result_write_json(r, o.json.c_str()), "writing " + o.json);
  std::string svg;
  if (o.plot || !o.svg.empty()) {
    svg = o.svg.empty() ? svg_beside(csv) : o.svg;
    check(kzp_result_write_svg(r, svg.c_str()), "writing " + svg);
  }

  kzp_stats st{};
  check(kzp_series_stats(s, &st), "stats");

  std::cout << "top_frequencies:";
  for (double f : top) std::cout << ' ' << fixed(f, o.params.digits);
  std::cout << "\ntotal_variance: " << fixed(kzp_result_total_variance(r), o.params.digits)
            << "\nseries_variance: " << fixed(st.variance, o.params.digits)
            << "\nspectrum: " << csv << "\n";
  if (!svg.empty()) std::cout << "plot: " << svg << "\n";
  return 0;
}

struct SimulateOptions {
  size_t n = 0;
  std::vector<double> freq;
  std::vector<double> amp;
  std::vector<double> phase;
  double sigma = -1.0;
  double noise_variance = -1.0;
  uint64_t seed = 0;
  bool random_phase = false;
  double missing = 0.0;
  uint64_t missing_seed = 0;
  bool missing_seed_set = false;
  std::string out;
  std::string signal_out;
};

int cmd_simulate(SimulateOptions& o) {
  if (o.freq.size() != o.amp.size())
    usage_error("--freq and --amp need the same number of values");
  if (!o.phase.empty() && o.phase.size() != o.freq.size())
    usage_error("--phase needs one value per frequency");
  if (o.sigma >= 0.0 && o.noise_variance >= 0.0)
    usage_error("give --sigma or --noise-variance, not both");
  double sigma = 0.0;
  if (o.sigma >= 0.0) sigma = o.sigma;
  if (o.noise_variance >= 0.0) sigma = std::sqrt(o.noise_variance);

  std::vector<kzp_component> comps;
  for (size_t i = 0; i < o.freq.size(); ++i)
    comps.push_back({o.freq[i], o.amp[i], o.phase.empty() ? 0.0 : o.phase[i]});
  const kzp_signal_spec spec{comps.data(), comps.size(), sigma, o.n, o.seed,
                             o.random_phase ? 1 : 0};

  Series x;
  {
    const kzp_status st = kzp_simulate(&spec, 0, x.out());
    if (st == KZP_ERR_ARGUMENT) usage_error(kzp_last_error());
    check(st, "simulate");
  }
  const std::string out = default_path(o.out, "simulated.csv");
  if (o.missing > 0.0) {
    Series xm;
    const uint64_t seed = o.missing_seed_set ? o.missing_seed : (o.seed ^ kMissingStream);
    check(kzp_inject_missing(x, o.missing, seed, xm.out()), "inject missing");
    check(kzp_series_save_csv(xm, out.c_str()), "writing " + out);
    std::cout << "observed: " << kzp_series_observed(xm) << " of " << kzp_series_length(xm)
              << "\n";
  } else {
    check(kzp_series_save_csv(x, out.c_str()), "writing " + out);
  }
  if (!o.signal_out.empty()) {
    Series truth;
    check(kzp_simulate(&spec, 1, truth.out()), "simulate");
    check(kzp_series_save_csv(truth, o.signal_out.c_str()), "writing " + o.signal_out);
  }

  std::cout << "n: " << o.n << "\nseed: " << o.seed << "\nnoise_sigma: " << sigma
            << "\nnoise_variance: " << sigma * sigma << "\n";
  for (const auto& c : comps) {
    std::cout << "component: frequency=" << c.frequency << " amplitude=" << c.amplitude
              << " phase=";
    if (o.random_phase) {
      std::cout << "random\n";
    } else {
      std::cout << c.phase << "\n";
    }
  }
  if (sigma > 0.0 && !comps.empty()) {
    double ratio = 0.0;
    check(kzp_snr(&spec, &ratio), "snr");
    std::cout << "snr: " << ratio << "\n";
  }
  std::cout << "output: " << out << "\n";
  return 0;
}

struct ReconstructOptions {
  std::string in;
  std::string truth;
  std::vector<double> freq;
  int m = 500;
  int k = 3;
  int edge = KZP_EDGE_DROP;
  int digits = 3;
  std::string out;
  std::string svg;
  bool plot = false;
};

int cmd_reconstruct(ReconstructOptions& o) {
  if (o.in.empty()) usage_error("--in is required");
  if (o.freq.empty()) usage_error("--freq is required");
  if (o.m < 1 || o.k < 1) usage_error("--m and --k must be >= 1");
  Series x;
  load(o.in, x);
  Series truth;
  if (!o.truth.empty()) load(o.truth, truth);

  Recon rec;
  check(kzp_reconstruct(x, o.freq.data(), o.freq.size(), o.m, o.k, o.edge, rec.out()),
        "reconstruct");
  const std::string csv = default_path(o.out, "reconstruction.csv");
  check(kzp_reconstruction_write_csv(rec, truth, x, csv.c_str()), "writing " + csv);
  std::string svg;
  if (o.plot || !o.svg.empty()) {
    svg = o.svg.empty() ? svg_beside(csv) : o.svg;
    check(kzp_reconstruction_write_svg(rec, x, svg.c_str()), "writing " + svg);
  }

  Series est;
  check(kzp_reconstruction_estimate(rec, est.out()), "reconstruct");
  kzp_fit fit{};
  check(kzp_fit_metrics(truth.p ? truth : x, est, &fit), "fit metrics");
  std::cout << "reference: " << (truth.p ? "truth" : "observed") << "\n"
            << "r: " << fixed(fit.r, o.digits) << "\n"
            << "r_squared: " << fixed(fit.r_squared, o.digits) << "\n"
            << "n_scored: " << fit.n_scored << "\n"
            << "edge_loss: " << kzp_reconstruction_warmup(rec) << "\n"
            << "output: " << csv << "\n";
  if (!svg.empty()) std::cout << "plot: " << svg << "\n";
  return 0;
}

struct ExperimentOptions {
  std::string study;
  std::string config;
  std::vector<std::string> set;
  int replicates = 0;
  uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
};

int cmd_experiment(ExperimentOptions& o) {
  std::string overrides;
  for (const auto& kv : o.set) {
    if (kv.find('=') == std::string::npos) usage_error("--set expects key=value, got " + kv);
    overrides += kv + "\n";
  }
  if (o.replicates > 0) overrides += "replicates = " + std::to_string(o.replicates) + "\n";
  if (o.seed_set) overrides += "base_seed = " + std::to_string(o.seed) + "\n";

  const fs::path dir = o.out_dir.empty() ? output_dir() / o.study : fs::path(o.out_dir);
  const kzp_status st = kzp_experiment_run(o.study.c_str(),
                                           o.config.empty() ? nullptr : o.config.c_str(),
                                           overrides.c_str(), dir.string().c_str());
  if (st == KZP_ERR_ARGUMENT || st == KZP_ERR_PARSE) usage_error(kzp_last_error());
  check(st, "experiment " + o.study);

  const fs::path report =
      o.study == "showcase" ? dir / "report.json" : dir / (o.study + "_summary.csv");
  std::ifstream in(report);
  std::cout << in.rdbuf();
  std::cout << "artifacts: " << dir.string() << "\n";
  return 0;
}

struct AROptions {
  std::string in;
  int max_order = -1;
  int lags = 40;
  int digits = 3;
  std::string out;
  std::string svg;
  bool plot = false;
};

int cmd_ar(AROptions& o) {
  if (o.in.empty()) usage_error("--in is required");
  if (o.lags < 0) usage_error("--lags must be >= 0");
  Series x;
  load(o.in, x);
  ARModel model;
  check(kzp_ar_fit(x, o.max_order, model.out()), "autoregression");
  double unexplained = 0.0;
  check(kzp_ar_unexplained(model, x, &unexplained), "autoregression");
  const std::string csv = default_path(o.out, "acf.csv");
  check(kzp_acf_write_csv(x, o.lags, csv.c_str()), "writing " + csv);
  std::string svg;
  if (o.plot || !o.svg.empty()) {
    svg = o.svg.empty() ? svg_beside(csv) : o.svg;
    check(kzp_acf_write_svg(x, o.lags, svg.c_str()), "writing " + svg);
  }
  std::cout << "order: " << kzp_ar_order(model) << "\n"
            << "noise_variance: " << fixed(kzp_ar_noise_variance(model), o.digits) << "\n"
            << "aic: " << fixed(kzp_ar_aic(model), o.digits) << "\n"
            << "stationary: " << (kzp_ar_stationary(model) ? "yes" : "no") << "\n"
            << "unexplained_ratio: " << fixed(unexplained, o.digits) << "\n"
            << "acf: " << csv << "\n";
  if (!svg.empty()) std::cout << "plot: " << svg << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KZ periodogram with adaptive smoothing, KZFT reconstruction and an "
               "autoregressive baseline.\nWithout a subcommand, runs the periodogram on --in."};
  app.name("kzp");
  app.set_version_flag("--version", kzp_version());
  app.require_subcommand(0, 1);

  KzpOptions kzp_opts;
  add_kzp_options(app, kzp_opts);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "sum of sinusoids plus Gaussian noise");
  simulate->add_option("--n", sim.n, "number of samples")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--freq", sim.freq, "frequencies, cycles per step")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 0.5));
  simulate->add_option("--amp", sim.amp, "amplitudes")->delimiter(',');
  simulate->add_option("--phase", sim.phase, "phases in radians")->delimiter(',');
  simulate->add_option("--sigma", sim.sigma, "noise standard deviation")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--noise-variance", sim.noise_variance, "noise variance")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", sim.seed, "random seed")->capture_default_str();
  simulate->add_flag("--random-phase", sim.random_phase, "draw phases from the seed");
  simulate->add_option("--missing", sim.missing, "fraction of samples removed at random")
      ->check(CLI::Range(0.0, 1.0));
  simulate
      ->add_option_function<uint64_t>(
          "--missing-seed",
          [&](const uint64_t& v) {
            sim.missing_seed = v;
            sim.missing_seed_set = true;
          },
          "seed of the missing-value mask")
      ->type_name("UINT");
  simulate->add_option("--out,-o", sim.out, "output CSV (default $KZP_OUTPUT_DIR/simulated.csv)");
  simulate->add_option("--signal-out", sim.signal_out, "also write the noise-free signal");

  ReconstructOptions rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "KZFT reconstruction at given frequencies");
  reconstruct->add_option("--in,-i", rec.in, "input CSV")->required();
  reconstruct->add_option("--freq", rec.freq, "frequencies to reconstruct")
      ->required()
      ->delimiter(',')
      ->check(CLI::Range(0.0, 0.5));
  reconstruct->add_option("--truth", rec.truth, "noise-free signal CSV to score against");
  reconstruct->add_option("--m", rec.m, "KZ window length")->capture_default_str();
  reconstruct->add_option("--k", rec.k, "KZ iterations")->capture_default_str();
  reconstruct->add_option("--edge", rec.edge, "edge policy: drop or partial")
      ->transform(CLI::CheckedTransformer(kEdges, CLI::ignore_case))
      ->default_str("drop");
  reconstruct->add_option("--digits", rec.digits, "decimal places of printed metrics")
      ->check(CLI::Range(0, 15))
      ->capture_default_str();
  reconstruct->add_option("--out,-o", rec.out,
                          "t,truth,observed,estimate CSV (default "
                          "$KZP_OUTPUT_DIR/reconstruction.csv)");
  reconstruct->add_flag("--plot", rec.plot, "write an overlay SVG");
  reconstruct->add_option("--svg", rec.svg, "SVG path (implies --plot)");

  ExperimentOptions exp;
  auto* experiment = app.add_subcommand("experiment", "run a simulation study");
  experiment->add_option("study", exp.study, "sensitivity, accuracy, resolution, robustness or showcase")
      ->required()
      ->check(CLI::IsMember({"sensitivity", "accuracy", "resolution", "robustness", "showcase"}));
  experiment->add_option("--config,-c", exp.config, "key = value file overriding the defaults")
      ->check(CLI::ExistingFile);
  experiment->add_option("--set", exp.set, "single key=value override (repeatable)");
  experiment->add_option("--replicates", exp.replicates, "replicates per cell")
      ->check(CLI::PositiveNumber);
  experiment
      ->add_option_function<uint64_t>(
          "--seed",
          [&](const uint64_t& v) {
            exp.seed = v;
            exp.seed_set = true;
          },
          "base seed")
      ->type_name("UINT");
  experiment->add_option("--out-dir,-o", exp.out_dir,
                         "artifact directory (default $KZP_OUTPUT_DIR/<study>)");

  AROptions ar;
  auto* arcmd = app.add_subcommand("ar", "Yule-Walker autoregression baseline");
  arcmd->add_option("--in,-i", ar.in, "input CSV (fully observed)")->required();
  arcmd->add_option("--max-order", ar.max_order, "largest order tried (default 10 log10 n)");
  arcmd->add_option("--lags", ar.lags, "autocorrelation lags written")->capture_default_str();
  arcmd->add_option("--digits", ar.digits, "decimal places of printed values")
      ->check(CLI::Range(0, 15))
      ->capture_default_str();
  arcmd->add_option("--out,-o", ar.out, "ACF CSV (default $KZP_OUTPUT_DIR/acf.csv)");
  arcmd->add_flag("--plot", ar.plot, "write a correlogram SVG");
  arcmd->add_option("--svg", ar.svg, "SVG path (implies --plot)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*reconstruct) return cmd_reconstruct(rec);
    if (*experiment) return cmd_experiment(exp);
    if (*arcmd) return cmd_ar(ar);
    return cmd_kzp(kzp_opts);
  } catch (const Failure& f) {
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "kzp: " << e.what() << "\n";
    return 1;
  }
}
