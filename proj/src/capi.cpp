#include "kzp/kzp.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "kzp/kzp.hpp"

struct kzp_series {
  kzp::TimeSeries ts;
};

struct kzp_result {
  kzp::KzpResult result;
  kzp::KzpParams params;
  std::string json;
};

struct kzp_reconstruction {
  kzp::Reconstruction rec;
};

struct kzp_ar_model {
  kzp::ARModel model;
};

namespace {

thread_local std::string last_error;

kzp_status to_status(kzp::ErrorCode code) {
  switch (code) {
    case kzp::ErrorCode::Argument: return KZP_ERR_ARGUMENT;
    case kzp::ErrorCode::Parse: return KZP_ERR_PARSE;
    case kzp::ErrorCode::Structure: return KZP_ERR_STRUCTURE;
    case kzp::ErrorCode::Io: return KZP_ERR_IO;
    case kzp::ErrorCode::InsufficientData: return KZP_ERR_INSUFFICIENT_DATA;
    case kzp::ErrorCode::Unsupported: return KZP_ERR_UNSUPPORTED;
  }
  return KZP_ERR_INTERNAL;
}

template <typename F>
kzp_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return KZP_OK;
  } catch (const kzp::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return KZP_ERR_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return KZP_ERR_INTERNAL;
}

void need(const void* p, const char* name) {
  if (!p) kzp::fail(kzp::ErrorCode::Argument, std::string(name) + " must not be NULL");
}

template <typename T, typename Source>
void copy_out(const Source& src, T* out, std::size_t capacity, std::size_t* count) {
  if (capacity > 0) need(out, "out");
  const std::size_t n = std::min(capacity, static_cast<std::size_t>(src.size()));
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<T>(src[i]);
  if (count) *count = src.size();
}

kzp::SignalSpec to_spec(const kzp_signal_spec* spec) {
  need(spec, "spec");
  if (spec->n_components) need(spec->components, "spec->components");
  kzp::SignalSpec s;
  for (std::size_t i = 0; i < spec->n_components; ++i)
    s.components.push_back({spec->components[i].frequency, spec->components[i].amplitude,
                            spec->components[i].phase});
  s.noise_sigma = spec->noise_sigma;
  s.n = spec->n;
  s.seed = spec->seed;
  s.random_phase = spec->random_phase != 0;
  return s;
}

kzp::KzOptions to_options(int edge, double min_coverage) {
  kzp::require(edge == KZP_EDGE_DROP || edge == KZP_EDGE_PARTIAL, "unknown edge policy");
  kzp::KzOptions opt;
  opt.edge = edge == KZP_EDGE_DROP ? kzp::EdgePolicy::Drop : kzp::EdgePolicy::Partial;
  opt.min_coverage = min_coverage;
  return opt;
}

kzp::KzpParams to_params(const kzp_params* p) {
  need(p, "params");
  kzp::require(p->method == KZP_METHOD_DZ || p->method == KZP_METHOD_NZ,
               "unknown smoothing method");
  kzp::require(p->dz_statistic == KZP_DZ_SUM_OF_SQUARES ||
                   p->dz_statistic == KZP_DZ_FIRST_DIFFERENCES,
               "unknown DZ statistic");
  kzp::KzpParams out;
  out.m = p->m;
  out.k = p->k;
  out.smooth_level = p->smooth_level;
  out.method = p->method == KZP_METHOD_DZ ? kzp::SmoothingMethod::DZ : kzp::SmoothingMethod::NZ;
  out.digits = p->digits;
  out.top = p->top;
  out.oversample = p->oversample;
  out.kz = to_options(p->edge, p->min_coverage);
  out.dz_statistic = p->dz_statistic == KZP_DZ_SUM_OF_SQUARES
                         ? kzp::DzStatistic::SumOfSquares
                         : kzp::DzStatistic::FirstDifferences;
  out.validate();
  return out;
}

void write_file(const char* path, const std::string& text) {
  need(path, "path");
  std::ofstream f(path, std::ios::binary);
  if (!f) kzp::fail(kzp::ErrorCode::Io, std::string("cannot write ") + path);
  f << text;
  if (!f) kzp::fail(kzp::ErrorCode::Io, std::string("write failure on ") + path);
}

std::vector<double> with_gaps(const kzp::TimeSeries& ts) {
  std::vector<double> v(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    v[i] = ts.observed(i) ? ts.value(i) : std::nan("");
  return v;
}

}  // namespace

extern "C" {

const char* kzp_version(void) { return "1.0.0"; }

const char* kzp_status_name(kzp_status status) {
  switch (status) {
    case KZP_OK: return "ok";
    case KZP_ERR_ARGUMENT: return "invalid argument";
    case KZP_ERR_PARSE: return "parse error";
    case KZP_ERR_STRUCTURE: return "malformed input";
    case KZP_ERR_IO: return "i/o error";
    case KZP_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case KZP_ERR_UNSUPPORTED: return "unsupported input";
    case KZP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* kzp_last_error(void) { return last_error.c_str(); }

kzp_status kzp_series_create(const double* values, const unsigned char* mask, size_t n,
                             int64_t start_index, kzp_series** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    kzp::require(n > 0, "series must not be empty");
    need(values, "values");
    std::vector<double> v(values, values + n);
    std::vector<std::uint8_t> m(n, 1);
    if (mask)
      for (std::size_t i = 0; i < n; ++i) m[i] = mask[i] ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i)
      kzp::require(!m[i] || std::isfinite(v[i]), "observed values must be finite");
    *out = new kzp_series{kzp::TimeSeries(std::move(v), std::move(m), start_index)};
  });
}

kzp_status kzp_series_load_csv(const char* path, kzp_series** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    need(path, "path");
    *out = new kzp_series{kzp::load_csv(path)};
  });
}

kzp_status kzp_series_save_csv(const kzp_series* series, const char* path) {
  return guard([&] {
    need(series, "series");
    need(path, "path");
    kzp::save_csv(series->ts, path);
  });
}

void kzp_series_free(kzp_series* series) { delete series; }

size_t kzp_series_length(const kzp_series* series) { return series ? series->ts.size() : 0; }

size_t kzp_series_observed(const kzp_series* series) {
  return series ? series->ts.n_observed() : 0;
}

int64_t kzp_series_start(const kzp_series* series) {
  return series ? series->ts.start_index() : 0;
}

kzp_status kzp_series_data(const kzp_series* series, double* values, unsigned char* mask,
                           size_t capacity, size_t* count) {
  return guard([&] {
    need(series, "series");
    const auto& ts = series->ts;
    const std::size_t n = std::min(capacity, ts.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (values) values[i] = ts.value(i);
      if (mask) mask[i] = ts.observed(i) ? 1 : 0;
    }
    if (count) *count = ts.size();
  });
}

kzp_status kzp_series_stats(const kzp_series* series, kzp_stats* out) {
  return guard([&] {
    need(series, "series");
    need(out, "out");
    const auto s = kzp::stats(series->ts);
    *out = {s.n_observed, s.mean, s.variance, s.total_power};
  });
}

kzp_status kzp_simulate(const kzp_signal_spec* spec, int signal_only, kzp_series** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    const auto s = to_spec(spec);
    *out = new kzp_series{signal_only ? kzp::signal_only(s) : kzp::generate(s)};
  });
}

kzp_status kzp_inject_missing(const kzp_series* series, double p, uint64_t seed,
                              kzp_series** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    need(series, "series");
    *out = new kzp_series{kzp::inject_missing(series->ts, p, seed)};
  });
}

kzp_status kzp_snr(const kzp_signal_spec* spec, double* out) {
  return guard([&] {
    need(out, "out");
    *out = kzp::snr(to_spec(spec));
  });
}

kzp_status kzp_amplitude_for_snr(double snr, double noise_sigma, double* out) {
  return guard([&] {
    need(out, "out");
    *out = kzp::amplitude_for_snr(snr, noise_sigma);
  });
}

void kzp_params_default(kzp_params* params) {
  if (!params) return;
  const kzp::KzpParams d;
  params->m = d.m;
  params->k = d.k;
  params->smooth_level = d.smooth_level;
  params->method = KZP_METHOD_DZ;
  params->digits = d.digits;
  params->top = d.top;
  params->oversample = d.oversample;
  params->edge = KZP_EDGE_DROP;
  params->min_coverage = d.kz.min_coverage;
  params->dz_statistic = KZP_DZ_SUM_OF_SQUARES;
}

kzp_status kzp_params_validate(const kzp_params* params) {
  return guard([&] { to_params(params); });
}

kzp_status kzp_raw_periodogram(const kzp_series* series, double step, double* frequencies,
                               double* intensity, size_t capacity, size_t* count) {
  return guard([&] {
    need(series, "series");
    const auto pg = kzp::raw_periodogram(series->ts, kzp::FrequencyGrid::half_band(step));
    if (capacity > 0) kzp::require(frequencies || intensity, "no output array given");
    const std::size_t n = std::min(capacity, pg.intensity.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (frequencies) frequencies[i] = pg.grid.points[i];
      if (intensity) intensity[i] = pg.intensity[i];
    }
    if (count) *count = pg.intensity.size();
  });
}

kzp_status kzp_run(const kzp_series* series, const kzp_params* params, kzp_result** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    need(series, "series");
    const auto p = to_params(params);
    auto result = kzp::kzp(series->ts, p);
    auto json = kzp::kzp_summary_json(result, p);
    *out = new kzp_result{std::move(result), p, std::move(json)};
  });
}

void kzp_result_free(kzp_result* result) { delete result; }

kzp_status kzp_result_top(const kzp_result* result, double* out, size_t capacity,
                          size_t* count) {
  return guard([&] {
    need(result, "result");
    copy_out(result->result.top_frequencies, out, capacity, count);
  });
}

double kzp_result_total_variance(const kzp_result* result) {
  return result ? result->result.total_variance : std::nan("");
}

kzp_status kzp_result_spectrum(const kzp_result* result, double* frequencies, double* raw,
                               double* smoothed, int* half_widths, size_t capacity,
                               size_t* count) {
  return guard([&] {
    need(result, "result");
    const auto& r = result->result;
    const std::size_t total = r.raw.intensity.size();
    const std::size_t n = std::min(capacity, total);
    for (std::size_t i = 0; i < n; ++i) {
      if (frequencies) frequencies[i] = r.raw.grid.points[i];
      if (raw) raw[i] = r.raw.intensity[i];
      if (smoothed) smoothed[i] = r.smoothed.smoothed[i];
      if (half_widths) half_widths[i] = r.smoothed.half_widths[i];
    }
    if (count) *count = total;
  });
}

kzp_status kzp_result_write_csv(const kzp_result* result, const char* path) {
  return guard([&] {
    need(result, "result");
    need(path, "path");
    kzp::save_kzp_spectrum_csv(path, result->result);
  });
}

kzp_status kzp_result_write_json(const kzp_result* result, const char* path) {
  return guard([&] {
    need(result, "result");
    write_file(path, result->json);
  });
}

kzp_status kzp_result_write_svg(const kzp_result* result, const char* path) {
  return guard([&] {
    need(result, "result");
    need(path, "path");
    const auto& r = result->result;
    kzp::svg::LineChart chart;
    chart.title = "KZ periodogram";
    chart.x_label = "frequency (cycles/step)";
    chart.y_label = "intensity";
    chart.log_y = true;
    chart.lines.push_back({"KZ periodogram", r.raw.grid.points, r.raw.intensity, "#bbbbbb"});
    chart.lines.push_back({std::string(kzp::to_string(result->params.method)) + " smoothed",
                           r.smoothed.grid.points, r.smoothed.smoothed});
    chart.save(path);
  });
}

kzp_status kzp_result_json(const kzp_result* result, char* out, size_t capacity,
                           size_t* count) {
  return guard([&] {
    need(result, "result");
    const auto& json = result->json;
    if (capacity > 0) {
      need(out, "out");
      const std::size_t n = std::min(capacity - 1, json.size());
      std::memcpy(out, json.data(), n);
      out[n] = '\0';
    }
    if (count) *count = json.size();
  });
}

kzp_status kzp_reconstruct(const kzp_series* series, const double* frequencies,
                           size_t n_frequencies, int m, int k, int edge,
                           kzp_reconstruction** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    need(series, "series");
    if (n_frequencies) need(frequencies, "frequencies");
    const kzp::KzOptions defaults;
    *out = new kzp_reconstruction{
        kzp::reconstruct(series->ts, std::span<const double>(frequencies, n_frequencies), m,
                         k, to_options(edge, defaults.min_coverage))};
  });
}

void kzp_reconstruction_free(kzp_reconstruction* rec) { delete rec; }

kzp_status kzp_reconstruction_estimate(const kzp_reconstruction* rec, kzp_series** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    need(rec, "reconstruction");
    *out = new kzp_series{rec->rec.estimate};
  });
}

size_t kzp_reconstruction_warmup(const kzp_reconstruction* rec) {
  return rec ? rec->rec.warmup : 0;
}

kzp_status kzp_reconstruction_write_csv(const kzp_reconstruction* rec,
                                        const kzp_series* truth, const kzp_series* observed,
                                        const char* path) {
  return guard([&] {
    need(rec, "reconstruction");
    need(observed, "observed");
    need(path, "path");
    std::optional<kzp::TimeSeries> t;
    if (truth) t = truth->ts;
    kzp::save_reconstruction_csv(path, t, observed->ts, rec->rec.estimate);
  });
}

kzp_status kzp_reconstruction_write_svg(const kzp_reconstruction* rec,
                                        const kzp_series* observed, const char* path) {
  return guard([&] {
    need(rec, "reconstruction");
    need(observed, "observed");
    need(path, "path");
    const auto& ts = observed->ts;
    kzp::require(ts.size() == rec->rec.estimate.size(),
                 "observed series and reconstruction differ in length");
    std::vector<double> t(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) t[i] = static_cast<double>(ts.time(i));
    kzp::svg::LineChart chart;
    chart.title = "Reconstruction";
    chart.x_label = "t";
    chart.y_label = "x";
    chart.lines.push_back({"observed", t, with_gaps(ts), "#bbbbbb"});
    chart.lines.push_back({"reconstructed", t, with_gaps(rec->rec.estimate), "#d62728"});
    chart.save(path);
  });
}

kzp_status kzp_fit_metrics(const kzp_series* reference, const kzp_series* estimate,
                           kzp_fit* out) {
  return guard([&] {
    need(reference, "reference");
    need(estimate, "estimate");
    need(out, "out");
    const auto f = kzp::fit_metrics(reference->ts, estimate->ts);
    *out = {f.r, f.r_squared, f.n_scored};
  });
}

kzp_status kzp_ar_fit(const kzp_series* series, int max_order, kzp_ar_model** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    need(series, "series");
    std::optional<int> order;
    if (max_order >= 0) order = max_order;
    *out = new kzp_ar_model{kzp::yule_walker(series->ts, order)};
  });
}

void kzp_ar_free(kzp_ar_model* model) { delete model; }

int kzp_ar_order(const kzp_ar_model* model) { return model ? model->model.order : -1; }

double kzp_ar_noise_variance(const kzp_ar_model* model) {
  return model ? model->model.noise_variance : std::nan("");
}

double kzp_ar_aic(const kzp_ar_model* model) {
  return model ? model->model.aic : std::nan("");
}

int kzp_ar_stationary(const kzp_ar_model* model) {
  return model && model->model.stationary ? 1 : 0;
}

kzp_status kzp_ar_coefficients(const kzp_ar_model* model, double* out, size_t capacity,
                               size_t* count) {
  return guard([&] {
    need(model, "model");
    copy_out(model->model.coefficients, out, capacity, count);
  });
}

kzp_status kzp_ar_unexplained(const kzp_ar_model* model, const kzp_series* series,
                              double* out) {
  return guard([&] {
    need(model, "model");
    need(series, "series");
    need(out, "out");
    *out = kzp::unexplained_ratio(model->model, series->ts);
  });
}

kzp_status kzp_acf(const kzp_series* series, int max_lag, double* out, size_t capacity,
                   size_t* count) {
  return guard([&] {
    need(series, "series");
    copy_out(kzp::acf(series->ts, max_lag), out, capacity, count);
  });
}

kzp_status kzp_acf_write_csv(const kzp_series* series, int max_lag, const char* path) {
  return guard([&] {
    need(series, "series");
    need(path, "path");
    kzp::save_acf_csv(path, kzp::acf(series->ts, max_lag));
  });
}

kzp_status kzp_acf_write_svg(const kzp_series* series, int max_lag, const char* path) {
  return guard([&] {
    need(series, "series");
    need(path, "path");
    const auto r = kzp::acf(series->ts, max_lag);
    std::vector<double> lags(r.size());
    for (std::size_t l = 0; l < r.size(); ++l) lags[l] = static_cast<double>(l);
    kzp::svg::LineChart chart;
    chart.title = "Correlogram";
    chart.x_label = "lag";
    chart.y_label = "autocorrelation";
    chart.lines.push_back({"", lags, r, "#1f77b4", true});
    chart.save(path);
  });
}

kzp_status kzp_experiment_run(const char* study, const char* config_path,
                              const char* overrides, const char* out_dir) {
  return guard([&] {
    need(study, "study");
    need(out_dir, "out_dir");
    const auto which = kzp::parse_study(study);
    kzp::KeyValueConfig kv;
    if (config_path) kv = kzp::KeyValueConfig::load(config_path);
    if (overrides) {
      const auto extra = kzp::KeyValueConfig::parse(overrides);
      for (const auto& [key, value] : extra.entries()) kv.set(key, value);
    }
    const auto cfg = kzp::load_config(which, kv);
    if (which == kzp::Study::Showcase)
      kzp::run_showcase(cfg, std::filesystem::path(out_dir));
    else
      kzp::write_study(kzp::run_study(cfg), out_dir);
  });
}

}  // extern "C"
