#include "arbench/arbench.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "arbench/arls.hpp"
#include "arbench/bench.hpp"
#include "arbench/config.hpp"
#include "arbench/error.hpp"
#include "arbench/linalg.hpp"
#include "arbench/predictors.hpp"
#include "arbench/series.hpp"

struct arb_series {
  arbench::ObservedSeries value;
};

struct arb_predictor {
  arbench::Predictor value;
};

struct arb_config {
  arbench::ExperimentConfig value;
};

struct arb_sweep {
  arbench::SweepResult value;
};

namespace {

thread_local std::string g_last_error;

arb_status to_status(arbench::Errc code) {
  using arbench::Errc;
  switch (code) {
    case Errc::InvalidArgument: return ARB_ERR_INVALID_ARGUMENT;
    case Errc::NearSingular: return ARB_ERR_NEAR_SINGULAR;
    case Errc::NotSymmetric: return ARB_ERR_NOT_SYMMETRIC;
    case Errc::NonStationary: return ARB_ERR_NON_STATIONARY;
    case Errc::DegenerateSeries: return ARB_ERR_DEGENERATE_SERIES;
    case Errc::ZeroVariance: return ARB_ERR_ZERO_VARIANCE;
    case Errc::ParseError: return ARB_ERR_PARSE;
    case Errc::MissingWarmup: return ARB_ERR_MISSING_WARMUP;
    case Errc::Diverged: return ARB_ERR_DIVERGED;
    case Errc::TooShort: return ARB_ERR_TOO_SHORT;
    case Errc::LengthMismatch: return ARB_ERR_LENGTH_MISMATCH;
    case Errc::EmptyInput: return ARB_ERR_EMPTY_INPUT;
    case Errc::Io: return ARB_ERR_IO;
    case Errc::Config: return ARB_ERR_CONFIG;
  }
  return ARB_ERR_INTERNAL;
}

arb_status fail(arb_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
arb_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const arbench::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(ARB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ARB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ARB_ERR_INTERNAL, "unknown error");
  }
}

arb_status null_argument(const char* name) {
  return fail(ARB_ERR_INVALID_ARGUMENT, std::string("null argument: ") + name);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

arbench::Hyperparams from_c(const arb_hyperparams* h) {
  arbench::Hyperparams out;
  if (!h) return out;
  out.ogd_eta = h->ogd_eta;
  out.kf_sigma2 = h->kf_sigma2;
  out.kf_pinit = h->kf_pinit;
  out.aerr_radius = h->aerr_radius;
  out.aerr_samples = h->aerr_samples;
  out.aerr_eta = h->aerr_eta;
  out.aerr_gamma = h->aerr_gamma;
  out.arls_iters = h->arls_iters;
  out.arls_tol = h->arls_tol;
  out.yw_incremental = h->yw_incremental != 0;
  return out;
}

bool valid_method(arb_method m) { return m >= ARB_METHOD_YW && m <= ARB_METHOD_ARLS; }

arbench::Method to_method(arb_method m) { return static_cast<arbench::Method>(m); }

}  // namespace

extern "C" {

const char* arb_version(void) { return ARBENCH_VERSION; }

const char* arb_last_error(void) { return g_last_error.c_str(); }

const char* arb_status_name(arb_status status) {
  switch (status) {
    case ARB_OK: return "OK";
    case ARB_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case ARB_ERR_NEAR_SINGULAR: return "NearSingular";
    case ARB_ERR_NOT_SYMMETRIC: return "NotSymmetric";
    case ARB_ERR_NON_STATIONARY: return "NonStationary";
    case ARB_ERR_DEGENERATE_SERIES: return "DegenerateSeries";
    case ARB_ERR_ZERO_VARIANCE: return "ZeroVariance";
    case ARB_ERR_PARSE: return "ParseError";
    case ARB_ERR_MISSING_WARMUP: return "MissingWarmup";
    case ARB_ERR_DIVERGED: return "Diverged";
    case ARB_ERR_TOO_SHORT: return "TooShort";
    case ARB_ERR_LENGTH_MISMATCH: return "LengthMismatch";
    case ARB_ERR_EMPTY_INPUT: return "EmptyInput";
    case ARB_ERR_IO: return "Io";
    case ARB_ERR_CONFIG: return "Config";
    case ARB_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

void arb_string_free(char* text) { delete[] text; }

void arb_hyperparams_default(arb_hyperparams* out) {
  if (!out) return;
  const arbench::Hyperparams d;
  out->ogd_eta = d.ogd_eta;
  out->kf_sigma2 = d.kf_sigma2;
  out->kf_pinit = d.kf_pinit;
  out->aerr_radius = d.aerr_radius;
  out->aerr_samples = d.aerr_samples;
  out->aerr_eta = d.aerr_eta;
  out->aerr_gamma = d.aerr_gamma;
  out->arls_iters = d.arls_iters;
  out->arls_tol = d.arls_tol;
  out->yw_incremental = d.yw_incremental ? 1 : 0;
}

const char* arb_method_name(arb_method method) {
  if (!valid_method(method)) return "?";
  return arbench::method_name(to_method(method)).data();
}

arb_status arb_method_from_name(const char* name, arb_method* out) {
  if (!name) return null_argument("name");
  if (!out) return null_argument("out");
  const auto m = arbench::parse_method(name);
  if (!m) return fail(ARB_ERR_INVALID_ARGUMENT, std::string("unknown method '") + name + "'");
  *out = static_cast<arb_method>(*m);
  return ARB_OK;
}

uint64_t arb_derive_seed(uint64_t base, uint64_t stream) { return arbench::derive_seed(base, stream); }

// ---- series ---------------------------------------------------------------

arb_status arb_series_create(const double* values, const unsigned char* present, size_t length,
                             arb_series** out) {
  if (!out) return null_argument("out");
  if (length > 0 && !values) return null_argument("values");
  return guarded([&] {
    std::vector<arbench::Slot> slots(length);
    for (size_t i = 0; i < length; ++i) {
      if (!present || present[i]) slots[i] = values[i];
    }
    *out = new arb_series{arbench::ObservedSeries(std::move(slots))};
    return ARB_OK;
  });
}

arb_status arb_series_parse(const char* text, size_t text_length, arb_series** out) {
  if (!out) return null_argument("out");
  if (text_length > 0 && !text) return null_argument("text");
  return guarded([&] {
    *out = new arb_series{arbench::parse_series(std::string_view(text ? text : "", text_length))};
    return ARB_OK;
  });
}

arb_status arb_series_load(const char* path, arb_series** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new arb_series{arbench::read_series_file(path)};
    return ARB_OK;
  });
}

arb_status arb_series_save(const arb_series* series, const char* path) {
  if (!series) return null_argument("series");
  if (!path) return null_argument("path");
  return guarded([&] {
    arbench::write_series_file(series->value, path);
    return ARB_OK;
  });
}

arb_status arb_series_render(const arb_series* series, char** text_out) {
  if (!series) return null_argument("series");
  if (!text_out) return null_argument("text_out");
  return guarded([&] {
    *text_out = dup_string(arbench::render_series(series->value));
    return ARB_OK;
  });
}

size_t arb_series_length(const arb_series* series) { return series ? series->value.size() : 0; }

size_t arb_series_missing_count(const arb_series* series) {
  return series ? series->value.missing_count() : 0;
}

arb_status arb_series_get(const arb_series* series, size_t index, double* value, int* present) {
  if (!series) return null_argument("series");
  if (index >= series->value.size()) return fail(ARB_ERR_INVALID_ARGUMENT, "index out of range");
  const auto& slot = series->value[index];
  if (present) *present = slot ? 1 : 0;
  if (value) *value = slot.value_or(0.0);
  return ARB_OK;
}

void arb_series_free(arb_series* series) { delete series; }

arb_status arb_generate_ar(const double* coeffs, size_t order, double noise_std, size_t length,
                           uint64_t seed, arb_series** out) {
  if (!out) return null_argument("out");
  if (order > 0 && !coeffs) return null_argument("coeffs");
  return guarded([&] {
    arbench::ArProcessParams params{std::vector<double>(coeffs, coeffs + order), noise_std};
    *out = new arb_series{arbench::generate_ar(params, length, seed)};
    return ARB_OK;
  });
}

arb_status arb_apply_missing_mask(const arb_series* series, double miss_rate, size_t protected_prefix,
                                  uint64_t seed, arb_series** out) {
  if (!series) return null_argument("series");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new arb_series{arbench::apply_missing_mask(series->value, miss_rate, protected_prefix, seed)};
    return ARB_OK;
  });
}

arb_status arb_zscore_normalize(const arb_series* series, arb_series** out) {
  if (!series) return null_argument("series");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new arb_series{arbench::zscore_normalize(series->value)};
    return ARB_OK;
  });
}

arb_status arb_spectral_radius(const double* coeffs, size_t order, double* out) {
  if (!out) return null_argument("out");
  if (order > 0 && !coeffs) return null_argument("coeffs");
  return guarded([&] {
    *out = arbench::linalg::companion_spectral_radius(std::span<const double>(coeffs, order));
    return ARB_OK;
  });
}

// ---- predictors -----------------------------------------------------------

arb_status arb_predictor_create(arb_method method, size_t order, const arb_hyperparams* hyper,
                                const arb_series* warmup, uint64_t seed, arb_predictor** out) {
  if (!warmup) return null_argument("warmup");
  if (!out) return null_argument("out");
  if (!valid_method(method)) return fail(ARB_ERR_INVALID_ARGUMENT, "unknown method");
  return guarded([&] {
    const auto slots = warmup->value.slots();
    if (slots.size() < order) {
      throw arbench::Error(arbench::Errc::MissingWarmup, "warm-up series shorter than the order");
    }
    *out = new arb_predictor{
        arbench::predictor_init(to_method(method), order, from_c(hyper), slots.first(order), seed)};
    return ARB_OK;
  });
}

arb_status arb_predictor_predict(const arb_predictor* predictor, double* out) {
  if (!predictor) return null_argument("predictor");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = arbench::predict(predictor->value);
    return ARB_OK;
  });
}

arb_status arb_predictor_advance(arb_predictor* predictor, double observation, int present,
                                 double* prediction_out) {
  if (!predictor) return null_argument("predictor");
  return guarded([&] {
    arbench::Slot slot;
    if (present) {
      if (!std::isfinite(observation)) {
        throw arbench::Error(arbench::Errc::InvalidArgument, "observation must be finite");
      }
      slot = observation;
    }
    const double prediction = arbench::advance(predictor->value, slot);
    if (prediction_out) *prediction_out = prediction;
    return ARB_OK;
  });
}

size_t arb_predictor_order(const arb_predictor* predictor) {
  if (!predictor) return 0;
  return std::visit([](const auto& p) { return p.order(); }, predictor->value);
}

arb_status arb_predictor_coefficients(const arb_predictor* predictor, double* out, size_t capacity) {
  if (!predictor) return null_argument("predictor");
  if (capacity > 0 && !out) return null_argument("out");
  return guarded([&] {
    const auto c = arbench::coefficients(predictor->value);
    for (size_t i = 0; i < c.size() && i < capacity; ++i) out[i] = c[i];
    return ARB_OK;
  });
}

void arb_predictor_free(arb_predictor* predictor) { delete predictor; }

// ---- runs -----------------------------------------------------------------

arb_status arb_run(arb_method method, size_t order, const arb_hyperparams* hyper,
                   const arb_series* series, uint64_t seed, double* predictions_out, size_t capacity,
                   size_t* written) {
  if (!series) return null_argument("series");
  if (!valid_method(method)) return fail(ARB_ERR_INVALID_ARGUMENT, "unknown method");
  if (written) *written = 0;
  return guarded([&] {
    const auto run = arbench::run_method(to_method(method), from_c(hyper), series->value, order, seed);
    if (run.predictions.size() > capacity) {
      throw arbench::Error(arbench::Errc::InvalidArgument,
                           "prediction buffer too small: need " + std::to_string(run.predictions.size()));
    }
    if (!run.predictions.empty() && !predictions_out) {
      throw arbench::Error(arbench::Errc::InvalidArgument, "null argument: predictions_out");
    }
    std::copy(run.predictions.begin(), run.predictions.end(), predictions_out);
    if (written) *written = run.predictions.size();
    if (run.diverged) return fail(ARB_ERR_DIVERGED, run.failure);
    return ARB_OK;
  });
}

arb_status arb_arls_impute(const arb_series* series, size_t order, size_t max_iters, double tol,
                           double* coeffs_out, arb_series** imputed_out, size_t* iterations_out) {
  if (!series) return null_argument("series");
  return guarded([&] {
    auto result = arbench::arls_impute(series->value, order, max_iters, tol);
    if (coeffs_out) std::copy(result.coeffs.begin(), result.coeffs.end(), coeffs_out);
    if (iterations_out) *iterations_out = result.iterations_run;
    if (imputed_out) *imputed_out = new arb_series{std::move(result.imputed)};
    return ARB_OK;
  });
}

arb_status arb_mse(const double* actual, const double* predicted, size_t length, double* out) {
  if (!out) return null_argument("out");
  if (length > 0 && (!actual || !predicted)) return null_argument("actual/predicted");
  return guarded([&] {
    *out = arbench::mse(std::span<const double>(actual, length), std::span<const double>(predicted, length));
    return ARB_OK;
  });
}

arb_status arb_score_trace(const arb_series* truth, const double* predictions, size_t count,
                           size_t order, double* out) {
  if (!truth) return null_argument("truth");
  if (!out) return null_argument("out");
  if (count > 0 && !predictions) return null_argument("predictions");
  return guarded([&] {
    *out = arbench::score_trace(truth->value, std::span<const double>(predictions, count), order);
    return ARB_OK;
  });
}

// ---- config and sweeps ----------------------------------------------------

arb_status arb_config_create(arb_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new arb_config{};
    return ARB_OK;
  });
}

arb_status arb_config_parse(const char* text, arb_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new arb_config{arbench::parse_config(text)};
    return ARB_OK;
  });
}

arb_status arb_config_load(const char* path, arb_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw arbench::Error(arbench::Errc::Io, std::string("cannot open ") + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
      *out = new arb_config{arbench::parse_config(buffer.str())};
    } catch (const arbench::Error& e) {
      throw arbench::Error(e.code(), std::string(path) + ": " + e.what());
    }
    return ARB_OK;
  });
}

arb_status arb_config_set(arb_config* config, const char* key, const char* value) {
  if (!config) return null_argument("config");
  if (!key || !value) return null_argument("key/value");
  return guarded([&] {
    arbench::set_config_value(config->value, key, value);
    return ARB_OK;
  });
}

arb_status arb_config_render(const arb_config* config, char** text_out) {
  if (!config) return null_argument("config");
  if (!text_out) return null_argument("text_out");
  return guarded([&] {
    *text_out = dup_string(arbench::render_config(config->value));
    return ARB_OK;
  });
}

void arb_config_free(arb_config* config) { delete config; }

arb_status arb_sweep_run(const arb_config* config, const char* axis, const char* const* values,
                         size_t n_values, unsigned jobs, arb_sweep** out) {
  if (!config) return null_argument("config");
  if (!axis) return null_argument("axis");
  if (!out) return null_argument("out");
  if (n_values > 0 && !values) return null_argument("values");
  return guarded([&] {
    const auto parsed = arbench::parse_axis(axis);
    if (!parsed) {
      throw arbench::Error(arbench::Errc::Config, std::string("unknown axis '") + axis + "'");
    }
    std::vector<std::string> list;
    if (n_values == 0) {
      list = arbench::default_axis_values(*parsed, config->value);
    } else {
      list.assign(values, values + n_values);
    }
    *out = new arb_sweep{arbench::run_sweep(config->value, *parsed, std::move(list), jobs)};
    return ARB_OK;
  });
}

arb_status arb_sweep_write(const arb_sweep* sweep, const char* dir, const char* const* extra_meta,
                           size_t n_extra) {
  if (!sweep) return null_argument("sweep");
  if (!dir) return null_argument("dir");
  if (n_extra > 0 && !extra_meta) return null_argument("extra_meta");
  return guarded([&] {
    std::vector<std::string> extra(extra_meta, extra_meta + n_extra);
    arbench::write_results(sweep->value, dir, extra);
    return ARB_OK;
  });
}

arb_status arb_sweep_records_csv(const arb_sweep* sweep, char** text_out) {
  if (!sweep) return null_argument("sweep");
  if (!text_out) return null_argument("text_out");
  return guarded([&] {
    *text_out = dup_string(arbench::render_records_csv(sweep->value.records));
    return ARB_OK;
  });
}

arb_status arb_sweep_aggregates_csv(const arb_sweep* sweep, char** text_out) {
  if (!sweep) return null_argument("sweep");
  if (!text_out) return null_argument("text_out");
  return guarded([&] {
    *text_out = dup_string(arbench::render_aggregates_csv(sweep->value.aggregates));
    return ARB_OK;
  });
}

size_t arb_sweep_rejected_count(const arb_sweep* sweep) {
  return sweep ? sweep->value.rejected.size() : 0;
}

const char* arb_sweep_rejected(const arb_sweep* sweep, size_t index) {
  if (!sweep || index >= sweep->value.rejected.size()) return nullptr;
  return sweep->value.rejected[index].c_str();
}

void arb_sweep_free(arb_sweep* sweep) { delete sweep; }

arb_status arb_report(const char* records_path, const char* by, char** text_out) {
  if (!records_path) return null_argument("records_path");
  if (!by) return null_argument("by");
  if (!text_out) return null_argument("text_out");
  return guarded([&] {
    const auto mode = arbench::parse_report_by(by);
    if (!mode) throw arbench::Error(arbench::Errc::Config, std::string("unknown report grouping '") + by + "'");
    std::ifstream in(records_path, std::ios::binary);
    if (!in) throw arbench::Error(arbench::Errc::Io, std::string("cannot open ") + records_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const auto records = arbench::parse_records_csv(buffer.str());
    *text_out = dup_string(arbench::report(records, *mode));
    return ARB_OK;
  });
}

}  // extern "C"
