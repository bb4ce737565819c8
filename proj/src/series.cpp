#include "arbench/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "arbench/error.hpp"
#include "arbench/linalg.hpp"

namespace arbench {

ObservedSeries::ObservedSeries(std::vector<Slot> slots) : slots_(std::move(slots)) {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i] && !std::isfinite(*slots_[i])) {
      throw Error(Errc::InvalidArgument, "non-finite value at slot " + std::to_string(i));
    }
  }
}

ObservedSeries ObservedSeries::complete(std::span<const double> values) {
  return ObservedSeries(std::vector<Slot>(values.begin(), values.end()));
}

std::size_t ObservedSeries::missing_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(slots_.begin(), slots_.end(), [](const Slot& s) { return !s; }));
}

std::vector<double> ObservedSeries::values() const {
  std::vector<double> out;
  out.reserve(slots_.size());
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (!slots_[i]) {
      throw Error(Errc::InvalidArgument, "slot " + std::to_string(i) + " is missing");
    }
    out.push_back(*slots_[i]);
  }
  return out;
}

ObservedSeries generate_ar(const ArProcessParams& params, std::size_t length, std::uint64_t seed,
                           const GenerateOptions& options) {
  const std::size_t p = params.order();
  if (p == 0) throw Error(Errc::InvalidArgument, "AR order must be positive");
  if (!(params.noise_std >= 0.0) || !std::isfinite(params.noise_std)) {
    throw Error(Errc::InvalidArgument, "noise std must be finite and nonnegative");
  }
  if (length < p) {
    throw Error(Errc::InvalidArgument, "length shorter than AR order");
  }
  if (!linalg::is_stationary(params.coefficients)) {
    throw Error(Errc::NonStationary,
                "coefficients are not stationary (companion spectral radius " +
                    std::to_string(linalg::companion_spectral_radius(params.coefficients)) + ")");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> standard_normal(0.0, 1.0);

  std::vector<double> full;
  full.reserve(p + options.burn_in + length);
  if (options.initial_values) {
    if (options.initial_values->size() != p) {
      throw Error(Errc::InvalidArgument, "initial values must have length p");
    }
    full = *options.initial_values;
  } else {
    for (std::size_t i = 0; i < p; ++i) full.push_back(params.noise_std * standard_normal(rng));
  }

  const std::size_t to_generate = options.burn_in + length - p;
  for (std::size_t n = 0; n < to_generate; ++n) {
    const std::size_t t = full.size();
    double x = 0.0;
    for (std::size_t i = 0; i < p; ++i) x += params.coefficients[i] * full[t - 1 - i];
    x += params.noise_std * standard_normal(rng);
    full.push_back(x);
  }

  return ObservedSeries::complete(std::span<const double>(full).last(length));
}

ObservedSeries apply_missing_mask(const ObservedSeries& series, double miss_rate,
                                  std::size_t protected_prefix, std::uint64_t seed) {
  if (!(miss_rate >= 0.0 && miss_rate <= 1.0)) {
    throw Error(Errc::InvalidArgument, "miss rate must lie in [0, 1]");
  }
  if (protected_prefix > series.size()) {
    throw Error(Errc::InvalidArgument, "protected prefix longer than series");
  }
  if (series.has_missing()) throw Error(Errc::InvalidArgument, "series is already masked");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Slot> slots(series.slots().begin(), series.slots().end());
  for (std::size_t i = protected_prefix; i < slots.size(); ++i) {
    // Draw unconditionally so every rate consumes the same stream.
    const double u = unit(rng);
    if (u < miss_rate || miss_rate == 1.0) slots[i].reset();
  }
  return ObservedSeries(std::move(slots));
}

ObservedSeries zscore_normalize(const ObservedSeries& series) {
  std::size_t n = 0;
  double sum = 0.0;
  for (const Slot& s : series.slots()) {
    if (s) {
      sum += *s;
      ++n;
    }
  }
  if (n < 2) throw Error(Errc::DegenerateSeries, "fewer than 2 present values");
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const Slot& s : series.slots()) {
    if (s) ss += (*s - mean) * (*s - mean);
  }
  const double sd = std::sqrt(ss / static_cast<double>(n));
  if (!(sd > 0.0)) throw Error(Errc::DegenerateSeries, "series has zero spread");

  std::vector<Slot> out;
  out.reserve(series.size());
  for (const Slot& s : series.slots()) {
    out.push_back(s ? Slot((*s - mean) / sd) : std::nullopt);
  }
  return ObservedSeries(std::move(out));
}

AutocorrEstimate estimate_autocorr(std::span<const double> prefix, std::size_t t, std::size_t p) {
  if (t <= p) throw Error(Errc::InvalidArgument, "autocorrelation needs t > p");
  if (prefix.size() < t) throw Error(Errc::InvalidArgument, "prefix shorter than t");
  const auto y = prefix.first(t);

  double sum = 0.0;
  for (double v : y) sum += v;
  const double mean = sum / static_cast<double>(t);
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double variance = ss / static_cast<double>(t - 1);
  if (variance < kMinAutocorrVariance) {
    throw Error(Errc::ZeroVariance, "prefix has (near) zero variance");
  }

  AutocorrEstimate est{mean, variance, std::vector<double>(p + 1, 0.0)};
  est.gamma[0] = 1.0;
  for (std::size_t k = 1; k <= p; ++k) {
    double acc = 0.0;
    for (std::size_t q = 0; q + k < t; ++q) acc += (y[q] - mean) * (y[q + k] - mean);
    est.gamma[k] = acc / (variance * static_cast<double>(t - k));
  }
  return est;
}

IncrementalAutocorr::IncrementalAutocorr(std::size_t max_lag)
    : max_lag_(max_lag), lag_products_(max_lag, 0.0) {}

void IncrementalAutocorr::push(double y) {
  const std::size_t t = values_.size();
  for (std::size_t k = 1; k <= max_lag_ && k <= t; ++k) lag_products_[k - 1] += values_[t - k] * y;
  values_.push_back(y);
  sum_ += y;
  sum_sq_ += y * y;
}

AutocorrEstimate IncrementalAutocorr::estimate(std::size_t p) const {
  const std::size_t t = values_.size();
  if (p > max_lag_) throw Error(Errc::InvalidArgument, "order exceeds tracked lags");
  if (t <= p) throw Error(Errc::InvalidArgument, "autocorrelation needs t > p");

  const double tn = static_cast<double>(t);
  const double mean = sum_ / tn;
  const double variance = std::max(0.0, sum_sq_ - tn * mean * mean) / (tn - 1.0);
  if (variance < kMinAutocorrVariance) {
    throw Error(Errc::ZeroVariance, "prefix has (near) zero variance");
  }

  AutocorrEstimate est{mean, variance, std::vector<double>(p + 1, 0.0)};
  est.gamma[0] = 1.0;
  double head_drop = 0.0;  // sum of the last k values
  double tail_drop = 0.0;  // sum of the first k values
  for (std::size_t k = 1; k <= p; ++k) {
    head_drop += values_[t - k];
    tail_drop += values_[k - 1];
    const double n_pairs = static_cast<double>(t - k);
    // sum (y_q - m)(y_{q+k} - m) = S_k - m (head + tail) + (t-k) m^2
    const double head = sum_ - head_drop;
    const double tail = sum_ - tail_drop;
    const double cross = lag_products_[k - 1] - mean * (head + tail) + n_pairs * mean * mean;
    est.gamma[k] = cross / (variance * n_pairs);
  }
  return est;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool is_nan_token(std::string_view s) {
  if (s.size() != 3) return false;
  auto lower = [](char c) { return static_cast<char>(c | 0x20); };
  return lower(s[0]) == 'n' && lower(s[1]) == 'a' && lower(s[2]) == 'n';
}

}  // namespace

ObservedSeries parse_series(std::string_view text) {
  std::vector<Slot> slots;
  std::size_t pending_blank = 0;  // blank lines are MISSING unless trailing
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;

    if (!line.empty() && line.front() == '#') continue;
    if (line.empty()) {
      ++pending_blank;
      continue;
    }
    slots.insert(slots.end(), pending_blank, std::nullopt);
    pending_blank = 0;

    if (is_nan_token(line)) {
      slots.emplace_back(std::nullopt);
      continue;
    }
    std::string normalized;
    if (line.starts_with("\xE2\x88\x92")) {  // U+2212 minus sign
      normalized = "-" + std::string(line.substr(3));
      line = normalized;
    }
    double value = 0.0;
    const char* first = line.data();
    const char* last = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": cannot parse '" +
                                        std::string(line) + "'");
    }
    slots.emplace_back(value);
  }
  return ObservedSeries(std::move(slots));
}

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

std::string render_series(const ObservedSeries& series) {
  std::string out;
  for (const Slot& s : series.slots()) {
    out += s ? format_real(*s) : std::string("NaN");
    out += '\n';
  }
  return out;
}

ObservedSeries read_series_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_series(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_series_file(const ObservedSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  out << render_series(series);
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

}  // namespace arbench
