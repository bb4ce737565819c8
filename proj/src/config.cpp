#include "arbench/config.hpp"

#include <charconv>
#include <cmath>

#include "arbench/error.hpp"
#include "arbench/series.hpp"

namespace arbench {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view text, std::string_view separators) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto end = text.find_first_of(separators, pos);
    out.push_back(trim(text.substr(pos, end == std::string_view::npos ? end : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(Errc::Config, "invalid value '" + std::string(value) + "' for key '" +
                                std::string(key) + "': " + std::string(why));
}

double to_real(std::string_view key, std::string_view value) {
  value = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    bad_value(key, value, "expected a finite real");
  }
  return out;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view value) {
  value = trim(value);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "expected a nonnegative integer");
  }
  return out;
}

std::vector<double> to_real_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  if (trim(value).empty()) return out;
  for (auto item : split(value, ",;")) out.push_back(to_real(key, item));
  return out;
}

std::string join_reals(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_real(xs[i]);
  }
  return out;
}

}  // namespace

std::vector<double> parse_real_list(std::string_view text) { return to_real_list("list", text); }

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = {
      "length",    "sigma",   "coeffs",   "miss_grid", "p_fit",      "methods",
      "replications", "seed", "eta",      "kf_sigma2", "kf_pinit",   "aerr_b",
      "aerr_k",    "aerr_eta", "aerr_gamma", "arls_iters", "arls_tol", "yw_mode",
      "input"};
  return keys;
}

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "length") {
    c.length = to_unsigned(key, value);
  } else if (key == "sigma") {
    c.sigma = to_real(key, value);
  } else if (key == "coeffs") {
    c.coeffs = to_real_list(key, value);
  } else if (key == "miss_grid") {
    c.miss_grid = to_real_list(key, value);
  } else if (key == "p_fit") {
    c.p_fit = to_unsigned(key, value);
  } else if (key == "methods") {
    std::vector<Method> methods;
    for (auto name : split(value, ",;")) {
      const auto m = parse_method(name);
      if (!m) bad_value(key, name, "unknown method (YW, KF, OGD, AERR, ARLS)");
      methods.push_back(*m);
    }
    c.methods = std::move(methods);
  } else if (key == "replications") {
    c.replications = to_unsigned(key, value);
  } else if (key == "seed") {
    c.seed = to_unsigned(key, value);
  } else if (key == "eta") {
    c.hyper.ogd_eta = to_real(key, value);
  } else if (key == "kf_sigma2") {
    if (value == "auto") {
      c.kf_sigma2.reset();
    } else {
      c.kf_sigma2 = to_real(key, value);
    }
  } else if (key == "kf_pinit") {
    c.hyper.kf_pinit = to_real(key, value);
  } else if (key == "aerr_b") {
    c.hyper.aerr_radius = to_real(key, value);
  } else if (key == "aerr_k") {
    c.hyper.aerr_samples = to_unsigned(key, value);
  } else if (key == "aerr_eta") {
    c.hyper.aerr_eta = to_real(key, value);
  } else if (key == "aerr_gamma") {
    if (value == "known") {
      c.aerr_estimate_gamma = false;
    } else if (value == "estimate") {
      c.aerr_estimate_gamma = true;
    } else {
      bad_value(key, value, "expected 'known' or 'estimate'");
    }
  } else if (key == "arls_iters") {
    c.hyper.arls_iters = to_unsigned(key, value);
  } else if (key == "arls_tol") {
    c.hyper.arls_tol = to_real(key, value);
  } else if (key == "yw_mode") {
    if (value == "scratch") {
      c.hyper.yw_incremental = false;
    } else if (value == "incremental") {
      c.hyper.yw_incremental = true;
    } else {
      bad_value(key, value, "expected 'scratch' or 'incremental'");
    }
  } else if (key == "input") {
    if (value.empty()) {
      c.input.reset();
    } else {
      c.input = std::string(value);
    }
  } else {
    throw Error(Errc::Config, "unknown key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text) { return parse_config(text, ExperimentConfig{}); }

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::Config, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      set_config_value(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(Errc::Config, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) { throw Error(Errc::Config, what); };
  if (c.p_fit < 1) fail("p_fit must be >= 1");
  if (c.replications < 1) fail("replications must be >= 1");
  if (c.methods.empty()) fail("methods must not be empty");
  for (double m : c.miss_grid) {
    if (!(m >= 0.0 && m < 1.0)) fail("miss_grid values must lie in [0, 1)");
  }
  if (!c.input) {
    if (c.coeffs.empty()) fail("coeffs must not be empty");
    if (!(c.sigma >= 0.0)) fail("sigma must be >= 0");
    if (c.length < c.p_fit) fail("length must be >= p_fit");
  }
  if (!(c.hyper.ogd_eta >= 0.0)) fail("eta must be >= 0");
  if (c.kf_sigma2 && !(*c.kf_sigma2 > 0.0)) fail("kf_sigma2 must be > 0");
  if (!(c.hyper.kf_pinit > 0.0)) fail("kf_pinit must be > 0");
  if (!(c.hyper.aerr_radius > 0.0)) fail("aerr_b must be > 0");
  if (c.hyper.aerr_samples < 1) fail("aerr_k must be >= 1");
  if (!(c.hyper.aerr_eta > 0.0)) fail("aerr_eta must be > 0");
  if (c.hyper.arls_iters < 1) fail("arls_iters must be >= 1");
  if (!(c.hyper.arls_tol >= 0.0)) fail("arls_tol must be >= 0");
}

std::string render_config(const ExperimentConfig& c) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  std::string methods;
  for (std::size_t i = 0; i < c.methods.size(); ++i) {
    if (i) methods += ',';
    methods += method_name(c.methods[i]);
  }
  line("length", std::to_string(c.length));
  line("sigma", format_real(c.sigma));
  line("coeffs", join_reals(c.coeffs));
  line("miss_grid", join_reals(c.miss_grid));
  line("p_fit", std::to_string(c.p_fit));
  line("methods", methods);
  line("replications", std::to_string(c.replications));
  line("seed", std::to_string(c.seed));
  line("eta", format_real(c.hyper.ogd_eta));
  line("kf_sigma2", c.kf_sigma2 ? format_real(*c.kf_sigma2) : std::string("auto"));
  line("kf_pinit", format_real(c.hyper.kf_pinit));
  line("aerr_b", format_real(c.hyper.aerr_radius));
  line("aerr_k", std::to_string(c.hyper.aerr_samples));
  line("aerr_eta", format_real(c.hyper.aerr_eta));
  line("aerr_gamma", c.aerr_estimate_gamma ? "estimate" : "known");
  line("arls_iters", std::to_string(c.hyper.arls_iters));
  line("arls_tol", format_real(c.hyper.arls_tol));
  line("yw_mode", c.hyper.yw_incremental ? "incremental" : "scratch");
  line("input", c.input.value_or(""));
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : render_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace arbench
