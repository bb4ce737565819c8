#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "arbench/bench.hpp"
#include "arbench/config.hpp"
#include "arbench/error.hpp"

using namespace arbench;
namespace fs = std::filesystem;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an arbench::Error");
  return Errc::InvalidArgument;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.length = 300;
  c.replications = 3;
  c.seed = 17;
  return c;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("arbench_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("mse examples") {
  const std::vector<double> a = {1, 2, 3};
  CHECK(mse(a, a) == 0.0);
  const std::vector<double> x = {1, 2}, y = {0, 0};
  CHECK(mse(x, y) == 2.5);
  CHECK(code_of([&] { mse(a, y); }) == Errc::LengthMismatch);
  CHECK(code_of([] { mse(std::vector<double>{}, std::vector<double>{}); }) == Errc::EmptyInput);
}

TEST_CASE("score_trace aligns index 0 with slot p and skips unknown truth") {
  const ObservedSeries truth({Slot{9.0}, Slot{9.0}, Slot{1.0}, std::nullopt, Slot{3.0}});
  const std::vector<double> pred = {0.0, 100.0, 1.0};
  CHECK(score_trace(truth, pred, 2) == doctest::Approx((1.0 + 4.0) / 2));
  CHECK(code_of([&] { score_trace(truth, std::vector<double>{0.0}, 2); }) == Errc::LengthMismatch);
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  CHECK(derive_seed(5, 7) == derive_seed(5, 7));
}

TEST_CASE("run_cell cardinality and determinism") {
  auto c = small_config();
  c.replications = 1;
  c.methods = {Method::KF};
  const auto one = run_cell(c, 0.0);
  REQUIRE(one.size() == 1);
  CHECK(one[0].series_index == 1);
  CHECK(one[0].status == RecordStatus::Ok);

  const auto full = small_config();
  const auto a = run_cell(full, 0.1);
  const auto b = run_cell(full, 0.1);
  REQUIRE(a.size() == 15);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].method == b[i].method);
    CHECK(a[i].series_index == b[i].series_index);
    REQUIRE(a[i].mse.has_value());
    CHECK(std::memcmp(&*a[i].mse, &*b[i].mse, sizeof(double)) == 0);
  }
}

TEST_CASE("run_cell marks divergence per record without aborting") {
  auto c = small_config();
  c.hyper.ogd_eta = 1e9;
  const auto recs = run_cell(c, 0.0);
  bool saw_diverged = false, saw_ok = false;
  for (const auto& r : recs) {
    if (r.method == Method::OGD) {
      CHECK(r.status == RecordStatus::Diverged);
      CHECK_FALSE(r.mse.has_value());
      saw_diverged = true;
    } else {
      saw_ok = saw_ok || r.status == RecordStatus::Ok;
    }
  }
  CHECK(saw_diverged);
  CHECK(saw_ok);
}

TEST_CASE("missing-rate sweep record count") {
  const auto c = small_config();
  const auto values = default_axis_values(Axis::MissingRate, c);
  CHECK(values.size() == 7);
  const auto r = run_sweep(c, Axis::MissingRate, values);
  CHECK(r.records.size() == 7 * 3 * 5);
  CHECK(r.aggregates.size() == 7 * 5);
  CHECK(r.rejected.empty());
}

TEST_CASE("coefficients axis carries the five standard rows") {
  auto c = small_config();
  c.replications = 1;
  c.miss_grid = {0.0};
  const auto values = default_axis_values(Axis::Coefficients, c);
  CHECK(values.size() == 5);
  const auto r = run_sweep(c, Axis::Coefficients, values);
  CHECK(r.rejected.size() + r.records.size() / 5 == 5);
  for (const auto& why : r.rejected) CHECK(why.find("NonStationary") != std::string::npos);
}

TEST_CASE("p_fit and length axis defaults") {
  const ExperimentConfig c;
  CHECK(default_axis_values(Axis::PFit, c) == std::vector<std::string>{"1", "2", "3", "4", "5", "10", "20"});
  CHECK(default_axis_values(Axis::Length, c).front() == "1000");
  CHECK(default_axis_values(Axis::Length, c).back() == "5000");
  CHECK(default_axis_values(Axis::NoiseStd, c).front() == "0.3");
  CHECK(default_axis_values(Axis::NoiseStd, c).back() == "1.5");
}

TEST_CASE("empty axis value list gives an empty result") {
  const auto r = run_sweep(small_config(), Axis::Length, {});
  CHECK(r.records.empty());
  CHECK(r.aggregates.empty());
}

TEST_CASE("sweep output is independent of the worker count") {
  auto c = small_config();
  c.replications = 4;
  const auto values = default_axis_values(Axis::MissingRate, c);
  const auto one = run_sweep(c, Axis::MissingRate, values, 1);
  const auto many = run_sweep(c, Axis::MissingRate, values, 4);
  CHECK(render_records_csv(one.records) == render_records_csv(many.records));
  CHECK(render_aggregates_csv(one.aggregates) == render_aggregates_csv(many.aggregates));
}

TEST_CASE("aggregate mean equals the arithmetic mean of the records") {
  auto c = small_config();
  c.replications = 20;
  c.length = 200;
  const auto r = run_sweep(c, Axis::MissingRate, {"0.2"});
  for (const auto& a : r.aggregates) {
    CHECK(a.n == 20);
    double sum = 0.0, n = 0.0;
    for (const auto& rec : r.records)
      if (rec.method == a.method && rec.mse) {
        sum += *rec.mse;
        ++n;
      }
    CHECK(std::abs(*a.mean_mse - sum / n) <= 1e-12);
    double ss = 0.0;
    for (const auto& rec : r.records)
      if (rec.method == a.method && rec.mse) ss += (*rec.mse - sum / n) * (*rec.mse - sum / n);
    CHECK(*a.std_mse == doctest::Approx(std::sqrt(ss / (n - 1))));
  }
}

TEST_CASE("write_results: headers-only files for zero records") {
  SweepResult empty;
  const auto dir = scratch("empty");
  write_results(empty, dir);
  CHECK(slurp(dir / "records.csv") == std::string(kRecordsHeader) + "\n");
  CHECK(slurp(dir / "aggregates.csv") == std::string(kAggregatesHeader) + "\n");
  CHECK(fs::exists(dir / "meta.txt"));
  fs::remove_all(dir);
}

TEST_CASE("write_results: one record round-trips through the CSV") {
  ResultRecord rec;
  rec.method = Method::AERR;
  rec.config_hash = 0xfeedbeef12345678ULL;
  rec.axis = "missing_rate";
  rec.axis_value = "0.1";
  rec.missing_rate = 0.1;
  rec.series_index = 3;
  rec.mse = 0.123456789012345678;
  const std::vector<ResultRecord> recs = {rec};
  const auto text = render_records_csv(recs);
  CHECK(count_lines(text) == 2);
  const auto back = parse_records_csv(text);
  REQUIRE(back.size() == 1);
  CHECK(back[0].method == rec.method);
  CHECK(back[0].config_hash == rec.config_hash);
  CHECK(back[0].axis == rec.axis);
  CHECK(back[0].axis_value == rec.axis_value);
  CHECK(back[0].missing_rate == rec.missing_rate);
  CHECK(back[0].series_index == 3);
  CHECK(*back[0].mse == *rec.mse);
  CHECK(back[0].status == RecordStatus::Ok);
}

TEST_CASE("write_results: files and meta contents") {
  auto c = small_config();
  const auto r = run_sweep(c, Axis::MissingRate, {"0", "0.3"});
  const auto dir = scratch("write");
  const std::vector<std::string> extra = {"source.seed=flag"};
  write_results(r, dir, extra);
  CHECK(slurp(dir / "records.csv") == render_records_csv(r.records));
  CHECK(slurp(dir / "aggregates.csv") == render_aggregates_csv(r.aggregates));
  const auto meta = slurp(dir / "meta.txt");
  CHECK(meta.find("artifact_version=") != std::string::npos);
  CHECK(meta.find("base_seed=17") != std::string::npos);
  CHECK(meta.find("source.seed=flag") != std::string::npos);
  CHECK(meta.find("[config]") != std::string::npos);
  CHECK(meta.find("kf_pinit=1") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("parse_records_csv reports the bad row") {
  const std::string text = std::string(kRecordsHeader) + "\nKF,00,missing_rate,0,0,1,0.1,OK\nKF,zz\n";
  try {
    parse_records_csv(text);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("report: cell view equals aggregates, headers-only, single record") {
  const auto r = run_sweep(small_config(), Axis::MissingRate, {"0", "0.2"});
  const auto parsed = parse_records_csv(render_records_csv(r.records));
  CHECK(report(parsed, ReportBy::Cell) == render_aggregates_csv(r.aggregates));

  CHECK(count_lines(report({}, ReportBy::MissingRate)) == 1);

  const std::vector<ResultRecord> one(r.records.begin(), r.records.begin() + 1);
  const auto text = report(one, ReportBy::MissingRate);
  REQUIRE(count_lines(text) == 2);
  const auto row = text.substr(text.find('\n') + 1);
  CHECK(row.find(",,1\n") != std::string::npos);  // std blank, n = 1
}

TEST_CASE("report sorts by axis value then method") {
  const auto r = run_sweep(small_config(), Axis::MissingRate, {"0.3", "0"});
  const auto text = report(r.records, ReportBy::MissingRate);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0].rfind("AERR,0,", 0) == 0);
  CHECK(rows[4].rfind("YW,0,", 0) == 0);
  CHECK(rows[5].rfind("AERR,0.29999999999999999,", 0) == 0);
}

TEST_CASE("config parsing, errors and canonical rendering") {
  const auto c = parse_config("# comment\nlength = 500\nmethods = kf, arls\nkf_sigma2 = auto\nseed=9\n");
  CHECK(c.length == 500);
  CHECK(c.methods == std::vector<Method>{Method::KF, Method::ARLS});
  CHECK_FALSE(c.kf_sigma2.has_value());
  CHECK(c.seed == 9);
  CHECK(parse_config(render_config(c)).length == 500);
  CHECK(config_hash(parse_config(render_config(c))) == config_hash(c));

  try {
    parse_config("length = 10\nbogus_key = 3\n");
    FAIL("expected Config");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Config);
    const std::string what = e.what();
    CHECK(what.find("line 2") != std::string::npos);
    CHECK(what.find("bogus_key") != std::string::npos);
  }
  CHECK(code_of([] { parse_config("length = ten\n"); }) == Errc::Config);
  CHECK(code_of([] { parse_config("no equals sign\n"); }) == Errc::Config);
  CHECK(code_of([] { validate_config(parse_config("replications = 0\n")); }) == Errc::Config);
  CHECK(code_of([] { validate_config(parse_config("miss_grid = 0, 1.0\n")); }) == Errc::Config);
}

TEST_CASE("config hash changes with the config") {
  ExperimentConfig a, b;
  b.seed = 1;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a) == config_hash(ExperimentConfig{}));
}

TEST_CASE("real-data sweep loads, normalizes and scores") {
  const auto dir = scratch("real");
  fs::create_directories(dir);
  const auto s = generate_ar({{0.6, -0.2}, 2.0}, 400, 3);
  write_series_file(s, dir / "series.txt");
  ExperimentConfig c;
  c.input = (dir / "series.txt").string();
  c.replications = 2;
  c.p_fit = 2;
  const auto r = run_sweep(c, Axis::MissingRate, {"0", "0.2"});
  CHECK(r.records.size() == 2 * 2 * 5);
  for (const auto& rec : r.records) CHECK(rec.status == RecordStatus::Ok);
  CHECK(code_of([&] { run_sweep(c, Axis::Length, {"1000"}); }) == Errc::Config);
  fs::remove_all(dir);
}

}
