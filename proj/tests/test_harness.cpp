#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "toalab/checkpoint.hpp"
#include "toalab/cli.hpp"
#include "toalab/errors.hpp"
#include "toalab/evaluate.hpp"
#include "toalab/report.hpp"

using namespace toalab;
namespace fs = std::filesystem;

namespace {

const double ts = build_config("nbiot-1.4MHz").sample_period;

struct temp_dir {
  fs::path path;
  temp_dir() {
    path = fs::temp_directory_path() / ("toa_lab_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~temp_dir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "toa_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

dataset random_dataset(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n01;
  dataset ds{8, 2, {}};
  for (std::size_t i = 0; i < n; ++i) {
    dataset_record r;
    r.planes.resize(8 * 3 * 2);
    for (auto& v : r.planes) {
      v = n01(rng);
    }
    r.toa_true_ns = 1000.0f * n01(rng);
    r.anchor = static_cast<std::int32_t>(rng() % 100);
    r.which = all_channel_cases[rng() % 3];
    r.snr_db = i % 5 == 0 ? std::numeric_limits<float>::infinity() : n01(rng);
    ds.records.push_back(std::move(r));
  }
  return ds;
}

std::string dataset_bytes(const dataset& ds) {
  std::ostringstream out;
  write_dataset(out, ds);
  return out.str();
}

} // namespace

TEST_CASE("dataset format round-trips bit-exactly") {
  const auto ds = random_dataset(1, 17);
  const auto a = dataset_bytes(ds);
  std::istringstream in(a);
  CHECK(dataset_bytes(read_dataset(in)) == a);
  CHECK(a.substr(0, 4) == "TOAD");
  CHECK(a.size() == 4 + 4 + 8 + 4 + 4 + 17 * (48 * 4 + 4 + 4 + 1 + 4));
}

TEST_CASE("dataset format errors") {
  const auto good = dataset_bytes(random_dataset(2, 3));
  auto bad_magic = good;
  bad_magic[1] = 'X';
  std::istringstream a(bad_magic);
  CHECK_THROWS_AS(read_dataset(a), format_error);

  auto future = good;
  future[4] = 9;
  std::istringstream b(future);
  try {
    read_dataset(b);
    FAIL("future version accepted");
  } catch (const format_error& e) {
    CHECK(std::string(e.what()).find("version 9") != std::string::npos);
    CHECK(e.offset() == 4);
  }

  std::istringstream c(good.substr(0, good.size() - 3));
  try {
    read_dataset(c);
    FAIL("truncated file accepted");
  } catch (const format_error& e) {
    CHECK(e.offset() == good.size() - 3);
  }

  auto bad_case = good;
  bad_case[24 + 48 * 4 + 8] = 7;
  std::istringstream d(bad_case);
  CHECK_THROWS_AS(read_dataset(d), format_error);
}

TEST_CASE("checkpoint format") {
  const auto net = nn::init_network<float>(32, 6, 3);
  std::ostringstream a;
  write_checkpoint(a, net);
  std::istringstream in(a.str());
  const auto back = read_checkpoint(in);
  std::ostringstream b;
  write_checkpoint(b, back);
  CHECK(a.str() == b.str());
  CHECK(a.str().substr(0, 4) == "TOAP");
  CHECK(nn::extractor_hash(back) == nn::extractor_hash(net));

  auto future = a.str();
  future[4] = 2;
  std::istringstream f(future);
  CHECK_THROWS_WITH_AS(read_checkpoint(f), doctest::Contains("version 2"), format_error);
  auto bad = a.str();
  bad[0] = 'X';
  std::istringstream g(bad);
  CHECK_THROWS_AS(read_checkpoint(g), format_error);
  std::istringstream h(a.str().substr(0, 100));
  CHECK_THROWS_AS(read_checkpoint(h), format_error);
}

TEST_CASE("metrics of oracle and constant-offset estimators") {
  std::vector<error_sample> exact;
  std::vector<error_sample> offset;
  for (int i = 0; i < 50; ++i) {
    exact.push_back({channel_case::epa5, 0.0, 0.0});
    offset.push_back({channel_case::epa5, 0.0, 100.0});
  }
  const auto e = compute_metrics("oracle", exact);
  REQUIRE(e.size() == 1);
  CHECK(e[0].rmse_ns == 0.0);
  CHECK(e[0].median_ns == 0.0);
  const auto o = compute_metrics("offset", offset);
  CHECK(o[0].rmse_ns == doctest::Approx(100.0));
  CHECK(o[0].median_ns == doctest::Approx(100.0));
  CHECK(o[0].bias_ns == doctest::Approx(100.0));
  CHECK(o[0].count == 50);
}

TEST_CASE("metrics grouping, CDF order and Jensen") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(30.0, 80.0);
  std::vector<error_sample> errs;
  std::vector<error_sample> fails = {{channel_case::eva5, 10.0, 0.0}};
  for (int i = 0; i < 300; ++i) {
    errs.push_back({all_channel_cases[i % 3], double(i % 2) * 10.0, n(rng)});
  }
  const auto m = compute_metrics("x", errs, fails);
  CHECK(m.size() == 6);
  for (const auto& e : m) {
    CHECK(std::is_sorted(e.cdf_ns.begin(), e.cdf_ns.end()));
    CHECK(e.rmse_ns >= 0.0);
    CHECK(e.rmse_ns * e.rmse_ns >= e.bias_ns * e.bias_ns * (1 - 1e-12));
    CHECK(e.cdf_ns.size() == e.count);
    CHECK(e.failures == (e.which == channel_case::eva5 && e.snr_db == 10.0 ? 1u : 0u));
  }
  CHECK(median_abs({-3.0, 1.0, 2.0, -10.0}) == 2.5);
  CHECK(rmse({3.0, -4.0}) == doctest::Approx(std::sqrt(12.5)));
}

TEST_CASE("report JSON and CSV round-trip bit-exactly") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1e3);
  std::vector<error_sample> errs;
  for (int i = 0; i < 40; ++i) {
    errs.push_back({all_channel_cases[i % 3], i % 4 == 0 ? std::numeric_limits<double>::infinity() : -5.0, n(rng)});
  }
  metrics_report rep;
  rep.entries = compute_metrics("music", errs);
  rep.seeds = {7, 18446744073709551615ULL};
  rep.config_hash = "0123456789abcdef";

  std::ostringstream j1;
  write_report_json(j1, rep);
  std::istringstream ji(j1.str());
  std::ostringstream j2;
  write_report_json(j2, read_report_json(ji));
  CHECK(j1.str() == j2.str());

  std::ostringstream c1;
  write_report_csv(c1, rep);
  std::istringstream ci(c1.str());
  const auto back = read_report_csv(ci);
  std::ostringstream c2;
  write_report_csv(c2, back);
  CHECK(c1.str() == c2.str());
  CHECK(back.entries[0].cdf_ns == rep.entries[0].cdf_ns);

  std::istringstream broken("{\"entries\": [");
  CHECK_THROWS_AS(read_report_json(broken), format_error);
  CHECK_THROWS_AS(save_report("/tmp/x", rep, "xml"), argument_error);
}

TEST_CASE("scenario JSON round-trip and validation") {
  scenario_config sc;
  sc.which = channel_case::eva5;
  sc.snr_list = {-10.0, std::numeric_limits<double>::infinity()};
  sc.seed = 99;
  const auto back = scenario_from_json(to_json(sc));
  CHECK(back.which == sc.which);
  CHECK(back.snr_list == sc.snr_list);
  CHECK(back.seed == 99);
  sc.n_records = 0;
  CHECK_THROWS_AS(validate(sc), argument_error);
  sc.n_records = 1;
  sc.snr_list.clear();
  CHECK_THROWS_AS(validate(sc), argument_error);
}

TEST_CASE("generation is deterministic and independent of the worker count") {
  temp_dir dir;
  scenario_config sc;
  sc.which = channel_case::epa5;
  sc.snr_list = {0.0, 5.0};
  sc.n_records = 100;
  sc.seed = 7;
  gen_dataset(sc, dir / "a.toad");
  gen_dataset(sc, dir / "b.toad");
  setenv("TOA_LAB_THREADS", "4", 1);
  gen_dataset(sc, dir / "c.toad");
  setenv("TOA_LAB_THREADS", "0", 1);
  const auto a = bytes_of(dir / "a.toad");
  CHECK(a == bytes_of(dir / "b.toad"));
  CHECK(a == bytes_of(dir / "c.toad"));
  const auto ds = load_dataset(dir / "a.toad");
  CHECK(ds.records.size() == 100);
  CHECK(ds.window == 32);
  CHECK(ds.n_rb == 6);
  CHECK(ds.records[1].snr_db == 5.0f);
  CHECK(fs::exists(scenario_path(dir / "a.toad")));
}

TEST_CASE("noiseless static records: peak error within half a sample") {
  scenario_config sc;
  sc.snr_list = {std::numeric_limits<double>::infinity()};
  sc.n_records = 60;
  const auto ds = generate_dataset(sc);
  for (const auto& r : ds.records) {
    const double err = std::abs(peak_from_record(r, ds.window, ds.n_rb, ts) * 1e9 - r.toa_true_ns);
    CHECK(err <= ts * 1e9 / 2 + 1e-3);
  }
}

TEST_CASE("evaluate from files matches in-memory runs") {
  temp_dir dir;
  scenario_config sc;
  sc.which = channel_case::eva5;
  sc.snr_list = {10.0};
  sc.n_records = 30;
  sc.seed = 12;
  const auto path = dir / "e.toad";
  gen_dataset(sc, path);

  const toa_method methods[] = {toa_method::peak, toa_method::ls};
  const auto run = run_scenario(sc, methods);
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<error_sample> errs;
    std::vector<error_sample> fails;
    collect_errors(run.data, run.toa[k], errs, fails);
    const auto expect = compute_metrics(to_string(methods[k]), errs, fails);
    const auto rep = evaluate({methods[k], std::nullopt}, path);
    REQUIRE(rep.entries.size() == 1);
    CHECK(rep.entries[0].cdf_ns == expect[0].cdf_ns);
    CHECK(rep.seeds == std::vector<std::uint64_t>{12});
  }
  for (auto m : {toa_method::music, toa_method::esprit}) {
    const auto rep = evaluate({m, std::nullopt}, path);
    CHECK(rep.entries[0].count + rep.entries[0].failures == 30);
  }

  auto ds = load_dataset(path);
  ds.records[4].planes[3] += 0.25f;
  save_dataset(path, ds);
  CHECK_THROWS_AS(evaluate({toa_method::ls, std::nullopt}, path), dataset_error);
  fs::remove(scenario_path(path));
  CHECK_THROWS_AS(evaluate({toa_method::music, std::nullopt}, path), dataset_error);
  CHECK_NOTHROW(evaluate({toa_method::peak, std::nullopt}, path));
  CHECK_THROWS_AS(evaluate({toa_method::nn, std::nullopt}, path), argument_error);
}

TEST_CASE("network estimates add the anchor back") {
  dataset ds = random_dataset(3, 4);
  auto net = nn::zero_network<float>(8, 2);
  for (auto c : all_channel_cases) {
    net.head(c).fc3.bias[0] = 250.0f;
  }
  const auto est = nn_estimates(net, ds, ts);
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    CHECK(est[i] == doctest::Approx(ds.records[i].anchor * ts + 250e-9).epsilon(1e-9));
  }
  const auto wrong = nn::zero_network<float>(32, 6);
  CHECK_THROWS_AS(nn_estimates(wrong, ds, ts), shape_error);
}

TEST_CASE("command line") {
  temp_dir dir;
  const auto d = dir / "d.toad";
  CHECK(run_cli({"gen", "--case", "static", "--snr", "0", "--n", "10", "--seed", "1", "--out", d}) == 0);
  CHECK(fs::exists(d));
  CHECK(run_cli({"eval", "--estimator", "nn", "--data", d}) == 2);
  CHECK(run_cli({"eval", "--estimator", "peak", "--data", d, "--report", dir / "r.csv", "--format", "csv"}) == 0);
  CHECK(fs::exists(dir / "r.csv"));
  CHECK(run_cli({"selftest"}) == 0);
  CHECK(run_cli({"frobnicate"}) == 2);
  CHECK(run_cli({"gen", "--bogus", "1", "--out", d}) == 2);
  CHECK(run_cli({"gen", "--case", "rural", "--out", d}) == 2);
  CHECK(run_cli({"gen", "--snr", "loud", "--out", d}) == 2);
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"eval", "--estimator", "peak", "--data", dir / "missing.toad"}) == 1);
  CHECK(run_cli({"train", "--stage", "2", "--data", d, "--ckpt", dir / "x.toap"}) == 2);
  CHECK(run_cli({"train", "--stage", "1", "--data", d, "--ckpt", dir / "x.toap", "--epochs", "1"}) == 1);
}

TEST_CASE("tool binary runs as a separate process") {
  temp_dir dir;
  const std::string bin = TOA_LAB_BINARY;
  CHECK(std::system((bin + " selftest > /dev/null").c_str()) == 0);
  const int rc = std::system((bin + " eval --estimator nn --data " + (dir / "none.toad") + " 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(rc) == 2);
}
