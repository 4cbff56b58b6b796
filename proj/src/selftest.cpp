#include "toalab/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "toalab/checkpoint.hpp"
#include "toalab/dataset.hpp"
#include "toalab/errors.hpp"
#include "toalab/neural.hpp"
#include "toalab/pipeline.hpp"
#include "toalab/report.hpp"

namespace toalab {

namespace {

using check_fn = std::function<std::string()>; // empty string on success

std::string check_prs_coverage() {
  const auto config = build_config("nbiot-1.4MHz");
  for (int cell : {0, 1, 5, 17}) {
    const auto grid = generate_prs_grid(config, cell, 1);
    for (unsigned k = 0; k < grid.n_subcarriers; ++k) {
      bool hit = false;
      for (unsigned s : prs_symbols_in_subframe) {
        hit = hit || grid.occupied(s, k);
      }
      if (!hit) {
        return "cell " + std::to_string(cell) + " leaves subcarrier " + std::to_string(k) + " empty";
      }
    }
  }
  return {};
}

std::string check_rb_sum() {
  scenario_config sc;
  sc.n_records = 3;
  sc.snr_list = {0.0};
  for (auto c : all_channel_cases) {
    sc.which = c;
    const workbench bench(build_config("nbiot-1.4MHz"), sc.cell_id, sc.n_subframes);
    for (std::size_t i = 0; i < sc.n_records; ++i) {
      const auto obs = simulate_record(bench, sc, i);
      double scale = 0.0;
      double worst = 0.0;
      for (std::size_t m = 0; m < obs.full.values.size(); ++m) {
        cf64 sum = 0.0;
        for (const auto& rb : obs.rbs) {
          sum += rb.values[m];
        }
        scale = std::max(scale, std::abs(obs.full.values[m]));
        worst = std::max(worst, std::abs(sum - obs.full.values[m]));
      }
      if (worst > 1e-6 * scale) {
        return to_string(c) + " record " + std::to_string(i) + " RB sum residual " + std::to_string(worst / scale);
      }
    }
  }
  return {};
}

std::string check_static_peak() {
  scenario_config sc;
  sc.n_records = 8;
  sc.snr_list = {std::numeric_limits<double>::infinity()};
  const auto config = build_config("nbiot-1.4MHz");
  const workbench bench(config, sc.cell_id, sc.n_subframes);
  for (std::size_t i = 0; i < sc.n_records; ++i) {
    const auto obs = simulate_record(bench, sc, i);
    const double err = std::abs(toa_peak(obs.full, config.sample_period).toa - obs.channel.toa_true);
    if (err > config.sample_period) {
      return "noiseless peak error " + std::to_string(err * 1e9) + " ns";
    }
  }
  return {};
}

std::string check_round_trips() {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> n01;
  dataset ds{8, 2, {}};
  for (int i = 0; i < 4; ++i) {
    dataset_record r;
    r.planes.resize(8 * 3 * 2);
    for (auto& v : r.planes) {
      v = n01(rng);
    }
    r.toa_true_ns = n01(rng);
    r.anchor = i;
    r.which = all_channel_cases[i % n_channel_cases];
    r.snr_db = n01(rng);
    ds.records.push_back(r);
  }
  std::stringstream a;
  write_dataset(a, ds);
  std::stringstream b;
  write_dataset(b, read_dataset(a));
  if (a.str() != b.str()) {
    return "dataset bytes changed";
  }
  const auto net = nn::init_network<float>(8, 2, 4);
  std::stringstream c;
  write_checkpoint(c, net);
  std::stringstream d;
  write_checkpoint(d, read_checkpoint(c));
  if (c.str() != d.str()) {
    return "checkpoint bytes changed";
  }
  metrics_report rep;
  rep.entries = compute_metrics("peak", {{channel_case::epa5, 0.0, 1.5}, {channel_case::epa5, 0.0, -3.25}});
  rep.seeds = {1};
  rep.config_hash = "00";
  std::stringstream e;
  write_report_json(e, rep);
  std::stringstream f;
  write_report_json(f, read_report_json(e));
  if (e.str() != f.str()) {
    return "report bytes changed";
  }
  return {};
}

std::string check_gradient() {
  auto net = nn::init_network<double>(8, 2, 11);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n01;
  auto tensors = net.tensors();
  for (std::size_t t = 1; t < tensors.size(); t += 2) {
    for (auto& b : tensors[t]) {
      b = 0.1 * n01(rng);
    }
  }
  std::vector<nn::example<double>> batch(3);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    batch[i].input.resize(net.input_size());
    for (auto& v : batch[i].input) {
      v = n01(rng);
    }
    batch[i].target = n01(rng);
    batch[i].which = all_channel_cases[i];
  }
  const auto lg = nn::loss_and_grad<double>(net, batch);
  auto params = net.tensors();
  const auto grads = lg.grad.tensors();
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t i = 0; i < params[t].size(); i += 7) {
      const double keep = params[t][i];
      params[t][i] = keep + h;
      const double up = nn::mean_loss<double>(net, batch);
      params[t][i] = keep - h;
      const double down = nn::mean_loss<double>(net, batch);
      params[t][i] = keep;
      const double numeric = (up - down) / (2 * h);
      const double denom = std::max({std::abs(numeric), std::abs(grads[t][i]), 1e-6});
      worst = std::max(worst, std::abs(numeric - grads[t][i]) / denom);
    }
  }
  if (worst > 1e-3) {
    return "gradient mismatch " + std::to_string(worst);
  }
  return {};
}

} // namespace

int run_selftest(std::ostream& out) {
  const std::pair<const char*, check_fn> checks[] = {
      {"prs-coverage", check_prs_coverage}, {"rb-sum", check_rb_sum},
      {"static-peak", check_static_peak},   {"round-trips", check_round_trips},
      {"gradient", check_gradient},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    std::string problem;
    try {
      problem = fn();
    } catch (const std::exception& e) {
      problem = e.what();
    }
    if (problem.empty()) {
      out << "ok   " << name << '\n';
    } else {
      out << "FAIL " << name << ": " << problem << '\n';
      ++failed;
    }
  }
  return failed;
}

} // namespace toalab
