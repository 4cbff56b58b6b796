#include "toalab/evaluate.hpp"

#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "toalab/checkpoint.hpp"
#include "toalab/errors.hpp"
#include "toalab/parallel.hpp"

namespace toalab {

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

scenario_config load_scenario(const std::filesystem::path& dataset_path) {
  const auto path = scenario_path(dataset_path);
  std::ifstream in(path);
  if (!in) {
    throw dataset_error("missing scenario file " + path.string());
  }
  try {
    return scenario_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw dataset_error("malformed scenario file " + path.string() + ": " + e.what());
  }
}

bool same_planes(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

} // namespace

std::filesystem::path scenario_path(const std::filesystem::path& dataset_path) {
  auto p = dataset_path;
  p += ".json";
  return p;
}

scenario_run run_scenario(const scenario_config& scenario, std::span<const toa_method> methods,
                          const pipeline_settings& settings) {
  validate(scenario);
  for (auto m : methods) {
    if (m == toa_method::nn) {
      throw argument_error("run_scenario covers classical estimators only");
    }
  }
  const workbench bench(build_config("nbiot-1.4MHz"), scenario.cell_id, scenario.n_subframes, settings);
  if (std::find(methods.begin(), methods.end(), toa_method::ls) != methods.end()) {
    bench.ls_dictionary();
  }

  struct slot {
    std::optional<dataset_record> record;
    std::vector<std::optional<double>> toa;
    std::string failure;
  };
  std::vector<slot> slots(scenario.n_records);
  parallel_for(scenario.n_records, [&](std::size_t i) {
    observation obs;
    try {
      obs = simulate_record(bench, scenario, i);
    } catch (const error& e) {
      slots[i].failure = e.what();
      return;
    }
    slots[i].record = to_record(obs, scenario.which, record_snr(scenario, i));
    for (auto m : methods) {
      try {
        slots[i].toa.push_back(run_classical(m, bench, obs, scenario.which).toa);
      } catch (const error&) {
        slots[i].toa.push_back(std::nullopt);
      }
    }
  });

  scenario_run run;
  run.methods.assign(methods.begin(), methods.end());
  run.toa.resize(methods.size());
  run.data.window = static_cast<std::uint32_t>(settings.window);
  run.data.n_rb = bench.config().n_rb;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto& s = slots[i];
    if (!s.record) {
      std::cerr << "record " << i << " dropped: " << s.failure << '\n';
      continue;
    }
    run.data.records.push_back(std::move(*s.record));
    for (std::size_t k = 0; k < methods.size(); ++k) {
      run.toa[k].push_back(s.toa[k]);
    }
  }
  return run;
}

dataset generate_dataset(const scenario_config& scenario, const pipeline_settings& settings) {
  return run_scenario(scenario, {}, settings).data;
}

void gen_dataset(const scenario_config& scenario, const std::filesystem::path& out_path) {
  const dataset ds = generate_dataset(scenario);
  save_dataset(out_path, ds);
  std::ofstream side(scenario_path(out_path), std::ios::binary);
  side << to_json(scenario).dump(2) << '\n';
  if (!side) {
    throw dataset_error("cannot write " + scenario_path(out_path).string());
  }
}

double peak_from_record(const dataset_record& record, std::uint32_t window, std::uint32_t n_rb,
                        double sample_period) {
  const std::size_t stride = (1 + static_cast<std::size_t>(n_rb)) * 2;
  if (record.planes.size() != window * stride) {
    throw shape_error("record planes do not match the dataset shape");
  }
  correlation_series s;
  s.anchor = record.anchor;
  s.window = window;
  s.values.resize(window);
  for (std::size_t m = 0; m < window; ++m) {
    s.values[m] = std::polar(static_cast<double>(record.planes[m * stride]),
                             static_cast<double>(record.planes[m * stride + 1]));
  }
  return toa_peak(s, sample_period).toa;
}

std::vector<double> nn_estimates(const nn::network_params<float>& params, const dataset& ds, double sample_period) {
  if (params.window != ds.window || params.n_rb != ds.n_rb) {
    throw shape_error("checkpoint shape does not match the dataset");
  }
  std::vector<double> out(ds.records.size());
  parallel_for(ds.records.size(), [&](std::size_t i) {
    const auto& r = ds.records[i];
    const double rel_ns = nn::predict(params, r.which, std::span<const float>(r.planes));
    out[i] = static_cast<double>(r.anchor) * sample_period + rel_ns * 1e-9;
  });
  return out;
}

void collect_errors(const dataset& ds, std::span<const std::optional<double>> toa, std::vector<error_sample>& errors,
                    std::vector<error_sample>& failures) {
  if (toa.size() != ds.records.size()) {
    throw argument_error("estimate count does not match the record count");
  }
  for (std::size_t i = 0; i < toa.size(); ++i) {
    const auto& r = ds.records[i];
    error_sample e{r.which, r.snr_db, 0.0};
    if (toa[i]) {
      e.error_ns = *toa[i] * 1e9 - static_cast<double>(r.toa_true_ns);
      errors.push_back(e);
    } else {
      failures.push_back(e);
    }
  }
}

metrics_report evaluate(const estimator_spec& spec, const std::filesystem::path& dataset_path) {
  const double ts = build_config("nbiot-1.4MHz").sample_period;
  if (spec.method == toa_method::nn && !spec.checkpoint) {
    throw argument_error("the nn estimator needs a checkpoint");
  }
  const dataset ds = load_dataset(dataset_path);
  std::vector<std::optional<double>> toa(ds.records.size());
  metrics_report report;
  std::string provenance = "M=" + std::to_string(ds.window) + ";N_RB=" + std::to_string(ds.n_rb);

  switch (spec.method) {
  case toa_method::peak:
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      toa[i] = peak_from_record(ds.records[i], ds.window, ds.n_rb, ts);
    }
    break;
  case toa_method::nn: {
    const auto params = load_checkpoint(*spec.checkpoint);
    const auto est = nn_estimates(params, ds, ts);
    std::copy(est.begin(), est.end(), toa.begin());
    provenance += ";ckpt=" + hex(nn::extractor_hash(params));
    break;
  }
  default: {
    const scenario_config scenario = load_scenario(dataset_path);
    if (ds.window != pipeline_settings{}.window) {
      throw dataset_error("dataset window differs from the pipeline window");
    }
    const toa_method methods[] = {spec.method};
    const auto run = run_scenario(scenario, methods);
    if (run.data.records.size() != ds.records.size()) {
      throw dataset_error("scenario regenerates a different number of records");
    }
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      if (!same_planes(run.data.records[i].planes, ds.records[i].planes)) {
        throw dataset_error("record " + std::to_string(i) + " does not match its scenario");
      }
    }
    toa = run.toa[0];
    report.seeds.push_back(scenario.seed);
    provenance += ";" + to_json(scenario).dump();
    break;
  }
  }
  if (report.seeds.empty()) {
    try {
      report.seeds.push_back(load_scenario(dataset_path).seed);
    } catch (const dataset_error&) {
    }
  }

  std::vector<error_sample> errors;
  std::vector<error_sample> failures;
  collect_errors(ds, toa, errors, failures);
  report.entries = compute_metrics(to_string(spec.method), errors, failures);
  report.config_hash = hex(fnv1a(provenance));
  return report;
}

} // namespace toalab
