#include "toalab/pipeline.hpp"

#include <cmath>
#include <limits>

#include "toalab/errors.hpp"

namespace toalab {

using json = nlohmann::json;

void validate(const scenario_config& scenario) {
  if (scenario.n_records == 0) {
    throw argument_error("scenario needs at least one record");
  }
  if (scenario.snr_list.empty()) {
    throw argument_error("scenario needs at least one SNR value");
  }
  if (scenario.n_subframes != 1 && scenario.n_subframes != 2) {
    throw argument_error("PRS occasion must span 1 or 2 subframes");
  }
  if (scenario.cell_id < 0 || scenario.cell_id > 503) {
    throw argument_error("cell id must lie in [0, 503]");
  }
  if (!(scenario.toa_min >= 0.0) || !(scenario.toa_max >= scenario.toa_min)) {
    throw argument_error("TOA range must satisfy 0 <= min <= max");
  }
}

namespace {

json snr_json(double v) {
  return std::isinf(v) ? json("inf") : json(v);
}

double snr_value(const json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  return j.get<double>();
}

} // namespace

json to_json(const scenario_config& s) {
  json snrs = json::array();
  for (double v : s.snr_list) {
    snrs.push_back(snr_json(v));
  }
  return {{"case", to_string(s.which)}, {"snr_db", snrs},        {"n_records", s.n_records},
          {"n_subframes", s.n_subframes}, {"cell_id", s.cell_id}, {"seed", s.seed},
          {"toa_min_s", s.toa_min},     {"toa_max_s", s.toa_max}};
}

scenario_config scenario_from_json(const json& j) {
  scenario_config s;
  s.which = parse_channel_case(j.at("case").get<std::string>());
  s.snr_list.clear();
  for (const auto& v : j.at("snr_db")) {
    s.snr_list.push_back(snr_value(v));
  }
  s.n_records = j.at("n_records").get<std::size_t>();
  s.n_subframes = j.at("n_subframes").get<unsigned>();
  s.cell_id = j.at("cell_id").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.toa_min = j.at("toa_min_s").get<double>();
  s.toa_max = j.at("toa_max_s").get<double>();
  validate(s);
  return s;
}

workbench::workbench(system_config config, int cell_id, unsigned n_subframes, pipeline_settings settings)
    : config_(std::move(config)), settings_(settings) {
  validate(config_);
  grid_ = generate_prs_grid(config_, cell_id, n_subframes);
  reference_ = modulate_grid(config_, grid_);
  for (unsigned v = 0; v < config_.n_rb; ++v) {
    const auto set = rb_subcarrier_set(config_, v);
    rb_references_.push_back(modulate_grid(config_, grid_, std::span<const unsigned>(set)));
  }
  if (settings_.stream_padding < settings_.sync_span + settings_.window) {
    throw config_error("stream padding must cover the sync span plus the correlation window");
  }
}

observation workbench::observe(const channel_realization& channel, double snr_db, std::mt19937_64& rng) const {
  observation obs;
  obs.channel = channel;
  obs.channel.snr_db = snr_db;
  const baseband_signal rx = propagate(reference_, channel, config_);
  const double power = mean_power(rx);
  obs.received = add_awgn(window(rx, 0, stream_length()), snr_db, rng, power);

  const auto wide = cross_correlate(obs.received, reference_, 0, settings_.sync_span, span());
  obs.anchor = coarse_sync(wide, settings_.sync_guard);
  obs.full = cross_correlate(obs.received, reference_, obs.anchor, settings_.window, span());
  obs.rbs.reserve(rb_references_.size());
  for (const auto& ref : rb_references_) {
    obs.rbs.push_back(cross_correlate(obs.received, ref, obs.anchor, settings_.window, span()));
  }
  obs.map = build_feature_map(obs.full, obs.rbs, settings_.window);
  return obs;
}

const correlation_dictionary& workbench::ls_dictionary() const {
  std::call_once(dictionary_once_, [this] {
    dictionary_ = std::make_unique<correlation_dictionary>(
        make_correlation_dictionary(config_, reference_, ls_grid(config_), settings_.window, span()));
  });
  return *dictionary_;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t x = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double record_snr(const scenario_config& scenario, std::size_t index) {
  return scenario.snr_list[index % scenario.snr_list.size()];
}

observation simulate_record(const workbench& bench, const scenario_config& scenario, std::size_t index) {
  std::mt19937_64 rng(derive_seed(scenario.seed, index));
  std::uniform_real_distribution<double> toa(scenario.toa_min, scenario.toa_max);
  const double toa_offset = toa(rng);
  const auto channel = draw_realization(profile(scenario.which), toa_offset, rng);
  return bench.observe(channel, record_snr(scenario, index), rng);
}

dataset_record to_record(const observation& obs, channel_case which, double snr_db) {
  dataset_record r;
  r.planes = obs.map.planes;
  r.toa_true_ns = static_cast<float>(obs.channel.toa_true * 1e9);
  r.anchor = static_cast<std::int32_t>(obs.anchor);
  r.which = which;
  r.snr_db = static_cast<float>(snr_db);
  return r;
}

delay_grid ls_grid(const system_config& config) {
  const double ts = config.sample_period;
  return {-2.0 * ts, 10.0 * ts, ts / 16.0};
}

delay_grid music_grid(const system_config& config) {
  const double ts = config.sample_period;
  return {-2.0 * ts, 6.0 * ts, ts / 64.0};
}

double esprit_wrap_min(const system_config& config) {
  return -2.0 * config.sample_period;
}

unsigned baseline_paths(channel_case which) {
  return which == channel_case::static_los ? 1 : 3;
}

unsigned baseline_subarray(const system_config& config) {
  return config.n_subcarriers / 2;
}

toa_estimate run_classical(toa_method method, const workbench& bench, const observation& obs, channel_case which) {
  const auto& config = bench.config();
  switch (method) {
  case toa_method::peak:
    return toa_peak(obs.full, config.sample_period);
  case toa_method::ls:
    return toa_ls(obs.full, bench.ls_dictionary(), baseline_paths(which), config.sample_period);
  case toa_method::music: {
    const auto h = estimate_cfr(obs.received, bench.grid(), config, obs.anchor);
    return toa_music(h, {baseline_subarray(config), baseline_paths(which)}, music_grid(config));
  }
  case toa_method::esprit: {
    const auto h = estimate_cfr(obs.received, bench.grid(), config, obs.anchor);
    return toa_esprit(h, {baseline_subarray(config), baseline_paths(which)}, esprit_wrap_min(config));
  }
  case toa_method::nn:
    break;
  }
  throw argument_error("run_classical does not handle the neural estimator");
}

} // namespace toalab
