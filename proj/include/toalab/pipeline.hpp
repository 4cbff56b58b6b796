#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "toalab/channel.hpp"
#include "toalab/classical.hpp"
#include "toalab/correlator.hpp"
#include "toalab/dataset.hpp"
#include "toalab/prs.hpp"

namespace toalab {

/// What to simulate for one dataset file.
struct scenario_config {
  channel_case which = channel_case::static_los;
  std::vector<double> snr_list = {0.0};
  std::size_t n_records = 100;
  unsigned n_subframes = 2;
  int cell_id = 0;
  std::uint64_t seed = 1;
  double toa_min = 0.0;                   ///< seconds
  double toa_max = 10.0 / 1.92e6;         ///< seconds
};

void validate(const scenario_config& scenario);
nlohmann::json to_json(const scenario_config& scenario);
scenario_config scenario_from_json(const nlohmann::json& j);

/// Receiver-side constants of the feature pipeline.
struct pipeline_settings {
  std::size_t window = 32;         ///< M
  std::size_t sync_span = 48;      ///< lags searched by coarse sync
  unsigned sync_guard = default_sync_guard;
  std::size_t stream_padding = 96; ///< extra received samples after the PRS occasion
};

/// Everything observed for one record.
struct observation {
  channel_realization channel;
  baseband_signal received; ///< noisy stream, start_offset 0
  std::int64_t anchor = 0;
  correlation_series full;
  std::vector<correlation_series> rbs;
  feature_map map;
};

/// Reference replicas and receiver settings for one (cell, occasion length).
class workbench {
public:
  workbench(system_config config, int cell_id, unsigned n_subframes, pipeline_settings settings = {});

  const system_config& config() const { return config_; }
  const pipeline_settings& settings() const { return settings_; }
  const prs_grid& grid() const { return grid_; }
  const baseband_signal& reference() const { return reference_; }
  const std::vector<baseband_signal>& rb_references() const { return rb_references_; }
  /// N_t: the whole PRS occasion.
  std::size_t span() const { return reference_.size(); }
  std::size_t stream_length() const { return reference_.size() + settings_.stream_padding; }

  /// Propagates the reference, adds noise at `snr_db` relative to the
  /// noiseless received power, synchronises and builds the feature map.
  observation observe(const channel_realization& channel, double snr_db, std::mt19937_64& rng) const;

  /// Least-squares templates on the default delay grid, built on first use.
  const correlation_dictionary& ls_dictionary() const;

private:
  system_config config_;
  pipeline_settings settings_;
  prs_grid grid_;
  baseband_signal reference_;
  std::vector<baseband_signal> rb_references_;
  mutable std::once_flag dictionary_once_;
  mutable std::unique_ptr<correlation_dictionary> dictionary_;
};

/// Seed of record `index` under master seed `master` (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// SNR of record `index`: the scenario list taken round-robin.
double record_snr(const scenario_config& scenario, std::size_t index);

/// Draws the TOA offset, channel and noise of record `index` from its derived seed.
observation simulate_record(const workbench& bench, const scenario_config& scenario, std::size_t index);

dataset_record to_record(const observation& obs, channel_case which, double snr_db);

/// Default delay grid of the least-squares search, relative to the anchor.
delay_grid ls_grid(const system_config& config);
/// Default MUSIC grid, relative to the anchor.
delay_grid music_grid(const system_config& config);
/// Lower edge of the ESPRIT unwrapping interval, relative to the anchor.
double esprit_wrap_min(const system_config& config);
/// Number of paths the classical baselines fit for a channel case.
unsigned baseline_paths(channel_case which);
/// Subarray length of the subspace baselines.
unsigned baseline_subarray(const system_config& config);

/// Runs one classical estimator with the default baseline settings.
toa_estimate run_classical(toa_method method, const workbench& bench, const observation& obs, channel_case which);

} // namespace toalab
