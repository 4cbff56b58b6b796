#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "toalab/classical.hpp"
#include "toalab/dataset.hpp"
#include "toalab/neural.hpp"
#include "toalab/pipeline.hpp"
#include "toalab/report.hpp"

namespace toalab {

/// Path of the scenario written next to a dataset file.
std::filesystem::path scenario_path(const std::filesystem::path& dataset_path);

/// Records of a scenario in index order. Records whose pipeline raises an
/// invariant violation are dropped and reported on stderr.
dataset generate_dataset(const scenario_config& scenario, const pipeline_settings& settings = {});

/// Writes the dataset and its scenario sidecar.
void gen_dataset(const scenario_config& scenario, const std::filesystem::path& out_path);

/// Generated records together with classical estimates on the same observations.
struct scenario_run {
  dataset data;
  std::vector<toa_method> methods;
  /// [method][record] TOA in seconds; nullopt where the estimator failed.
  std::vector<std::vector<std::optional<double>>> toa;
};

scenario_run run_scenario(const scenario_config& scenario, std::span<const toa_method> methods,
                          const pipeline_settings& settings = {});

/// Peak detection on the full-band amplitude plane of a stored record.
double peak_from_record(const dataset_record& record, std::uint32_t window, std::uint32_t n_rb,
                        double sample_period);

/// Network TOA estimates (seconds) for every record.
std::vector<double> nn_estimates(const nn::network_params<float>& params, const dataset& ds, double sample_period);

/// Pairs estimates with stored ground truth.
void collect_errors(const dataset& ds, std::span<const std::optional<double>> toa, std::vector<error_sample>& errors,
                    std::vector<error_sample>& failures);

struct estimator_spec {
  toa_method method = toa_method::peak;
  std::optional<std::filesystem::path> checkpoint;
};

/// Runs one estimator over a dataset file. Peak detection and the network work
/// from the stored records; the other estimators re-simulate the received
/// signals from the scenario sidecar and check that the regenerated feature
/// maps match the file.
metrics_report evaluate(const estimator_spec& spec, const std::filesystem::path& dataset_path);

} // namespace toalab
