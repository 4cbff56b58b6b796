#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "toalab/channel.hpp"

namespace toalab {

/// Signed TOA error of one record (estimate minus truth, ns).
struct error_sample {
  channel_case which = channel_case::static_los;
  double snr_db = 0.0;
  double error_ns = 0.0;
};

/// Accuracy of one estimator on one (case, SNR) cell.
struct metrics_entry {
  std::string estimator;
  channel_case which = channel_case::static_los;
  double snr_db = 0.0;
  std::size_t count = 0;
  std::size_t failures = 0;
  double rmse_ns = 0.0;
  double median_ns = 0.0;
  double bias_ns = 0.0;        ///< mean signed error
  std::vector<double> cdf_ns;  ///< sorted |errors|
};

struct metrics_report {
  std::vector<metrics_entry> entries;
  std::vector<std::uint64_t> seeds;
  std::string config_hash;
};

/// Groups errors by (case, SNR), sorted ascending by both. `failures` lists
/// records the estimator could not process, by cell.
std::vector<metrics_entry> compute_metrics(const std::string& estimator, const std::vector<error_sample>& errors,
                                           const std::vector<error_sample>& failures = {});

/// Median of |errors|; mean of the two middle values for even counts.
double median_abs(std::vector<double> values);
double rmse(const std::vector<double>& values);

void write_report_json(std::ostream& out, const metrics_report& report);
metrics_report read_report_json(std::istream& in);

/// One row per entry; the CDF column holds ';'-separated values.
void write_report_csv(std::ostream& out, const metrics_report& report);
metrics_report read_report_csv(std::istream& in);

void save_report(const std::filesystem::path& path, const metrics_report& report, const std::string& format);

} // namespace toalab
