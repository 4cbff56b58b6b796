#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "toalab/channel.hpp"
#include "toalab/neural.hpp"

namespace toalab {

/// One generated observation as stored on disk.
struct dataset_record {
  std::vector<float> planes; ///< M x (1 + N_RB) x 2, row-major
  float toa_true_ns = 0.0f;  ///< absolute first-path delay
  std::int32_t anchor = 0;
  channel_case which = channel_case::static_los;
  float snr_db = 0.0f;
};

struct dataset {
  std::uint32_t window = 0;
  std::uint32_t n_rb = 0;
  std::vector<dataset_record> records;
};

inline constexpr std::uint32_t dataset_version = 1;

/// "TOAD" | version u32 | record count u64 | M u32 | N_RB u32 | records.
/// Each record: planes (f32), toa_true_ns f32, anchor i32, case u8, snr_db f32.
void write_dataset(std::ostream& out, const dataset& ds);
dataset read_dataset(std::istream& in);

void save_dataset(const std::filesystem::path& path, const dataset& ds);
dataset load_dataset(const std::filesystem::path& path);

/// Training pairs with targets in ns relative to each record's anchor.
std::vector<nn::example<float>> to_examples(const dataset& ds, double sample_period);

} // namespace toalab
