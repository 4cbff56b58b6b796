#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "toalab/neural.hpp"

namespace toalab {

inline constexpr std::uint32_t checkpoint_version = 1;

/// "TOAP" | version u32 | M u32 | N_RB u32 | tensors. Each tensor is a rank
/// u32, its dims (u32 each) and little-endian f32 data, in the order of
/// network_params::tensors() (extractor first, then heads in case order).
void write_checkpoint(std::ostream& out, const nn::network_params<float>& params);
nn::network_params<float> read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const nn::network_params<float>& params);
nn::network_params<float> load_checkpoint(const std::filesystem::path& path);

} // namespace toalab
