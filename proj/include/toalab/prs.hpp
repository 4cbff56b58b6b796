#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace toalab {

using cf64 = std::complex<double>;

/// OFDM numerology of the positioning workbench.
///
/// Subcarrier k of the K occupied subcarriers maps to DFT bin k, so the
/// baseband model is s(t) = sum_k d_k e^{j2πkΔf(t - N_cp T_s)}.
struct system_config {
  unsigned n_subcarriers = 72;
  unsigned fft_size = 128;
  double subcarrier_spacing = 15e3;
  double sample_period = 1.0 / 1.92e6;
  /// Cyclic prefix length of each symbol inside one slot.
  std::vector<unsigned> cp_lengths = {10, 9, 9, 9, 9, 9, 9};
  unsigned n_rb = 6;
  unsigned symbols_per_slot = 7;
  unsigned slots_per_subframe = 2;

  unsigned symbols_per_subframe() const { return symbols_per_slot * slots_per_subframe; }
  unsigned cp_length(unsigned symbol) const { return cp_lengths[symbol % symbols_per_slot]; }
  std::size_t slot_samples() const;
  std::size_t subframe_samples() const { return slot_samples() * slots_per_subframe; }
  /// Sample index (CP start) of symbol `symbol`, counted from the first subframe.
  std::size_t symbol_start(unsigned symbol) const;
  unsigned min_cp_length() const;
};

/// Throws config_error when any numerology invariant is violated.
void validate(const system_config& config);

/// Named presets. Only "nbiot-1.4MHz" is defined.
system_config build_config(std::string_view profile);

/// Positioning reference symbols d[symbol][k] with their occupancy mask.
struct prs_grid {
  unsigned n_subframes = 0;
  unsigned n_symbols = 0;
  unsigned n_subcarriers = 0;
  std::vector<cf64> symbols;
  std::vector<std::uint8_t> mask;

  cf64 at(unsigned symbol, unsigned k) const { return symbols[index(symbol, k)]; }
  bool occupied(unsigned symbol, unsigned k) const { return mask[index(symbol, k)] != 0; }
  std::size_t index(unsigned symbol, unsigned k) const {
    return static_cast<std::size_t>(symbol) * n_subcarriers + k;
  }
};

/// Subframe-relative symbol indices carrying PRS.
inline constexpr unsigned prs_symbols_in_subframe[] = {3, 5, 6, 8, 9, 10, 12, 13};
/// Comb spacing of the PRS resource elements.
inline constexpr unsigned prs_comb = 6;

/// 31-bit Gold sequence c(n) with the usual Nc = 1600 warm-up.
std::vector<std::uint8_t> gold_sequence(std::uint32_t c_init, std::size_t length);

prs_grid generate_prs_grid(const system_config& config, int cell_id, unsigned n_subframes);

/// Complex baseband samples at rate 1/T_s. `start_offset` is the absolute
/// sample index of samples[0] relative to the frame origin.
struct baseband_signal {
  std::vector<cf64> samples;
  std::int64_t start_offset = 0;

  std::size_t size() const { return samples.size(); }
  /// Sample at absolute index `n`, zero outside the stored range.
  cf64 at(std::int64_t n) const {
    const std::int64_t i = n - start_offset;
    return (i >= 0 && i < static_cast<std::int64_t>(samples.size())) ? samples[static_cast<std::size_t>(i)]
                                                                     : cf64{};
  }
};

/// Per-symbol unitary IDFT plus CP. With no subcarrier set this yields the
/// full-band signal; with an RB's index set it yields that RB's replica.
baseband_signal modulate_grid(const system_config& config, const prs_grid& grid,
                              std::optional<std::span<const unsigned>> subcarrier_set = std::nullopt);

/// Subcarrier indices {12v, ..., 12v+11} of resource block v.
std::vector<unsigned> rb_subcarrier_set(const system_config& config, unsigned rb);

/// Copies the absolute sample range [start, start + length) of `signal` into a
/// new buffer, zero-filling anything the signal does not cover.
baseband_signal window(const baseband_signal& signal, std::int64_t start, std::size_t length);

} // namespace toalab
