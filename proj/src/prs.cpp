#include "toalab/prs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "toalab/errors.hpp"
#include "toalab/fft.hpp"

namespace toalab {

std::size_t system_config::slot_samples() const {
  std::size_t total = 0;
  for (unsigned l = 0; l < symbols_per_slot; ++l) {
    total += fft_size + cp_length(l);
  }
  return total;
}

std::size_t system_config::symbol_start(unsigned symbol) const {
  const unsigned slot = symbol / symbols_per_slot;
  std::size_t start = slot * slot_samples();
  for (unsigned l = 0; l < symbol % symbols_per_slot; ++l) {
    start += fft_size + cp_length(l);
  }
  return start;
}

unsigned system_config::min_cp_length() const {
  return *std::min_element(cp_lengths.begin(), cp_lengths.end());
}

void validate(const system_config& config) {
  if (config.n_rb == 0 || config.n_subcarriers != 12 * config.n_rb) {
    throw config_error("number of subcarriers must equal 12 * n_rb");
  }
  if (config.fft_size < config.n_subcarriers) {
    throw config_error("fft size smaller than the number of subcarriers");
  }
  const double rate = config.subcarrier_spacing * config.fft_size;
  if (std::abs(rate * config.sample_period - 1.0) > 1e-12) {
    throw config_error("subcarrier spacing * fft size must equal the sampling rate");
  }
  if (config.cp_lengths.size() != config.symbols_per_slot) {
    throw config_error("need one cyclic prefix length per symbol of a slot");
  }
  if (std::any_of(config.cp_lengths.begin(), config.cp_lengths.end(), [](unsigned n) { return n == 0; })) {
    throw config_error("cyclic prefix lengths must be positive");
  }
  if (config.n_subcarriers % prs_comb != 0) {
    throw config_error("number of subcarriers must be a multiple of the PRS comb");
  }
}

system_config build_config(std::string_view profile) {
  if (profile == "nbiot-1.4MHz") {
    system_config config;
    validate(config);
    return config;
  }
  throw config_error("unknown numerology profile '" + std::string(profile) + "'");
}

std::vector<std::uint8_t> gold_sequence(std::uint32_t c_init, std::size_t length) {
  constexpr std::size_t nc = 1600;
  const std::size_t total = length + nc + 31;
  std::vector<std::uint8_t> x1(total, 0);
  std::vector<std::uint8_t> x2(total, 0);
  x1[0] = 1;
  for (std::size_t i = 0; i < 31; ++i) {
    x2[i] = static_cast<std::uint8_t>((c_init >> i) & 1U);
  }
  for (std::size_t n = 0; n + 31 < total; ++n) {
    x1[n + 31] = x1[n + 3] ^ x1[n];
    x2[n + 31] = x2[n + 3] ^ x2[n + 2] ^ x2[n + 1] ^ x2[n];
  }
  std::vector<std::uint8_t> c(length);
  for (std::size_t n = 0; n < length; ++n) {
    c[n] = x1[n + nc] ^ x2[n + nc];
  }
  return c;
}

prs_grid generate_prs_grid(const system_config& config, int cell_id, unsigned n_subframes) {
  if (cell_id < 0 || cell_id > 503) {
    throw argument_error("cell id must lie in [0, 503], got " + std::to_string(cell_id));
  }
  if (n_subframes != 1 && n_subframes != 2) {
    throw argument_error("PRS occasion must span 1 or 2 subframes, got " + std::to_string(n_subframes));
  }
  validate(config);

  prs_grid grid;
  grid.n_subframes = n_subframes;
  grid.n_symbols = n_subframes * config.symbols_per_subframe();
  grid.n_subcarriers = config.n_subcarriers;
  grid.symbols.assign(static_cast<std::size_t>(grid.n_symbols) * grid.n_subcarriers, cf64{});
  grid.mask.assign(grid.symbols.size(), 0);

  const unsigned v_shift = static_cast<unsigned>(cell_id) % prs_comb;
  const unsigned res_per_symbol = config.n_subcarriers / prs_comb;
  const double amp = 1.0 / std::sqrt(2.0);

  for (unsigned sf = 0; sf < n_subframes; ++sf) {
    for (unsigned j = 0; j < std::size(prs_symbols_in_subframe); ++j) {
      const unsigned l_sf = prs_symbols_in_subframe[j];
      const unsigned symbol = sf * config.symbols_per_subframe() + l_sf;
      const unsigned n_s = sf * config.slots_per_subframe + l_sf / config.symbols_per_slot;
      const unsigned l = l_sf % config.symbols_per_slot;
      const std::uint32_t c_init = (1U << 10) * (7U * (n_s + 1U) + l + 1U) * (2U * cell_id + 1U) +
                                   2U * static_cast<std::uint32_t>(cell_id) + 1U;
      const auto c = gold_sequence(c_init, 2 * res_per_symbol);
      // Diagonal comb: consecutive PRS symbols step the offset by one, so six
      // consecutive PRS symbols visit every subcarrier.
      const unsigned offset = (j + v_shift) % prs_comb;
      for (unsigned m = 0; m < res_per_symbol; ++m) {
        const unsigned k = prs_comb * m + offset;
        const double re = 1.0 - 2.0 * c[2 * m];
        const double im = 1.0 - 2.0 * c[2 * m + 1];
        grid.symbols[grid.index(symbol, k)] = cf64(re * amp, im * amp);
        grid.mask[grid.index(symbol, k)] = 1;
      }
    }
  }
  return grid;
}

baseband_signal modulate_grid(const system_config& config, const prs_grid& grid,
                              std::optional<std::span<const unsigned>> subcarrier_set) {
  std::vector<std::uint8_t> allowed(config.n_subcarriers, subcarrier_set ? 0 : 1);
  if (subcarrier_set) {
    for (unsigned k : *subcarrier_set) {
      if (k >= config.n_subcarriers) {
        throw argument_error("subcarrier index " + std::to_string(k) + " outside [0, K)");
      }
      allowed[k] = 1;
    }
  }

  baseband_signal out;
  out.samples.reserve(grid.n_subframes * config.subframe_samples());
  std::vector<cf64> bins(config.fft_size);
  std::vector<cf64> body(config.fft_size);
  for (unsigned symbol = 0; symbol < grid.n_symbols; ++symbol) {
    std::fill(bins.begin(), bins.end(), cf64{});
    bool any = false;
    for (unsigned k = 0; k < config.n_subcarriers; ++k) {
      if (allowed[k] && grid.occupied(symbol, k)) {
        bins[k] = grid.at(symbol, k);
        any = true;
      }
    }
    const unsigned cp = config.cp_length(symbol);
    if (!any) {
      out.samples.insert(out.samples.end(), cp + config.fft_size, cf64{});
      continue;
    }
    fft::inverse(bins, body);
    out.samples.insert(out.samples.end(), body.end() - cp, body.end());
    out.samples.insert(out.samples.end(), body.begin(), body.end());
  }
  return out;
}

std::vector<unsigned> rb_subcarrier_set(const system_config& config, unsigned rb) {
  if (rb >= config.n_rb) {
    throw argument_error("resource block " + std::to_string(rb) + " outside [0, " + std::to_string(config.n_rb) +
                         ")");
  }
  std::vector<unsigned> set(12);
  for (unsigned i = 0; i < 12; ++i) {
    set[i] = 12 * rb + i;
  }
  return set;
}

baseband_signal window(const baseband_signal& signal, std::int64_t start, std::size_t length) {
  baseband_signal out;
  out.start_offset = start;
  out.samples.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    out.samples[i] = signal.at(start + static_cast<std::int64_t>(i));
  }
  return out;
}

} // namespace toalab
