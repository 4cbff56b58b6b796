#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "toalab/prs.hpp"

namespace toalab {

/// Propagation environment: the statistic a fitting head is selected by.
enum class channel_case : std::uint8_t { static_los = 0, epa5 = 1, eva5 = 2 };

inline constexpr channel_case all_channel_cases[] = {channel_case::static_los, channel_case::epa5,
                                                     channel_case::eva5};
inline constexpr std::size_t n_channel_cases = 3;

std::string to_string(channel_case c);
/// Accepts "static", "epa5", "eva5".
channel_case parse_channel_case(std::string_view name);

struct channel_tap {
  double delay;    ///< excess delay, seconds
  double power_db; ///< mean power, dB
};

struct channel_profile {
  channel_case id = channel_case::static_los;
  std::vector<channel_tap> taps;
  double doppler = 0.0;
};

/// One draw of the multipath channel.
struct channel_realization {
  std::vector<double> delays; ///< absolute path delays, seconds
  std::vector<cf64> gains;
  double toa_true = 0.0; ///< min over path delays
  double snr_db = std::numeric_limits<double>::infinity();

  std::size_t n_paths() const { return delays.size(); }
};

/// Static single tap, or the EPA / EVA power-delay profiles with 5 Hz Doppler.
channel_profile profile(channel_case c);

/// Static: unit gain. Fading: independent CN(0, p_l) gains with sum p_l = 1.
/// Gains stay constant over one observation.
channel_realization draw_realization(const channel_profile& profile, double toa_offset, std::mt19937_64& rng);

/// Applies the channel per OFDM symbol in the frequency domain,
/// H(k) = sum_l h_l e^{-j2πkΔf δ_l}, where δ_l is each path delay minus the
/// integer-sample part of the first-path delay. That integer part moves
/// start_offset instead. `signal` must start on a symbol boundary and consist
/// of whole symbols.
baseband_signal propagate(const baseband_signal& signal, const channel_realization& realization,
                          const system_config& config);

/// Adds circular complex Gaussian noise with variance P / 10^(snr/10). P is
/// the mean sample power of `signal` unless `reference_power` is given. An
/// infinite SNR leaves the signal untouched.
baseband_signal add_awgn(baseband_signal signal, double snr_db, std::mt19937_64& rng,
                         std::optional<double> reference_power = std::nullopt);

double mean_power(const baseband_signal& signal);

} // namespace toalab
