#include "toalab/channel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <algorithm>

#include "toalab/errors.hpp"
#include "toalab/fft.hpp"

namespace toalab {

std::string to_string(channel_case c) {
  switch (c) {
  case channel_case::static_los:
    return "static";
  case channel_case::epa5:
    return "epa5";
  case channel_case::eva5:
    return "eva5";
  }
  return "unknown";
}

channel_case parse_channel_case(std::string_view name) {
  if (name == "static") {
    return channel_case::static_los;
  }
  if (name == "epa5") {
    return channel_case::epa5;
  }
  if (name == "eva5") {
    return channel_case::eva5;
  }
  throw argument_error("unknown channel case '" + std::string(name) + "'");
}

channel_profile profile(channel_case c) {
  channel_profile p;
  p.id = c;
  switch (c) {
  case channel_case::static_los:
    p.taps = {{0.0, 0.0}};
    p.doppler = 0.0;
    break;
  case channel_case::epa5:
    // Extended Pedestrian A
    p.taps = {{0e-9, 0.0},    {30e-9, -1.0},   {70e-9, -2.0},  {90e-9, -3.0},
              {110e-9, -8.0}, {190e-9, -17.2}, {410e-9, -20.8}};
    p.doppler = 5.0;
    break;
  case channel_case::eva5:
    // Extended Vehicular A
    p.taps = {{0e-9, 0.0},    {30e-9, -1.5},   {150e-9, -1.4},   {310e-9, -3.6},  {370e-9, -0.6},
              {710e-9, -9.1}, {1090e-9, -7.0}, {1730e-9, -12.0}, {2510e-9, -16.9}};
    p.doppler = 5.0;
    break;
  }
  return p;
}

channel_realization draw_realization(const channel_profile& profile, double toa_offset, std::mt19937_64& rng) {
  if (!(toa_offset >= 0.0)) {
    throw argument_error("TOA offset must be nonnegative");
  }
  channel_realization r;
  r.delays.reserve(profile.taps.size());
  r.gains.reserve(profile.taps.size());

  if (profile.id == channel_case::static_los) {
    r.delays.push_back(toa_offset + profile.taps.front().delay);
    r.gains.emplace_back(1.0, 0.0);
  } else {
    double total = 0.0;
    for (const auto& tap : profile.taps) {
      total += std::pow(10.0, tap.power_db / 10.0);
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    for (const auto& tap : profile.taps) {
      const double power = std::pow(10.0, tap.power_db / 10.0) / total;
      const double sigma = std::sqrt(power / 2.0);
      const double re = normal(rng);
      const double im = normal(rng);
      r.delays.push_back(toa_offset + tap.delay);
      r.gains.emplace_back(sigma * re, sigma * im);
    }
  }
  r.toa_true = *std::min_element(r.delays.begin(), r.delays.end());
  return r;
}

baseband_signal propagate(const baseband_signal& signal, const channel_realization& realization,
                          const system_config& config) {
  if (signal.samples.empty()) {
    throw argument_error("cannot propagate an empty signal");
  }
  if (realization.delays.empty() || realization.delays.size() != realization.gains.size()) {
    throw argument_error("channel realization needs matching delays and gains");
  }
  const double ts = config.sample_period;
  const double first = *std::min_element(realization.delays.begin(), realization.delays.end());
  const auto shift = static_cast<std::int64_t>(std::floor(first / ts));

  std::vector<double> residual(realization.delays.size());
  for (std::size_t l = 0; l < residual.size(); ++l) {
    residual[l] = realization.delays[l] - static_cast<double>(shift) * ts;
  }
  const double spread = *std::max_element(residual.begin(), residual.end());
  if (spread > config.min_cp_length() * ts) {
    throw delay_spread_error("residual delay spread exceeds the cyclic prefix");
  }

  const unsigned n = config.fft_size;
  std::vector<cf64> response(n);
  for (unsigned k = 0; k < n; ++k) {
    // Bin k carries subcarrier k at frequency kΔf (one-sided baseband model).
    const double freq = static_cast<double>(k) * config.subcarrier_spacing;
    cf64 h{};
    for (std::size_t l = 0; l < residual.size(); ++l) {
      h += realization.gains[l] * std::polar(1.0, -2.0 * std::numbers::pi * freq * residual[l]);
    }
    response[k] = h;
  }

  baseband_signal out;
  out.start_offset = signal.start_offset + shift;
  out.samples.resize(signal.samples.size());

  std::vector<cf64> body(n);
  std::vector<cf64> bins(n);
  std::size_t pos = 0;
  for (unsigned symbol = 0; pos < signal.samples.size(); ++symbol) {
    const unsigned cp = config.cp_length(symbol);
    if (pos + cp + n > signal.samples.size()) {
      throw argument_error("signal does not consist of whole OFDM symbols");
    }
    const auto first_sample = signal.samples.begin() + static_cast<std::ptrdiff_t>(pos + cp);
    std::copy(first_sample, first_sample + n, body.begin());
    fft::forward(body, bins);
    for (unsigned k = 0; k < n; ++k) {
      bins[k] *= response[k];
    }
    fft::inverse(bins, body);
    std::copy(body.end() - cp, body.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(pos));
    std::copy(body.begin(), body.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(pos + cp));
    pos += cp + n;
  }
  return out;
}

double mean_power(const baseband_signal& signal) {
  if (signal.samples.empty()) {
    return 0.0;
  }
  double total = 0.0;
  for (const auto& v : signal.samples) {
    total += std::norm(v);
  }
  return total / static_cast<double>(signal.samples.size());
}

baseband_signal add_awgn(baseband_signal signal, double snr_db, std::mt19937_64& rng,
                         std::optional<double> reference_power) {
  if (std::isinf(snr_db) && snr_db > 0) {
    return signal;
  }
  const double power = reference_power.value_or(mean_power(signal));
  const double variance = power / std::pow(10.0, snr_db / 10.0);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  for (auto& v : signal.samples) {
    const double re = normal(rng);
    const double im = normal(rng);
    v += cf64(re, im);
  }
  return signal;
}

} // namespace toalab
