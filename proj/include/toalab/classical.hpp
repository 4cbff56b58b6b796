#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toalab/correlator.hpp"
#include "toalab/prs.hpp"

namespace toalab {

enum class toa_method { peak, ls, music, esprit, nn };

std::string to_string(toa_method method);

struct toa_estimate {
  double toa = 0.0; ///< seconds, absolute (anchor offset included)
  toa_method method = toa_method::peak;
  std::vector<double> path_delays;        ///< estimated delays relative to the anchor, if the method yields them
  std::optional<std::vector<double>> spectrum; ///< MUSIC pseudo-spectrum on its grid
  std::optional<double> residual;              ///< least-squares residual energy
};

/// Grid-quantized TOA from the largest correlation magnitude. Ties go to the
/// smaller lag.
toa_estimate toa_peak(const correlation_series& series, double sample_period);

/// Greedy least-squares multipath fit of R against the dictionary templates:
/// L single-path picks with closed-form gains, each followed by subtraction,
/// then a joint gain refit. The TOA is the earliest picked delay.
toa_estimate toa_ls(const correlation_series& series, const correlation_dictionary& dict, unsigned n_paths,
                    double sample_period);

/// Per-subcarrier channel frequency response with a validity mask. Phases
/// refer to the anchor: H(k) = sum_l h_l e^{-j2πkΔf(τ_l - anchor T_s)}.
struct cfr {
  std::vector<cf64> response;
  std::vector<std::uint8_t> valid;
  std::int64_t anchor = 0;
  double subcarrier_spacing = 15e3;
  double sample_period = 1.0 / 1.92e6;

  std::size_t valid_count() const;
};

/// Least-squares CFR from every PRS-occupied resource element, averaged per
/// subcarrier. FFT windows start right after each symbol's CP, measured from
/// `anchor`.
cfr estimate_cfr(const baseband_signal& received, const prs_grid& grid, const system_config& config,
                 std::int64_t anchor);

/// Fills invalid subcarriers by linear interpolation between the nearest valid
/// neighbours (nearest-value hold at the edges).
cfr fill_cfr_gaps(cfr in);

struct subspace_params {
  unsigned subarray = 36; ///< P
  unsigned n_paths = 1;   ///< L
};

/// Pseudo-spectrum on `grid` (relative to the anchor). The TOA is the earliest
/// of the L highest interior local maxima; if there are none, the global maximum.
toa_estimate toa_music(const cfr& h, const subspace_params& params, const delay_grid& grid);

/// Gridless rotational-invariance estimate. Delays are unwrapped into
/// [wrap_min, wrap_min + 1/Δf).
toa_estimate toa_esprit(const cfr& h, const subspace_params& params, double wrap_min);

} // namespace toalab
