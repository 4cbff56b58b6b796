#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "toalab/prs.hpp"

namespace toalab {

/// R(m) for m in [0, window): the received stream correlated against a
/// reference replica, lags counted from `anchor`.
struct correlation_series {
  std::vector<cf64> values;
  std::int64_t anchor = 0;
  std::size_t window = 0; ///< M
  std::size_t span = 0;   ///< N_t
};

/// R(m) = sum_{j=0}^{N_t-1} r(anchor + m + j) conj(s(j)).
/// Throws window_error when `received` does not cover every needed sample.
correlation_series cross_correlate(const baseband_signal& received, const baseband_signal& reference,
                                   std::int64_t anchor, std::size_t window, std::size_t span);

inline constexpr unsigned default_sync_guard = 4;

/// Window origin for the fine correlations: peak lag of a wide full-band
/// correlation minus `guard`, clamped to the start of that correlation.
std::int64_t coarse_sync(const correlation_series& wide, unsigned guard = default_sync_guard);

/// M x (1 + N_RB) x 2 amplitude/phase stack, row-major in (lag, column, plane).
/// Column 0 is the full band, column 1 + v is resource block v.
struct feature_map {
  std::size_t window = 0;
  std::size_t columns = 0;
  std::vector<float> planes;
  std::int64_t anchor = 0;
  double norm_scale = 1.0;

  std::size_t index(std::size_t m, std::size_t column, std::size_t plane) const {
    return (m * columns + column) * 2 + plane;
  }
  float amplitude(std::size_t m, std::size_t column) const { return planes[index(m, column, 0)]; }
  float phase(std::size_t m, std::size_t column) const { return planes[index(m, column, 1)]; }
};

/// Amplitudes are divided by the largest full-band magnitude; cells whose
/// magnitude is negligible against that scale get phase 0.
feature_map build_feature_map(const correlation_series& full, std::span<const correlation_series> rbs,
                              std::size_t window);

struct delay_grid {
  double min = 0.0;
  double max = 0.0;
  double step = 0.0;

  /// Grid points min, min + step, ... up to and including max (within a
  /// half-step rounding allowance).
  std::vector<double> points() const;
};

/// Correlation templates γ(mT_s - τ) for every grid delay τ, with τ measured
/// from the correlation anchor.
struct correlation_dictionary {
  delay_grid grid;
  std::vector<double> delays;
  std::vector<std::vector<cf64>> columns;
};

correlation_dictionary make_correlation_dictionary(const system_config& config, const baseband_signal& reference,
                                                   const delay_grid& grid, std::size_t window, std::size_t span);

} // namespace toalab
