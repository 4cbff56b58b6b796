#include "toalab/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "toalab/channel.hpp"
#include "toalab/errors.hpp"

namespace toalab {

namespace {

// sum_{j<span} x(offset + j) conj(ref[j]), with x read in absolute sample
// coordinates and zero outside its stored range. Zero reference samples (the
// symbols without PRS) are skipped.
cf64 lag_product(const baseband_signal& x, std::int64_t offset, std::span<const cf64> ref) {
  cf64 acc{};
  const std::int64_t base = offset - x.start_offset;
  const auto n = static_cast<std::int64_t>(x.samples.size());
  const std::int64_t j_lo = std::max<std::int64_t>(0, -base);
  const std::int64_t j_hi = std::min<std::int64_t>(static_cast<std::int64_t>(ref.size()), n - base);
  for (std::int64_t j = j_lo; j < j_hi; ++j) {
    const cf64 s = ref[static_cast<std::size_t>(j)];
    if (s.real() == 0.0 && s.imag() == 0.0) {
      continue;
    }
    acc += x.samples[static_cast<std::size_t>(base + j)] * std::conj(s);
  }
  return acc;
}

} // namespace

correlation_series cross_correlate(const baseband_signal& received, const baseband_signal& reference,
                                   std::int64_t anchor, std::size_t window, std::size_t span) {
  if (window == 0 || span == 0) {
    throw argument_error("correlation window and span must be positive");
  }
  if (span > reference.samples.size()) {
    throw window_error("search span exceeds the reference length");
  }
  const std::int64_t first = anchor;
  const std::int64_t last = anchor + static_cast<std::int64_t>(window + span) - 1;
  const std::int64_t have_first = received.start_offset;
  const std::int64_t have_last = received.start_offset + static_cast<std::int64_t>(received.samples.size()) - 1;
  if (first < have_first || last > have_last) {
    throw window_error("received samples [" + std::to_string(have_first) + ", " + std::to_string(have_last) +
                       "] do not cover [" + std::to_string(first) + ", " + std::to_string(last) + "]");
  }

  correlation_series out;
  out.anchor = anchor;
  out.window = window;
  out.span = span;
  out.values.resize(window);
  const std::span<const cf64> ref(reference.samples.data(), span);
  for (std::size_t m = 0; m < window; ++m) {
    out.values[m] = lag_product(received, anchor + static_cast<std::int64_t>(m), ref);
  }
  return out;
}

std::int64_t coarse_sync(const correlation_series& wide, unsigned guard) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t m = 0; m < wide.values.size(); ++m) {
    const double mag = std::abs(wide.values[m]);
    if (mag > best_mag) {
      best_mag = mag;
      best = m;
    }
  }
  const std::int64_t peak = wide.anchor + static_cast<std::int64_t>(best);
  return std::max<std::int64_t>(wide.anchor, peak - static_cast<std::int64_t>(guard));
}

feature_map build_feature_map(const correlation_series& full, std::span<const correlation_series> rbs,
                              std::size_t window) {
  if (full.values.size() != window) {
    throw shape_error("full-band series length differs from the window");
  }
  for (const auto& rb : rbs) {
    if (rb.values.size() != window || rb.anchor != full.anchor) {
      throw shape_error("resource-block series must share the full-band anchor and window");
    }
  }
  double scale = 0.0;
  for (const auto& v : full.values) {
    scale = std::max(scale, std::abs(v));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw degenerate_input_error("full-band correlation is identically zero or non-finite");
  }

  feature_map map;
  map.window = window;
  map.columns = 1 + rbs.size();
  map.anchor = full.anchor;
  map.norm_scale = scale;
  map.planes.resize(window * map.columns * 2);

  // Below this relative magnitude the phase is numerical noise.
  constexpr double phase_floor = 1e-12;
  auto fill = [&](const correlation_series& series, std::size_t column) {
    for (std::size_t m = 0; m < window; ++m) {
      const cf64 v = series.values[m];
      const double mag = std::abs(v);
      map.planes[map.index(m, column, 0)] = static_cast<float>(std::min(1.0, mag / scale));
      map.planes[map.index(m, column, 1)] = mag > phase_floor * scale ? static_cast<float>(std::arg(v)) : 0.0f;
    }
  };
  fill(full, 0);
  for (std::size_t v = 0; v < rbs.size(); ++v) {
    fill(rbs[v], v + 1);
  }
  return map;
}

std::vector<double> delay_grid::points() const {
  if (!(step > 0.0) || !(max >= min)) {
    throw argument_error("delay grid needs step > 0 and max >= min");
  }
  const auto n = static_cast<std::size_t>(std::floor((max - min) / step + 0.5)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = min + static_cast<double>(i) * step;
  }
  return out;
}

correlation_dictionary make_correlation_dictionary(const system_config& config, const baseband_signal& reference,
                                                   const delay_grid& grid, std::size_t window, std::size_t span) {
  correlation_dictionary dict;
  dict.grid = grid;
  dict.delays = grid.points();
  if (dict.delays.empty()) {
    throw argument_error("empty delay grid");
  }
  if (span > reference.samples.size()) {
    throw window_error("search span exceeds the reference length");
  }
  const double ts = config.sample_period;
  const std::span<const cf64> ref(reference.samples.data(), span);
  dict.columns.reserve(dict.delays.size());
  for (double tau : dict.delays) {
    // Split τ into whole samples q and a fraction f in [0, 1) samples; the
    // fraction is applied as a phase ramp, q as a lag offset.
    const double q = std::floor(tau / ts + 1e-9);
    const double f = std::max(0.0, tau / ts - q);
    channel_realization unit;
    unit.delays = {f * ts};
    unit.gains = {cf64(1.0, 0.0)};
    unit.toa_true = f * ts;
    baseband_signal delayed = propagate(reference, unit, config);
    delayed.start_offset += static_cast<std::int64_t>(q);

    std::vector<cf64> column(window);
    for (std::size_t m = 0; m < window; ++m) {
      column[m] = lag_product(delayed, static_cast<std::int64_t>(m), ref);
    }
    dict.columns.push_back(std::move(column));
  }
  return dict;
}

} // namespace toalab
