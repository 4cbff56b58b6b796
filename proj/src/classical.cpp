#include "toalab/classical.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "toalab/errors.hpp"
#include "toalab/fft.hpp"

namespace toalab {

std::string to_string(toa_method method) {
  switch (method) {
  case toa_method::peak:
    return "peak";
  case toa_method::ls:
    return "ls";
  case toa_method::music:
    return "music";
  case toa_method::esprit:
    return "esprit";
  case toa_method::nn:
    return "nn";
  }
  return "unknown";
}

toa_estimate toa_peak(const correlation_series& series, double sample_period) {
  if (series.values.empty()) {
    throw argument_error("peak detection on an empty correlation series");
  }
  std::size_t best = 0;
  double best_mag = std::abs(series.values[0]);
  for (std::size_t m = 1; m < series.values.size(); ++m) {
    const double mag = std::abs(series.values[m]);
    if (mag > best_mag) {
      best_mag = mag;
      best = m;
    }
  }
  toa_estimate est;
  est.method = toa_method::peak;
  est.toa = static_cast<double>(series.anchor + static_cast<std::int64_t>(best)) * sample_period;
  est.path_delays = {static_cast<double>(best) * sample_period};
  return est;
}

toa_estimate toa_ls(const correlation_series& series, const correlation_dictionary& dict, unsigned n_paths,
                    double sample_period) {
  if (n_paths < 1 || n_paths > 3) {
    throw argument_error("least-squares search supports 1 to 3 paths");
  }
  const std::size_t m_len = series.values.size();
  if (dict.columns.empty() || dict.columns.front().size() != m_len) {
    throw shape_error("dictionary templates do not match the correlation window");
  }

  std::vector<cf64> remaining = series.values;
  std::vector<std::size_t> picked;
  for (unsigned l = 0; l < n_paths; ++l) {
    std::size_t best = dict.columns.size();
    double best_residual = std::numeric_limits<double>::infinity();
    cf64 best_gain{};
    for (std::size_t i = 0; i < dict.columns.size(); ++i) {
      if (std::find(picked.begin(), picked.end(), i) != picked.end()) {
        continue;
      }
      const auto& g = dict.columns[i];
      double energy = 0.0;
      cf64 inner{};
      for (std::size_t m = 0; m < m_len; ++m) {
        energy += std::norm(g[m]);
        inner += std::conj(g[m]) * remaining[m];
      }
      if (!(energy > 0.0)) {
        continue;
      }
      const cf64 gain = inner / energy;
      double residual = 0.0;
      for (std::size_t m = 0; m < m_len; ++m) {
        residual += std::norm(remaining[m] - gain * g[m]);
      }
      if (residual < best_residual) {
        best_residual = residual;
        best = i;
        best_gain = gain;
      }
    }
    if (best == dict.columns.size()) {
      throw degenerate_fit_error("no usable template left in the dictionary");
    }
    picked.push_back(best);
    for (std::size_t m = 0; m < m_len; ++m) {
      remaining[m] -= best_gain * dict.columns[best][m];
    }
  }

  Eigen::MatrixXcd a(static_cast<Eigen::Index>(m_len), static_cast<Eigen::Index>(picked.size()));
  Eigen::VectorXcd r(static_cast<Eigen::Index>(m_len));
  for (std::size_t m = 0; m < m_len; ++m) {
    r(static_cast<Eigen::Index>(m)) = series.values[m];
    for (std::size_t l = 0; l < picked.size(); ++l) {
      a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l)) = dict.columns[picked[l]][m];
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
  if (qr.rank() < static_cast<Eigen::Index>(picked.size())) {
    throw degenerate_fit_error("template matrix of the picked delays is singular");
  }
  const Eigen::VectorXcd gains = qr.solve(r);

  toa_estimate est;
  est.method = toa_method::ls;
  est.residual = (r - a * gains).squaredNorm();
  for (std::size_t idx : picked) {
    est.path_delays.push_back(dict.delays[idx]);
  }
  const double earliest = *std::min_element(est.path_delays.begin(), est.path_delays.end());
  est.toa = static_cast<double>(series.anchor) * sample_period + earliest;
  return est;
}

std::size_t cfr::valid_count() const {
  return static_cast<std::size_t>(std::count_if(valid.begin(), valid.end(), [](std::uint8_t v) { return v != 0; }));
}

cfr estimate_cfr(const baseband_signal& received, const prs_grid& grid, const system_config& config,
                 std::int64_t anchor) {
  const unsigned k_count = config.n_subcarriers;
  const unsigned n = config.fft_size;
  std::vector<cf64> sum(k_count);
  std::vector<unsigned> hits(k_count, 0);
  std::vector<cf64> body(n);
  std::vector<cf64> bins(n);

  for (unsigned symbol = 0; symbol < grid.n_symbols; ++symbol) {
    bool any = false;
    for (unsigned k = 0; k < k_count && !any; ++k) {
      any = grid.occupied(symbol, k);
    }
    if (!any) {
      continue;
    }
    const std::int64_t start =
        anchor + static_cast<std::int64_t>(config.symbol_start(symbol) + config.cp_length(symbol));
    for (unsigned i = 0; i < n; ++i) {
      body[i] = received.at(start + static_cast<std::int64_t>(i));
    }
    fft::forward(body, bins);
    for (unsigned k = 0; k < k_count; ++k) {
      if (grid.occupied(symbol, k)) {
        sum[k] += bins[k] / grid.at(symbol, k);
        ++hits[k];
      }
    }
  }

  cfr out;
  out.anchor = anchor;
  out.subcarrier_spacing = config.subcarrier_spacing;
  out.sample_period = config.sample_period;
  out.response.resize(k_count);
  out.valid.resize(k_count, 0);
  for (unsigned k = 0; k < k_count; ++k) {
    if (hits[k] > 0) {
      out.response[k] = sum[k] / static_cast<double>(hits[k]);
      out.valid[k] = 1;
    }
  }
  if (2 * out.valid_count() < k_count) {
    throw coverage_error("PRS covers " + std::to_string(out.valid_count()) + " of " + std::to_string(k_count) +
                         " subcarriers");
  }
  return out;
}

cfr fill_cfr_gaps(cfr in) {
  const std::size_t n = in.response.size();
  std::vector<std::size_t> known;
  for (std::size_t k = 0; k < n; ++k) {
    if (in.valid[k] != 0) {
      known.push_back(k);
    }
  }
  if (known.empty()) {
    throw coverage_error("no valid subcarrier to interpolate from");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (in.valid[k] != 0) {
      continue;
    }
    const auto hi = std::lower_bound(known.begin(), known.end(), k);
    if (hi == known.begin()) {
      in.response[k] = in.response[*hi];
    } else if (hi == known.end()) {
      in.response[k] = in.response[known.back()];
    } else {
      const std::size_t k1 = *hi;
      const std::size_t k0 = *(hi - 1);
      const double w = static_cast<double>(k - k0) / static_cast<double>(k1 - k0);
      in.response[k] = (1.0 - w) * in.response[k0] + w * in.response[k1];
    }
    in.valid[k] = 1;
  }
  return in;
}

namespace {

// Forward-backward spatially smoothed covariance of length-P subvectors,
// eigen-decomposed (eigenvalues ascending).
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> smoothed_eigen(const cfr& h, const subspace_params& params) {
  const std::size_t k_count = h.response.size();
  const std::size_t p = params.subarray;
  if (p == 0 || p >= k_count) {
    throw argument_error("subarray length must lie in [1, K)");
  }
  if (params.n_paths == 0 || params.n_paths >= p) {
    throw argument_error("number of paths must lie in [1, P)");
  }
  const auto pi = static_cast<Eigen::Index>(p);
  const std::size_t count = k_count - p + 1;
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(pi, pi);
  for (std::size_t s = 0; s < count; ++s) {
    Eigen::Map<const Eigen::VectorXcd> x(h.response.data() + s, pi);
    cov.noalias() += x * x.adjoint();
  }
  cov /= static_cast<double>(count);
  const Eigen::MatrixXcd flipped = cov.conjugate().reverse();
  const Eigen::MatrixXcd smoothed = 0.5 * (cov + flipped);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(smoothed);
  if (solver.info() != Eigen::Success) {
    throw numeric_error("eigendecomposition of the smoothed covariance failed");
  }
  return solver;
}

cfr complete(const cfr& h) {
  if (h.valid_count() == h.response.size()) {
    return h;
  }
  return fill_cfr_gaps(h);
}

} // namespace

toa_estimate toa_music(const cfr& h_in, const subspace_params& params, const delay_grid& grid) {
  const cfr h = complete(h_in);
  const auto solver = smoothed_eigen(h, params);
  const auto p = static_cast<Eigen::Index>(params.subarray);
  const Eigen::Index noise_dim = p - static_cast<Eigen::Index>(params.n_paths);
  const Eigen::MatrixXcd noise = solver.eigenvectors().leftCols(noise_dim);

  const std::vector<double> taus = grid.points();
  std::vector<double> spectrum(taus.size());
  Eigen::VectorXcd steering(p);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    for (Eigen::Index k = 0; k < p; ++k) {
      steering(k) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) * h.subcarrier_spacing * taus[i]);
    }
    const double proj = (noise.adjoint() * steering).squaredNorm();
    spectrum[i] = 1.0 / std::max(proj, 1e-300);
  }

  std::vector<std::size_t> peaks;
  // Interior local maxima only; a spectrum still rising at a grid edge is not a peak.
  for (std::size_t i = 1; i + 1 < spectrum.size(); ++i) {
    if (spectrum[i] >= spectrum[i - 1] && spectrum[i] > spectrum[i + 1]) {
      peaks.push_back(i);
    }
  }
  if (peaks.empty()) {
    peaks.push_back(static_cast<std::size_t>(std::max_element(spectrum.begin(), spectrum.end()) - spectrum.begin()));
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return spectrum[a] > spectrum[b]; });
  if (peaks.size() > params.n_paths) {
    peaks.resize(params.n_paths);
  }

  toa_estimate est;
  est.method = toa_method::music;
  for (std::size_t i : peaks) {
    est.path_delays.push_back(taus[i]);
  }
  const double earliest = *std::min_element(est.path_delays.begin(), est.path_delays.end());
  est.toa = static_cast<double>(h.anchor) * h.sample_period + earliest;
  est.spectrum = std::move(spectrum);
  return est;
}

toa_estimate toa_esprit(const cfr& h_in, const subspace_params& params, double wrap_min) {
  const cfr h = complete(h_in);
  const auto solver = smoothed_eigen(h, params);
  const auto p = static_cast<Eigen::Index>(params.subarray);
  const auto l = static_cast<Eigen::Index>(params.n_paths);
  const Eigen::MatrixXcd signal = solver.eigenvectors().rightCols(l);
  const Eigen::MatrixXcd upper = signal.topRows(p - 1);
  const Eigen::MatrixXcd lower = signal.bottomRows(p - 1);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(upper);
  if (qr.rank() < l) {
    throw numeric_error("signal subspace is rank deficient");
  }
  const Eigen::MatrixXcd phi = qr.solve(lower);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(phi);
  if (eig.info() != Eigen::Success) {
    throw numeric_error("eigendecomposition of the rotation operator failed");
  }

  const double period = 1.0 / h.subcarrier_spacing;
  toa_estimate est;
  est.method = toa_method::esprit;
  for (Eigen::Index i = 0; i < l; ++i) {
    double tau = -std::arg(eig.eigenvalues()(i)) / (2.0 * std::numbers::pi * h.subcarrier_spacing);
    tau = wrap_min + std::fmod(std::fmod(tau - wrap_min, period) + period, period);
    if (!std::isfinite(tau)) {
      throw numeric_error("non-finite ESPRIT delay");
    }
    est.path_delays.push_back(tau);
  }
  std::sort(est.path_delays.begin(), est.path_delays.end());
  est.toa = static_cast<double>(h.anchor) * h.sample_period + est.path_delays.front();
  return est;
}

} // namespace toalab
