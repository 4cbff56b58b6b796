#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "toalab/channel.hpp"
#include "toalab/correlator.hpp"

namespace toalab::nn {

/// 2-D convolution over an HWC tensor. Weights are laid out [out][in][kh][kw].
template <typename T>
struct conv2d {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;
  std::size_t stride_h = 1;
  std::size_t stride_w = 1;
  std::size_t pad_h = 0;
  std::size_t pad_w = 0;
  std::size_t in_h = 0;
  std::size_t in_w = 0;
  std::size_t out_h = 0;
  std::size_t out_w = 0;
  std::vector<T> weight;
  std::vector<T> bias;

  std::size_t in_size() const { return in_h * in_w * in_channels; }
  std::size_t out_size() const { return out_h * out_w * out_channels; }
};

/// Fully connected layer, weights [out][in].
template <typename T>
struct dense {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<T> weight;
  std::vector<T> bias;
};

/// Fitting head: features -> 32 -> 8 -> 1 (TOA in ns, relative to the anchor).
template <typename T>
struct fitting_head {
  dense<T> fc1;
  dense<T> fc2;
  dense<T> fc3;

  std::vector<std::span<T>> tensors();
  std::vector<std::span<const T>> tensors() const;
};

inline constexpr std::size_t head_width_1 = 32;
inline constexpr std::size_t head_width_2 = 8;
inline constexpr std::size_t conv_channels = 2;

/// Shared feature extractor (two ReLU convolutions) plus one fitting head per
/// channel case. The same struct doubles as the gradient container.
template <typename T>
struct network_params {
  std::size_t window = 0;
  std::size_t n_rb = 0;
  conv2d<T> conv1;
  conv2d<T> conv2;
  std::array<fitting_head<T>, n_channel_cases> heads;
  bool frozen_extractor = false;

  static constexpr std::size_t extractor_tensor_count = 4;

  std::size_t input_size() const { return window * (1 + n_rb) * 2; }
  std::size_t feature_size() const { return conv2.out_size(); }
  fitting_head<T>& head(channel_case c) { return heads[static_cast<std::size_t>(c)]; }
  const fitting_head<T>& head(channel_case c) const { return heads[static_cast<std::size_t>(c)]; }

  /// Every parameter tensor: conv1 w/b, conv2 w/b, then each head's
  /// fc1 w/b, fc2 w/b, fc3 w/b in case order.
  std::vector<std::span<T>> tensors();
  std::vector<std::span<const T>> tensors() const;
};

/// Network with all weights and biases zero, shaped for (window, n_rb).
/// Throws shape_error unless window % 4 == 0 and n_rb is even and positive.
template <typename T>
network_params<T> zero_network(std::size_t window, std::size_t n_rb);

/// He-normal weights, zero biases, deterministic per seed.
template <typename T>
network_params<T> init_network(std::size_t window, std::size_t n_rb, std::uint64_t seed);

template <typename T>
std::vector<T> extract(const network_params<T>& params, std::span<const T> input);

template <typename T>
std::vector<T> extract(const network_params<T>& params, const feature_map& map);

template <typename T>
T fit_head(const network_params<T>& params, channel_case which, std::span<const T> features);

template <typename T>
T predict(const network_params<T>& params, channel_case which, std::span<const T> input);

/// One training pair: feature planes and the TOA target in ns relative to the
/// window anchor.
template <typename T>
struct example {
  std::vector<T> input;
  T target = 0;
  channel_case which = channel_case::static_los;
};

/// Extracted features paired with a target, used for head-only training.
template <typename T>
struct head_example {
  std::vector<T> features;
  T target = 0;
  channel_case which = channel_case::static_los;
};

template <typename T>
struct loss_and_gradient {
  T loss = 0;
  network_params<T> grad;
};

template <typename T>
struct head_loss_and_gradient {
  T loss = 0;
  fitting_head<T> grad;
};

/// Mean squared error over the batch, each sample routed to its case head,
/// with reverse-mode gradients. Extractor gradients are exactly zero when the
/// extractor is frozen. Per-sample work is reduced in a fixed order, so the
/// result does not depend on the worker count.
template <typename T>
loss_and_gradient<T> loss_and_grad(const network_params<T>& params, std::span<const example<T>> batch);

template <typename T>
T mean_loss(const network_params<T>& params, std::span<const example<T>> samples);

template <typename T>
head_loss_and_gradient<T> head_loss_and_grad(const fitting_head<T>& head, std::span<const head_example<T>> batch);

template <typename T>
T head_mean_loss(const fitting_head<T>& head, std::span<const head_example<T>> samples);

struct adam_hyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct adam_state {
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;
  std::uint64_t step = 0;
};

template <typename T>
adam_state<T> make_adam_state(const std::vector<std::span<T>>& params);

/// Adam update of `params` in place.
template <typename T>
void adam_step(const std::vector<std::span<T>>& params, const std::vector<std::span<const T>>& grads,
               const adam_hyper& hyper, adam_state<T>& state);

/// Network-level Adam step; extractor tensors are skipped while frozen.
template <typename T>
void adam_step(network_params<T>& params, const network_params<T>& grads, const adam_hyper& hyper,
               adam_state<T>& state);

/// FNV-1a over the raw bytes of the extractor tensors.
template <typename T>
std::uint64_t extractor_hash(const network_params<T>& params);

template <typename T>
std::uint64_t head_hash(const fitting_head<T>& head);

/// Converts between precisions (used for the 64-bit check mode).
template <typename To, typename From>
network_params<To> convert(const network_params<From>& params);

} // namespace toalab::nn
