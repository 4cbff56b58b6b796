#include "toalab/neural.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <string>

#include "toalab/errors.hpp"
#include "toalab/parallel.hpp"

namespace toalab::nn {

template <typename T>
std::vector<std::span<T>> fitting_head<T>::tensors() {
  return {fc1.weight, fc1.bias, fc2.weight, fc2.bias, fc3.weight, fc3.bias};
}

template <typename T>
std::vector<std::span<const T>> fitting_head<T>::tensors() const {
  return {fc1.weight, fc1.bias, fc2.weight, fc2.bias, fc3.weight, fc3.bias};
}

template <typename T>
std::vector<std::span<T>> network_params<T>::tensors() {
  std::vector<std::span<T>> out{conv1.weight, conv1.bias, conv2.weight, conv2.bias};
  for (auto& h : heads) {
    for (auto t : h.tensors()) {
      out.push_back(t);
    }
  }
  return out;
}

template <typename T>
std::vector<std::span<const T>> network_params<T>::tensors() const {
  std::vector<std::span<const T>> out{conv1.weight, conv1.bias, conv2.weight, conv2.bias};
  for (const auto& h : heads) {
    for (auto t : h.tensors()) {
      out.push_back(t);
    }
  }
  return out;
}

namespace {

template <typename T>
conv2d<T> make_conv(std::size_t in_h, std::size_t in_w, std::size_t stride_h, std::size_t stride_w) {
  conv2d<T> c;
  c.in_channels = conv_channels;
  c.out_channels = conv_channels;
  c.kernel_h = 3;
  c.kernel_w = 2;
  c.stride_h = stride_h;
  c.stride_w = stride_w;
  c.pad_h = 1;
  c.pad_w = 0;
  c.in_h = in_h;
  c.in_w = in_w;
  c.out_h = (in_h + 2 * c.pad_h - c.kernel_h) / stride_h + 1;
  c.out_w = (in_w + 2 * c.pad_w - c.kernel_w) / stride_w + 1;
  c.weight.assign(c.out_channels * c.in_channels * c.kernel_h * c.kernel_w, T(0));
  c.bias.assign(c.out_channels, T(0));
  return c;
}

template <typename T>
dense<T> make_dense(std::size_t in, std::size_t out) {
  dense<T> d;
  d.in = in;
  d.out = out;
  d.weight.assign(in * out, T(0));
  d.bias.assign(out, T(0));
  return d;
}

template <typename T>
void conv_forward(const conv2d<T>& c, std::span<const T> in, std::span<T> out) {
  for (std::size_t oh = 0; oh < c.out_h; ++oh) {
    for (std::size_t ow = 0; ow < c.out_w; ++ow) {
      for (std::size_t oc = 0; oc < c.out_channels; ++oc) {
        T acc = c.bias[oc];
        for (std::size_t kh = 0; kh < c.kernel_h; ++kh) {
          const auto ih = static_cast<std::ptrdiff_t>(oh * c.stride_h + kh) - static_cast<std::ptrdiff_t>(c.pad_h);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(c.in_h)) {
            continue;
          }
          for (std::size_t kw = 0; kw < c.kernel_w; ++kw) {
            const auto iw = static_cast<std::ptrdiff_t>(ow * c.stride_w + kw) - static_cast<std::ptrdiff_t>(c.pad_w);
            if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(c.in_w)) {
              continue;
            }
            const std::size_t in_base = (static_cast<std::size_t>(ih) * c.in_w + static_cast<std::size_t>(iw)) *
                                        c.in_channels;
            for (std::size_t ic = 0; ic < c.in_channels; ++ic) {
              acc += c.weight[((oc * c.in_channels + ic) * c.kernel_h + kh) * c.kernel_w + kw] * in[in_base + ic];
            }
          }
        }
        out[(oh * c.out_w + ow) * c.out_channels + oc] = acc;
      }
    }
  }
}

// Accumulates weight/bias gradients into `g`; writes the input gradient to
// `grad_in` when it is nonempty.
template <typename T>
void conv_backward(const conv2d<T>& c, std::span<const T> in, std::span<const T> grad_out, conv2d<T>& g,
                   std::span<T> grad_in) {
  if (!grad_in.empty()) {
    std::fill(grad_in.begin(), grad_in.end(), T(0));
  }
  for (std::size_t oh = 0; oh < c.out_h; ++oh) {
    for (std::size_t ow = 0; ow < c.out_w; ++ow) {
      for (std::size_t oc = 0; oc < c.out_channels; ++oc) {
        const T go = grad_out[(oh * c.out_w + ow) * c.out_channels + oc];
        if (go == T(0)) {
          continue;
        }
        g.bias[oc] += go;
        for (std::size_t kh = 0; kh < c.kernel_h; ++kh) {
          const auto ih = static_cast<std::ptrdiff_t>(oh * c.stride_h + kh) - static_cast<std::ptrdiff_t>(c.pad_h);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(c.in_h)) {
            continue;
          }
          for (std::size_t kw = 0; kw < c.kernel_w; ++kw) {
            const auto iw = static_cast<std::ptrdiff_t>(ow * c.stride_w + kw) - static_cast<std::ptrdiff_t>(c.pad_w);
            if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(c.in_w)) {
              continue;
            }
            const std::size_t in_base = (static_cast<std::size_t>(ih) * c.in_w + static_cast<std::size_t>(iw)) *
                                        c.in_channels;
            for (std::size_t ic = 0; ic < c.in_channels; ++ic) {
              const std::size_t wi = ((oc * c.in_channels + ic) * c.kernel_h + kh) * c.kernel_w + kw;
              g.weight[wi] += go * in[in_base + ic];
              if (!grad_in.empty()) {
                grad_in[in_base + ic] += go * c.weight[wi];
              }
            }
          }
        }
      }
    }
  }
}

template <typename T>
void dense_forward(const dense<T>& d, std::span<const T> in, std::span<T> out) {
  for (std::size_t o = 0; o < d.out; ++o) {
    T acc = d.bias[o];
    const T* w = d.weight.data() + o * d.in;
    for (std::size_t i = 0; i < d.in; ++i) {
      acc += w[i] * in[i];
    }
    out[o] = acc;
  }
}

template <typename T>
void dense_backward(const dense<T>& d, std::span<const T> in, std::span<const T> grad_out, dense<T>& g,
                    std::span<T> grad_in) {
  if (!grad_in.empty()) {
    std::fill(grad_in.begin(), grad_in.end(), T(0));
  }
  for (std::size_t o = 0; o < d.out; ++o) {
    const T go = grad_out[o];
    if (go == T(0)) {
      continue;
    }
    g.bias[o] += go;
    T* gw = g.weight.data() + o * d.in;
    const T* w = d.weight.data() + o * d.in;
    for (std::size_t i = 0; i < d.in; ++i) {
      gw[i] += go * in[i];
      if (!grad_in.empty()) {
        grad_in[i] += go * w[i];
      }
    }
  }
}

template <typename T>
void relu(std::span<T> x) {
  for (auto& v : x) {
    v = v > T(0) ? v : T(0);
  }
}

// Zeroes gradient entries whose forward activation was clipped by ReLU.
template <typename T>
void relu_mask(std::span<T> grad, std::span<const T> activation) {
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!(activation[i] > T(0))) {
      grad[i] = T(0);
    }
  }
}

template <typename T>
struct head_trace {
  std::vector<T> h1;
  std::vector<T> h2;
  T y = 0;
};

template <typename T>
head_trace<T> head_forward(const fitting_head<T>& head, std::span<const T> features) {
  head_trace<T> t;
  t.h1.resize(head.fc1.out);
  t.h2.resize(head.fc2.out);
  dense_forward(head.fc1, features, std::span<T>(t.h1));
  relu(std::span<T>(t.h1));
  dense_forward(head.fc2, std::span<const T>(t.h1), std::span<T>(t.h2));
  relu(std::span<T>(t.h2));
  T y = 0;
  dense_forward(head.fc3, std::span<const T>(t.h2), std::span<T>(&y, 1));
  t.y = y;
  return t;
}

// Backpropagates dy through one head; returns d(loss)/d(features) when
// `want_input_grad`.
template <typename T>
std::vector<T> head_backward(const fitting_head<T>& head, std::span<const T> features, const head_trace<T>& t, T dy,
                             fitting_head<T>& g, bool want_input_grad) {
  std::vector<T> dh2(head.fc2.out);
  dense_backward(head.fc3, std::span<const T>(t.h2), std::span<const T>(&dy, 1), g.fc3, std::span<T>(dh2));
  relu_mask(std::span<T>(dh2), std::span<const T>(t.h2));
  std::vector<T> dh1(head.fc1.out);
  dense_backward(head.fc2, std::span<const T>(t.h1), std::span<const T>(dh2), g.fc2, std::span<T>(dh1));
  relu_mask(std::span<T>(dh1), std::span<const T>(t.h1));
  std::vector<T> dfeat(want_input_grad ? head.fc1.in : 0);
  dense_backward(head.fc1, features, std::span<const T>(dh1), g.fc1, std::span<T>(dfeat));
  return dfeat;
}

template <typename T>
void add_into(std::vector<std::span<T>> dst, const std::vector<std::span<const T>>& src) {
  for (std::size_t t = 0; t < dst.size(); ++t) {
    for (std::size_t i = 0; i < dst[t].size(); ++i) {
      dst[t][i] += src[t][i];
    }
  }
}

// Fixed reduction granularity: chunk boundaries depend only on the batch size.
constexpr std::size_t reduction_chunk = 16;

template <typename T>
fitting_head<T> zero_like(const fitting_head<T>& h) {
  return {make_dense<T>(h.fc1.in, h.fc1.out), make_dense<T>(h.fc2.in, h.fc2.out),
          make_dense<T>(h.fc3.in, h.fc3.out)};
}

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    hash ^= p[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

constexpr std::uint64_t fnv_offset = 14695981039346656037ULL;

} // namespace

template <typename T>
network_params<T> zero_network(std::size_t window, std::size_t n_rb) {
  if (window == 0 || window % 4 != 0) {
    throw shape_error("correlation window must be a positive multiple of 4, got " + std::to_string(window));
  }
  if (n_rb == 0 || n_rb % 2 != 0) {
    throw shape_error("number of resource blocks must be positive and even, got " + std::to_string(n_rb));
  }
  network_params<T> p;
  p.window = window;
  p.n_rb = n_rb;
  p.conv1 = make_conv<T>(window, 1 + n_rb, 2, 1);
  p.conv2 = make_conv<T>(p.conv1.out_h, p.conv1.out_w, 2, 2);
  if (p.conv1.out_h != window / 2 || p.conv1.out_w != n_rb || p.conv2.out_h != window / 4 ||
      p.conv2.out_w != n_rb / 2) {
    throw shape_error("convolution schedule does not reach the expected output dimensions");
  }
  const std::size_t features = p.conv2.out_size();
  for (auto& h : p.heads) {
    h.fc1 = make_dense<T>(features, head_width_1);
    h.fc2 = make_dense<T>(head_width_1, head_width_2);
    h.fc3 = make_dense<T>(head_width_2, 1);
  }
  return p;
}

template <typename T>
network_params<T> init_network(std::size_t window, std::size_t n_rb, std::uint64_t seed) {
  auto p = zero_network<T>(window, n_rb);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto he = [&](std::vector<T>& w, std::size_t fan_in) {
    const double sigma = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& v : w) {
      v = static_cast<T>(sigma * normal(rng));
    }
  };
  he(p.conv1.weight, p.conv1.in_channels * p.conv1.kernel_h * p.conv1.kernel_w);
  he(p.conv2.weight, p.conv2.in_channels * p.conv2.kernel_h * p.conv2.kernel_w);
  for (auto& h : p.heads) {
    he(h.fc1.weight, h.fc1.in);
    he(h.fc2.weight, h.fc2.in);
    he(h.fc3.weight, h.fc3.in);
  }
  return p;
}

template <typename T>
std::vector<T> extract(const network_params<T>& params, std::span<const T> input) {
  if (input.size() != params.input_size()) {
    throw shape_error("feature map has " + std::to_string(input.size()) + " values, network expects " +
                      std::to_string(params.input_size()));
  }
  std::vector<T> a1(params.conv1.out_size());
  conv_forward(params.conv1, input, std::span<T>(a1));
  relu(std::span<T>(a1));
  std::vector<T> a2(params.conv2.out_size());
  conv_forward(params.conv2, std::span<const T>(a1), std::span<T>(a2));
  relu(std::span<T>(a2));
  return a2;
}

template <typename T>
std::vector<T> extract(const network_params<T>& params, const feature_map& map) {
  if (map.window != params.window || map.columns != 1 + params.n_rb) {
    throw shape_error("feature map shape does not match the network");
  }
  std::vector<T> input(map.planes.begin(), map.planes.end());
  return extract(params, std::span<const T>(input));
}

template <typename T>
T fit_head(const network_params<T>& params, channel_case which, std::span<const T> features) {
  const auto& head = params.head(which);
  if (features.size() != head.fc1.in) {
    throw shape_error("feature vector length does not match the fitting head");
  }
  return head_forward(head, features).y;
}

template <typename T>
T predict(const network_params<T>& params, channel_case which, std::span<const T> input) {
  const auto features = extract(params, input);
  return fit_head(params, which, std::span<const T>(features));
}

template <typename T>
loss_and_gradient<T> loss_and_grad(const network_params<T>& params, std::span<const example<T>> batch) {
  if (batch.empty()) {
    throw argument_error("loss over an empty batch");
  }
  const std::size_t n = batch.size();
  const std::size_t chunks = (n + reduction_chunk - 1) / reduction_chunk;
  const T scale = T(2) / static_cast<T>(n);
  std::vector<network_params<T>> partial(chunks);
  std::vector<T> partial_loss(chunks, T(0));

  parallel_for(chunks, [&](std::size_t c) {
    auto g = zero_network<T>(params.window, params.n_rb);
    T loss = 0;
    std::vector<T> a1(params.conv1.out_size());
    std::vector<T> a2(params.conv2.out_size());
    std::vector<T> da1(params.conv1.out_size());
    for (std::size_t i = c * reduction_chunk; i < std::min(n, (c + 1) * reduction_chunk); ++i) {
      const auto& s = batch[i];
      if (s.input.size() != params.input_size()) {
        throw shape_error("training input has the wrong size");
      }
      const std::span<const T> in(s.input);
      conv_forward(params.conv1, in, std::span<T>(a1));
      relu(std::span<T>(a1));
      conv_forward(params.conv2, std::span<const T>(a1), std::span<T>(a2));
      relu(std::span<T>(a2));
      const auto& head = params.head(s.which);
      const auto trace = head_forward(head, std::span<const T>(a2));
      const T err = trace.y - s.target;
      loss += err * err;
      auto da2 = head_backward(head, std::span<const T>(a2), trace, scale * err, g.head(s.which),
                               !params.frozen_extractor);
      if (params.frozen_extractor) {
        continue;
      }
      relu_mask(std::span<T>(da2), std::span<const T>(a2));
      conv_backward(params.conv2, std::span<const T>(a1), std::span<const T>(da2), g.conv2, std::span<T>(da1));
      relu_mask(std::span<T>(da1), std::span<const T>(a1));
      conv_backward(params.conv1, in, std::span<const T>(da1), g.conv1, std::span<T>());
    }
    partial[c] = std::move(g);
    partial_loss[c] = loss;
  });

  loss_and_gradient<T> out{T(0), zero_network<T>(params.window, params.n_rb)};
  out.grad.frozen_extractor = params.frozen_extractor;
  for (std::size_t c = 0; c < chunks; ++c) {
    out.loss += partial_loss[c];
    add_into(out.grad.tensors(), std::as_const(partial[c]).tensors());
  }
  out.loss /= static_cast<T>(n);
  return out;
}

template <typename T>
T mean_loss(const network_params<T>& params, std::span<const example<T>> samples) {
  if (samples.empty()) {
    throw argument_error("loss over an empty set");
  }
  std::vector<T> errors(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    const T err = predict(params, samples[i].which, std::span<const T>(samples[i].input)) - samples[i].target;
    errors[i] = err * err;
  });
  double total = 0.0;
  for (T e : errors) {
    total += static_cast<double>(e);
  }
  return static_cast<T>(total / static_cast<double>(samples.size()));
}

template <typename T>
head_loss_and_gradient<T> head_loss_and_grad(const fitting_head<T>& head, std::span<const head_example<T>> batch) {
  if (batch.empty()) {
    throw argument_error("loss over an empty batch");
  }
  const std::size_t n = batch.size();
  const std::size_t chunks = (n + reduction_chunk - 1) / reduction_chunk;
  const T scale = T(2) / static_cast<T>(n);
  std::vector<fitting_head<T>> partial(chunks);
  std::vector<T> partial_loss(chunks, T(0));
  parallel_for(chunks, [&](std::size_t c) {
    auto g = zero_like(head);
    T loss = 0;
    for (std::size_t i = c * reduction_chunk; i < std::min(n, (c + 1) * reduction_chunk); ++i) {
      const std::span<const T> f(batch[i].features);
      const auto trace = head_forward(head, f);
      const T err = trace.y - batch[i].target;
      loss += err * err;
      head_backward(head, f, trace, scale * err, g, false);
    }
    partial[c] = std::move(g);
    partial_loss[c] = loss;
  });
  head_loss_and_gradient<T> out{T(0), zero_like(head)};
  for (std::size_t c = 0; c < chunks; ++c) {
    out.loss += partial_loss[c];
    add_into(out.grad.tensors(), std::as_const(partial[c]).tensors());
  }
  out.loss /= static_cast<T>(n);
  return out;
}

template <typename T>
T head_mean_loss(const fitting_head<T>& head, std::span<const head_example<T>> samples) {
  if (samples.empty()) {
    throw argument_error("loss over an empty set");
  }
  double total = 0.0;
  for (const auto& s : samples) {
    const T err = head_forward(head, std::span<const T>(s.features)).y - s.target;
    total += static_cast<double>(err * err);
  }
  return static_cast<T>(total / static_cast<double>(samples.size()));
}

template <typename T>
adam_state<T> make_adam_state(const std::vector<std::span<T>>& params) {
  adam_state<T> s;
  for (const auto& p : params) {
    s.m.emplace_back(p.size(), T(0));
    s.v.emplace_back(p.size(), T(0));
  }
  return s;
}

namespace {

template <typename T>
void adam_update(std::span<T> p, std::span<const T> g, std::vector<T>& m, std::vector<T>& v, const adam_hyper& h,
                 double correction1, double correction2) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double gi = static_cast<double>(g[i]);
    const double mi = h.beta1 * static_cast<double>(m[i]) + (1.0 - h.beta1) * gi;
    const double vi = h.beta2 * static_cast<double>(v[i]) + (1.0 - h.beta2) * gi * gi;
    m[i] = static_cast<T>(mi);
    v[i] = static_cast<T>(vi);
    const double step = h.lr * (mi / correction1) / (std::sqrt(vi / correction2) + h.eps);
    p[i] = static_cast<T>(static_cast<double>(p[i]) - step);
  }
}

template <typename T>
void check_state(const std::vector<std::span<T>>& params, const std::vector<std::span<const T>>& grads,
                 const adam_state<T>& state) {
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw shape_error("optimizer state does not match the parameter list");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (grads[t].size() != params[t].size() || state.m[t].size() != params[t].size()) {
      throw shape_error("optimizer state does not match the parameter shapes");
    }
  }
}

} // namespace

template <typename T>
void adam_step(const std::vector<std::span<T>>& params, const std::vector<std::span<const T>>& grads,
               const adam_hyper& hyper, adam_state<T>& state) {
  check_state(params, grads, state);
  ++state.step;
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
  for (std::size_t t = 0; t < params.size(); ++t) {
    adam_update(params[t], grads[t], state.m[t], state.v[t], hyper, c1, c2);
  }
}

template <typename T>
void adam_step(network_params<T>& params, const network_params<T>& grads, const adam_hyper& hyper,
               adam_state<T>& state) {
  const auto p = params.tensors();
  const auto g = grads.tensors();
  check_state(p, g, state);
  ++state.step;
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
  const std::size_t first = params.frozen_extractor ? network_params<T>::extractor_tensor_count : 0;
  for (std::size_t t = first; t < p.size(); ++t) {
    adam_update(p[t], g[t], state.m[t], state.v[t], hyper, c1, c2);
  }
}

template <typename T>
std::uint64_t extractor_hash(const network_params<T>& params) {
  std::uint64_t h = fnv_offset;
  const auto tensors = params.tensors();
  for (std::size_t t = 0; t < network_params<T>::extractor_tensor_count; ++t) {
    h = fnv1a(h, tensors[t].data(), tensors[t].size_bytes());
  }
  return h;
}

template <typename T>
std::uint64_t head_hash(const fitting_head<T>& head) {
  std::uint64_t h = fnv_offset;
  for (const auto& t : head.tensors()) {
    h = fnv1a(h, t.data(), t.size_bytes());
  }
  return h;
}

template <typename To, typename From>
network_params<To> convert(const network_params<From>& params) {
  auto out = zero_network<To>(params.window, params.n_rb);
  out.frozen_extractor = params.frozen_extractor;
  const auto src = params.tensors();
  const auto dst = out.tensors();
  for (std::size_t t = 0; t < src.size(); ++t) {
    for (std::size_t i = 0; i < src[t].size(); ++i) {
      dst[t][i] = static_cast<To>(src[t][i]);
    }
  }
  return out;
}

#define TOALAB_INSTANTIATE(T)                                                                                         \
  template struct fitting_head<T>;                                                                                    \
  template struct network_params<T>;                                                                                 \
  template network_params<T> zero_network<T>(std::size_t, std::size_t);                                              \
  template network_params<T> init_network<T>(std::size_t, std::size_t, std::uint64_t);                               \
  template std::vector<T> extract<T>(const network_params<T>&, std::span<const T>);                                   \
  template std::vector<T> extract<T>(const network_params<T>&, const feature_map&);                                   \
  template T fit_head<T>(const network_params<T>&, channel_case, std::span<const T>);                                 \
  template T predict<T>(const network_params<T>&, channel_case, std::span<const T>);                                  \
  template loss_and_gradient<T> loss_and_grad<T>(const network_params<T>&, std::span<const example<T>>);              \
  template T mean_loss<T>(const network_params<T>&, std::span<const example<T>>);                                     \
  template head_loss_and_gradient<T> head_loss_and_grad<T>(const fitting_head<T>&,                                    \
                                                             std::span<const head_example<T>>);                       \
  template T head_mean_loss<T>(const fitting_head<T>&, std::span<const head_example<T>>);                             \
  template adam_state<T> make_adam_state<T>(const std::vector<std::span<T>>&);                                        \
  template void adam_step<T>(const std::vector<std::span<T>>&, const std::vector<std::span<const T>>&,                \
                             const adam_hyper&, adam_state<T>&);                                                      \
  template void adam_step<T>(network_params<T>&, const network_params<T>&, const adam_hyper&, adam_state<T>&);        \
  template std::uint64_t extractor_hash<T>(const network_params<T>&);                                                 \
  template std::uint64_t head_hash<T>(const fitting_head<T>&);

TOALAB_INSTANTIATE(float)
TOALAB_INSTANTIATE(double)
#undef TOALAB_INSTANTIATE

template network_params<double> convert<double, float>(const network_params<float>&);
template network_params<float> convert<float, double>(const network_params<double>&);
template network_params<float> convert<float, float>(const network_params<float>&);
template network_params<double> convert<double, double>(const network_params<double>&);

} // namespace toalab::nn
