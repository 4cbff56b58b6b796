#include "toalab/training.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>

#include "toalab/errors.hpp"
#include "toalab/parallel.hpp"

namespace toalab::nn {

train_hyper stage1_defaults() {
  train_hyper h;
  h.lr = 1e-3;
  h.batch = 64;
  h.max_epochs = 200;
  h.patience = 20;
  return h;
}

train_hyper stage2_defaults() {
  train_hyper h;
  h.lr = 1e-4;
  h.batch = 64;
  h.max_epochs = 200;
  h.patience = 20;
  return h;
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(mix(seed ^ mix(epoch + 1)));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

void check_hyper(const train_hyper& hyper) {
  if (hyper.batch == 0 || !(hyper.lr > 0.0)) {
    throw argument_error("training needs a positive batch size and learning rate");
  }
}

} // namespace

stage_result train_stage1(std::span<const example<float>> train, std::span<const example<float>> validation,
                          std::size_t window, std::size_t n_rb, const train_hyper& hyper) {
  check_hyper(hyper);
  if (validation.empty()) {
    throw dataset_error("stage 1 needs a nonempty validation set");
  }
  std::array<double, n_channel_cases> target_sum{};
  std::array<std::size_t, n_channel_cases> count{};
  for (const auto& s : train) {
    const auto c = static_cast<std::size_t>(s.which);
    target_sum[c] += s.target;
    ++count[c];
  }
  for (auto c : all_channel_cases) {
    if (count[static_cast<std::size_t>(c)] == 0) {
      throw dataset_error("stage 1 training data has no samples of case " + to_string(c));
    }
  }

  auto params = init_network<float>(window, n_rb, hyper.seed);
  for (auto c : all_channel_cases) {
    const auto i = static_cast<std::size_t>(c);
    params.head(c).fc3.bias[0] = static_cast<float>(target_sum[i] / static_cast<double>(count[i]));
  }
  auto state = make_adam_state(params.tensors());
  const adam_hyper adam{hyper.lr};

  stage_result result;
  result.history.initial_validation_loss = mean_loss(params, validation);
  result.history.best_validation_loss = result.history.initial_validation_loss;
  result.params = params;
  std::size_t since_best = 0;

  std::vector<example<float>> batch;
  for (std::size_t epoch = 0; epoch < hyper.max_epochs; ++epoch) {
    const auto order = epoch_order(train.size(), hyper.seed, epoch);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch) {
      const std::size_t end = std::min(order.size(), start + hyper.batch);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(train[order[i]]);
      }
      const auto lg = loss_and_grad(params, std::span<const example<float>>(batch));
      epoch_loss += static_cast<double>(lg.loss) * static_cast<double>(end - start);
      adam_step(params, lg.grad, adam, state);
    }
    const double val = mean_loss(params, validation);
    result.history.train_loss.push_back(epoch_loss / static_cast<double>(train.size()));
    result.history.validation_loss.push_back(val);
    if (val < result.history.best_validation_loss) {
      result.history.best_validation_loss = val;
      result.history.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= hyper.patience) {
      break;
    }
  }
  result.params.frozen_extractor = false;
  return result;
}

std::optional<std::vector<float>> perturb_planes(std::span<const float> planes, std::size_t window,
                                                 std::size_t columns, double alpha, std::mt19937_64& rng) {
  if (planes.size() != window * columns * 2) {
    throw shape_error("feature planes do not match the window and column count");
  }
  auto idx = [columns](std::size_t m, std::size_t c, std::size_t p) { return (m * columns + c) * 2 + p; };
  std::vector<std::complex<double>> z(window * columns);
  for (std::size_t c = 0; c < columns; ++c) {
    double power = 0.0;
    for (std::size_t m = 0; m < window; ++m) {
      const auto v = std::polar<double>(planes[idx(m, c, 0)], planes[idx(m, c, 1)]);
      z[m * columns + c] = v;
      power += std::norm(v);
    }
    const double sigma = alpha * std::sqrt(power / static_cast<double>(window));
    if (sigma > 0.0) {
      std::normal_distribution<double> normal(0.0, sigma);
      for (std::size_t m = 0; m < window; ++m) {
        const double re = normal(rng);
        const double im = normal(rng);
        z[m * columns + c] += std::complex<double>(re, im);
      }
    }
  }
  double scale = 0.0;
  for (std::size_t m = 0; m < window; ++m) {
    scale = std::max(scale, std::abs(z[m * columns]));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    return std::nullopt;
  }
  std::vector<float> out(planes.size());
  for (std::size_t m = 0; m < window; ++m) {
    for (std::size_t c = 0; c < columns; ++c) {
      const auto v = z[m * columns + c];
      const double mag = std::abs(v);
      if (!std::isfinite(mag)) {
        return std::nullopt;
      }
      out[idx(m, c, 0)] = static_cast<float>(std::min(1.0, mag / scale));
      out[idx(m, c, 1)] = mag > 1e-12 * scale ? static_cast<float>(std::arg(v)) : 0.0f;
    }
  }
  return out;
}

std::vector<head_example<float>> augment(std::span<const example<float>> samples,
                                         const network_params<float>& frozen, double alpha, std::size_t factor,
                                         std::mt19937_64& rng) {
  if (!frozen.frozen_extractor) {
    throw argument_error("augmentation requires a frozen extractor");
  }
  if (!(alpha >= 0.0) || factor == 0) {
    throw argument_error("augmentation needs alpha >= 0 and factor >= 1");
  }
  const std::size_t columns = 1 + frozen.n_rb;
  std::vector<example<float>> perturbed;
  perturbed.reserve(samples.size() * factor);
  for (const auto& s : samples) {
    for (std::size_t r = 0; r < factor; ++r) {
      auto planes = perturb_planes(s.input, frozen.window, columns, alpha, rng);
      if (planes) {
        perturbed.push_back({std::move(*planes), s.target, s.which});
      }
    }
  }
  std::vector<head_example<float>> out(perturbed.size());
  parallel_for(perturbed.size(), [&](std::size_t i) {
    out[i] = {extract(frozen, std::span<const float>(perturbed[i].input)), perturbed[i].target, perturbed[i].which};
  });
  return out;
}

namespace {

std::vector<head_example<float>> features_of(const network_params<float>& params,
                                             std::span<const example<float>> samples) {
  std::vector<head_example<float>> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    out[i] = {extract(params, std::span<const float>(samples[i].input)), samples[i].target, samples[i].which};
  });
  return out;
}

} // namespace

stage_result train_stage2(const network_params<float>& stage1, channel_case which,
                          std::span<const example<float>> train, std::span<const example<float>> validation,
                          const train_hyper& hyper, const std::optional<augment_options>& augmentation) {
  check_hyper(hyper);
  if (train.empty() || validation.empty()) {
    throw dataset_error("stage 2 needs nonempty training and validation sets");
  }
  for (auto set : {train, validation}) {
    for (const auto& s : set) {
      if (s.which != which) {
        throw dataset_error("stage 2 for case " + to_string(which) + " got a sample of case " + to_string(s.which));
      }
    }
  }

  stage_result result;
  result.params = stage1;
  result.params.frozen_extractor = true;

  auto train_set = features_of(result.params, train);
  if (augmentation) {
    std::mt19937_64 rng(augmentation->seed);
    auto extra = augment(train, result.params, augmentation->alpha, augmentation->factor, rng);
    train_set.insert(train_set.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
  }
  const auto val_set = features_of(result.params, validation);

  fitting_head<float> head = result.params.head(which);
  auto state = make_adam_state(head.tensors());
  const adam_hyper adam{hyper.lr};

  result.history.initial_validation_loss = head_mean_loss(head, std::span<const head_example<float>>(val_set));
  result.history.best_validation_loss = result.history.initial_validation_loss;
  fitting_head<float> best = head;
  std::size_t since_best = 0;

  std::vector<head_example<float>> batch;
  for (std::size_t epoch = 0; epoch < hyper.max_epochs; ++epoch) {
    const auto order = epoch_order(train_set.size(), hyper.seed, epoch);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch) {
      const std::size_t end = std::min(order.size(), start + hyper.batch);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(train_set[order[i]]);
      }
      const auto lg = head_loss_and_grad(head, std::span<const head_example<float>>(batch));
      epoch_loss += static_cast<double>(lg.loss) * static_cast<double>(end - start);
      adam_step(head.tensors(), std::as_const(lg.grad).tensors(), adam, state);
    }
    const double val = head_mean_loss(head, std::span<const head_example<float>>(val_set));
    result.history.train_loss.push_back(epoch_loss / static_cast<double>(train_set.size()));
    result.history.validation_loss.push_back(val);
    if (val < result.history.best_validation_loss) {
      result.history.best_validation_loss = val;
      result.history.best_epoch = epoch;
      best = head;
      since_best = 0;
    } else if (++since_best >= hyper.patience) {
      break;
    }
  }
  result.params.head(which) = best;
  return result;
}

double case_loss(const network_params<float>& params, std::span<const example<float>> samples) {
  return static_cast<double>(mean_loss(params, samples));
}

} // namespace toalab::nn
