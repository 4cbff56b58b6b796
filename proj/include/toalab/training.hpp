#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "toalab/neural.hpp"

namespace toalab::nn {

struct train_hyper {
  double lr = 1e-3;
  std::size_t batch = 64;
  std::size_t max_epochs = 200;
  std::size_t patience = 20; ///< epochs without validation improvement before stopping
  std::uint64_t seed = 1;
};

/// Default schedule of the joint extractor + heads stage.
train_hyper stage1_defaults();
/// Default schedule of the head-only fine-tuning stage.
train_hyper stage2_defaults();

struct train_history {
  double initial_validation_loss = 0.0;
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  std::size_t best_epoch = 0;
  double best_validation_loss = 0.0;
};

struct stage_result {
  network_params<float> params;
  train_history history;
};

/// Joint training of the extractor and every head on mixed-case data. Each
/// head's output bias starts at the mean target of its case. The returned
/// parameters are those with the lowest validation loss.
/// Throws dataset_error if any channel case is missing from `train`.
stage_result train_stage1(std::span<const example<float>> train, std::span<const example<float>> validation,
                          std::size_t window, std::size_t n_rb, const train_hyper& hyper);

struct augment_options {
  double alpha = 0.05;    ///< perturbation std relative to each series' RMS magnitude
  std::size_t factor = 4; ///< perturbed copies per sample
  std::uint64_t seed = 1;
};

/// Perturbation-based augmentation. For every sample, `factor` copies of its
/// correlations (recovered from the amplitude/phase planes) receive zero-mean
/// Gaussian noise of std alpha * RMS|R| on the real and imaginary parts of
/// each bin, are renormalised into a feature map and pushed through the
/// frozen extractor. Copies whose rebuilt map is invalid are dropped.
std::vector<head_example<float>> augment(std::span<const example<float>> samples,
                                         const network_params<float>& frozen, double alpha, std::size_t factor,
                                         std::mt19937_64& rng);

/// Rebuilds a feature map after adding complex Gaussian noise to every
/// correlation bin. Returns std::nullopt when the result violates the feature
/// map invariants.
std::optional<std::vector<float>> perturb_planes(std::span<const float> planes, std::size_t window,
                                                 std::size_t columns, double alpha, std::mt19937_64& rng);

/// Freezes the extractor and fine-tunes the head of `which` only. With
/// `augmentation`, the training set is the original features plus the
/// augmented pairs. Throws dataset_error if a sample belongs to another case.
stage_result train_stage2(const network_params<float>& stage1, channel_case which,
                          std::span<const example<float>> train, std::span<const example<float>> validation,
                          const train_hyper& hyper, const std::optional<augment_options>& augmentation);

/// Mean validation loss of one case's head on `samples`.
double case_loss(const network_params<float>& params, std::span<const example<float>> samples);

} // namespace toalab::nn
