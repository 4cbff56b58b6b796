#include <doctest.h>

#include "toalab/errors.hpp"
#include "toalab/evaluate.hpp"
#include "toalab/training.hpp"

using namespace toalab;
using namespace toalab::nn;

namespace {

const double ts = build_config("nbiot-1.4MHz").sample_period;

dataset make_data(std::size_t per_case, std::uint64_t seed, std::vector<double> snr = {0.0, 10.0, 20.0}) {
  dataset all{32, 6, {}};
  for (auto c : all_channel_cases) {
    scenario_config sc;
    sc.which = c;
    sc.snr_list = snr;
    sc.n_records = per_case;
    sc.seed = seed + static_cast<std::uint64_t>(c);
    auto d = generate_dataset(sc);
    all.records.insert(all.records.end(), d.records.begin(), d.records.end());
  }
  return all;
}

void split(const std::vector<example<float>>& all, std::vector<example<float>>& tr, std::vector<example<float>>& va,
           std::optional<channel_case> only = std::nullopt) {
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only && all[i].which != *only) {
      continue;
    }
    (i % 10 == 9 ? va : tr).push_back(all[i]);
  }
}

struct fixture {
  std::vector<example<float>> train;
  std::vector<example<float>> validation;
  fixture() {
    split(to_examples(make_data(700, 50), ts), train, validation);
  }
};

const fixture& data() {
  static const fixture f;
  return f;
}

train_hyper quick(std::size_t epochs) {
  auto h = stage1_defaults();
  h.max_epochs = epochs;
  return h;
}

} // namespace

TEST_CASE("default schedules") {
  CHECK(stage1_defaults().lr == 1e-3);
  CHECK(stage2_defaults().lr == 1e-4);
  CHECK(stage1_defaults().batch == 64);
  CHECK(stage1_defaults().patience == 20);
}

TEST_CASE("stage 1 needs every case") {
  std::vector<example<float>> only_static;
  for (const auto& e : data().train) {
    if (e.which == channel_case::static_los) {
      only_static.push_back(e);
    }
  }
  CHECK_THROWS_AS(train_stage1(only_static, data().validation, 32, 6, quick(1)), dataset_error);
}

TEST_CASE("stage 1 validation loss trends down and is deterministic") {
  const auto a = train_stage1(data().train, data().validation, 32, 6, quick(30));
  const auto& v = a.history.validation_loss;
  REQUIRE(v.size() >= 10);
  double head = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    head += v[i];
    tail += v[v.size() - 1 - i];
  }
  CHECK(tail < head);
  CHECK(a.history.best_validation_loss < a.history.initial_validation_loss);
  CHECK(a.history.best_validation_loss == *std::min_element(v.begin(), v.end()));
  CHECK_FALSE(a.params.frozen_extractor);
  CHECK(case_loss(a.params, data().validation) == doctest::Approx(a.history.best_validation_loss).epsilon(1e-6));

  const auto b = train_stage1(data().train, data().validation, 32, 6, quick(30));
  CHECK(a.history.validation_loss == b.history.validation_loss);
  CHECK(extractor_hash(a.params) == extractor_hash(b.params));
}

TEST_CASE("early stopping honours patience") {
  auto h = quick(400);
  h.patience = 3;
  h.lr = 0.5;
  const auto r = train_stage1(data().train, data().validation, 32, 6, h);
  CHECK(r.history.validation_loss.size() < 400);
  CHECK(r.history.validation_loss.size() - 1 - r.history.best_epoch <= 3);
}

TEST_CASE("stage 2 freezes the extractor and touches one head") {
  const auto s1 = train_stage1(data().train, data().validation, 32, 6, quick(10));
  std::vector<example<float>> tr;
  std::vector<example<float>> va;
  split(to_examples(make_data(300, 90), ts), tr, va, channel_case::epa5);
  auto h2 = stage2_defaults();
  h2.max_epochs = 20;
  const auto s2 = train_stage2(s1.params, channel_case::epa5, tr, va, h2, augment_options{0.05, 2, 3});
  CHECK(s2.params.frozen_extractor);
  CHECK(extractor_hash(s2.params) == extractor_hash(s1.params));
  CHECK(head_hash(s2.params.head(channel_case::static_los)) == head_hash(s1.params.head(channel_case::static_los)));
  CHECK(head_hash(s2.params.head(channel_case::eva5)) == head_hash(s1.params.head(channel_case::eva5)));
  CHECK(s2.history.best_validation_loss <= s2.history.initial_validation_loss);
  CHECK(s2.history.initial_validation_loss == doctest::Approx(case_loss(s1.params, va)).epsilon(1e-6));

  CHECK_THROWS_AS(train_stage2(s1.params, channel_case::eva5, tr, va, h2, std::nullopt), dataset_error);
}

TEST_CASE("augmentation: count, identity at alpha 0, frozen requirement") {
  auto net = init_network<float>(32, 6, 4);
  std::vector<example<float>> few(data().train.begin(), data().train.begin() + 50);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(augment(few, net, 0.05, 4, rng), argument_error);
  net.frozen_extractor = true;
  const auto out = augment(few, net, 0.05, 4, rng);
  CHECK(out.size() == 200);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].target == few[i / 4].target);
    CHECK(out[i].which == few[i / 4].which);
  }
  const auto same = augment(few, net, 0.0, 1, rng);
  REQUIRE(same.size() == few.size());
  for (std::size_t i = 0; i < few.size(); ++i) {
    const auto eta = extract<float>(net, few[i].input);
    for (std::size_t j = 0; j < eta.size(); ++j) {
      CHECK(same[i].features[j] == doctest::Approx(eta[j]).epsilon(1e-5));
    }
  }
  CHECK_THROWS_AS(augment(few, net, -1.0, 1, rng), argument_error);
  CHECK_THROWS_AS(augment(few, net, 0.1, 0, rng), argument_error);
}

TEST_CASE("perturbed planes keep the feature map invariants") {
  std::mt19937_64 rng(5);
  for (std::size_t i = 0; i < 40; ++i) {
    const auto p = perturb_planes(data().train[i].input, 32, 7, 0.2, rng);
    REQUIRE(p);
    float top = 0.0f;
    for (std::size_t m = 0; m < 32; ++m) {
      top = std::max(top, (*p)[m * 14]);
    }
    CHECK(top == 1.0f);
    for (std::size_t j = 0; j < p->size(); j += 2) {
      CHECK((*p)[j] >= 0.0f);
      CHECK((*p)[j] <= 1.0f);
      CHECK(std::abs((*p)[j + 1]) <= 3.1416f);
    }
  }
  std::vector<float> zeros(32 * 7 * 2, 0.0f);
  CHECK_FALSE(perturb_planes(zeros, 32, 7, 0.0, rng).has_value());
}
