#include "toalab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <limits>
#include <optional>

#include "toalab/checkpoint.hpp"
#include "toalab/dataset.hpp"
#include "toalab/errors.hpp"
#include "toalab/evaluate.hpp"
#include "toalab/selftest.hpp"
#include "toalab/training.hpp"

namespace toalab::cli {

namespace {

struct gen_args {
  std::string which = "static";
  std::vector<std::string> snr = {"0"};
  std::size_t n = 100;
  unsigned subframes = 2;
  std::uint64_t seed = 1;
  int cell_id = 0;
  std::string out;
};

struct train_args {
  int stage = 1;
  std::string which;
  std::vector<std::string> data;
  std::string ckpt;
  std::string init;
  std::size_t augment = 0;
  double alpha = 0.05;
  std::optional<std::size_t> epochs;
  std::optional<double> lr;
  std::optional<std::size_t> patience;
  std::optional<std::size_t> batch;
  std::uint64_t seed = 1;
};

struct eval_args {
  std::string estimator = "peak";
  std::string data;
  std::string ckpt;
  std::string report;
  std::string format = "json";
};

double parse_snr(const std::string& text) {
  if (text == "inf" || text == "+inf") {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw argument_error("bad SNR value '" + text + "'");
  }
  return v;
}

toa_method parse_method(const std::string& name) {
  for (auto m : {toa_method::peak, toa_method::ls, toa_method::music, toa_method::esprit, toa_method::nn}) {
    if (to_string(m) == name) {
      return m;
    }
  }
  throw argument_error("unknown estimator '" + name + "'");
}

void run_gen(const gen_args& a) {
  scenario_config sc;
  sc.which = parse_channel_case(a.which);
  sc.snr_list.clear();
  for (const auto& s : a.snr) {
    sc.snr_list.push_back(parse_snr(s));
  }
  sc.n_records = a.n;
  sc.n_subframes = a.subframes;
  sc.seed = a.seed;
  sc.cell_id = a.cell_id;
  validate(sc);
  gen_dataset(sc, a.out);
  std::cout << "wrote " << a.out << '\n';
}

void split(const dataset& ds, std::vector<nn::example<float>>& train, std::vector<nn::example<float>>& validation,
           double ts, const std::optional<channel_case>& only) {
  const auto all = to_examples(ds, ts);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only && all[i].which != *only) {
      continue;
    }
    (i % 10 == 9 ? validation : train).push_back(all[i]);
  }
}

void print_history(const nn::train_history& h) {
  std::cout << "initial validation loss " << h.initial_validation_loss << '\n';
  for (std::size_t e = 0; e < h.train_loss.size(); ++e) {
    std::cout << "epoch " << e + 1 << " train " << h.train_loss[e] << " validation " << h.validation_loss[e] << '\n';
  }
  std::cout << "best epoch " << h.best_epoch << " validation loss " << h.best_validation_loss << '\n';
}

void run_train(const train_args& a) {
  if (a.stage != 1 && a.stage != 2) {
    throw argument_error("--stage must be 1 or 2");
  }
  const double ts = build_config("nbiot-1.4MHz").sample_period;
  std::optional<channel_case> which;
  if (a.stage == 2) {
    if (a.which.empty() || a.init.empty()) {
      throw argument_error("stage 2 needs --case and --init");
    }
    which = parse_channel_case(a.which);
  }
  std::vector<nn::example<float>> train;
  std::vector<nn::example<float>> validation;
  std::uint32_t window = 0;
  std::uint32_t n_rb = 0;
  for (const auto& path : a.data) {
    const auto ds = load_dataset(path);
    if (window != 0 && (ds.window != window || ds.n_rb != n_rb)) {
      throw dataset_error("datasets disagree on the feature map shape");
    }
    window = ds.window;
    n_rb = ds.n_rb;
    split(ds, train, validation, ts, which);
  }
  if (train.empty() || validation.empty()) {
    throw dataset_error("not enough records for a training/validation split");
  }

  auto hyper = a.stage == 1 ? nn::stage1_defaults() : nn::stage2_defaults();
  hyper.seed = a.seed;
  if (a.epochs) {
    hyper.max_epochs = *a.epochs;
  }
  if (a.lr) {
    hyper.lr = *a.lr;
  }
  if (a.patience) {
    hyper.patience = *a.patience;
  }
  if (a.batch) {
    hyper.batch = *a.batch;
  }

  nn::stage_result result;
  if (a.stage == 1) {
    result = nn::train_stage1(train, validation, window, n_rb, hyper);
  } else {
    std::optional<nn::augment_options> aug;
    if (a.augment > 0) {
      aug = nn::augment_options{a.alpha, a.augment, a.seed};
    }
    result = nn::train_stage2(load_checkpoint(a.init), *which, train, validation, hyper, aug);
  }
  print_history(result.history);
  save_checkpoint(a.ckpt, result.params);
  std::cout << "wrote " << a.ckpt << '\n';
}

void run_eval(const eval_args& a) {
  estimator_spec spec;
  spec.method = parse_method(a.estimator);
  if (!a.ckpt.empty()) {
    spec.checkpoint = a.ckpt;
  }
  if (a.format != "json" && a.format != "csv") {
    throw argument_error("--format must be json or csv");
  }
  const auto report = evaluate(spec, a.data);
  if (a.report.empty()) {
    if (a.format == "json") {
      write_report_json(std::cout, report);
    } else {
      write_report_csv(std::cout, report);
    }
  } else {
    save_report(a.report, report, a.format);
    std::cout << "wrote " << a.report << '\n';
  }
}

} // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"TOA estimation lab: PRS simulation, classical and learned estimators", "toa_lab"};
  app.require_subcommand(1);

  gen_args ga;
  auto* gen = app.add_subcommand("gen", "simulate a dataset");
  gen->add_option("--case", ga.which, "channel case")->check(CLI::IsMember({"static", "epa5", "eva5"}));
  gen->add_option("--snr", ga.snr, "SNR list in dB (comma separated, 'inf' for noiseless)")->delimiter(',');
  gen->add_option("--n", ga.n, "record count");
  gen->add_option("--subframes", ga.subframes, "PRS occasion length")->check(CLI::IsMember({1, 2}));
  gen->add_option("--seed", ga.seed, "master seed");
  gen->add_option("--cell-id", ga.cell_id, "physical cell id")->check(CLI::Range(0, 503));
  gen->add_option("--out", ga.out, "dataset path")->required();

  train_args ta;
  auto* train = app.add_subcommand("train", "train the network");
  train->add_option("--stage", ta.stage, "1: joint training, 2: head fine-tuning")->required();
  train->add_option("--case", ta.which, "channel case fine-tuned in stage 2")
      ->check(CLI::IsMember({"static", "epa5", "eva5"}));
  train->add_option("--data", ta.data, "dataset files")->required()->expected(1, -1);
  train->add_option("--ckpt", ta.ckpt, "output checkpoint")->required();
  train->add_option("--init", ta.init, "stage-1 checkpoint (stage 2)");
  train->add_option("--augment", ta.augment, "perturbed copies per sample (stage 2, 0 = off)");
  train->add_option("--alpha", ta.alpha, "perturbation scale")->check(CLI::NonNegativeNumber);
  train->add_option("--epochs", ta.epochs, "maximum epochs");
  train->add_option("--lr", ta.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  train->add_option("--patience", ta.patience, "early-stopping patience in epochs");
  train->add_option("--batch", ta.batch, "mini-batch size")->check(CLI::PositiveNumber);
  train->add_option("--seed", ta.seed, "training seed");

  eval_args ea;
  auto* eval = app.add_subcommand("eval", "evaluate an estimator on a dataset");
  eval->add_option("--estimator", ea.estimator, "estimator")
      ->check(CLI::IsMember({"peak", "ls", "music", "esprit", "nn"}));
  eval->add_option("--data", ea.data, "dataset path")->required();
  eval->add_option("--ckpt", ea.ckpt, "network checkpoint (nn)");
  eval->add_option("--report", ea.report, "report path (stdout when omitted)");
  eval->add_option("--format", ea.format, "report format")->check(CLI::IsMember({"json", "csv"}));

  auto* self = app.add_subcommand("selftest", "run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    std::cerr << "toa_lab: " << e.what() << '\n';
    return 2;
  }

  try {
    if (gen->parsed()) {
      run_gen(ga);
    } else if (train->parsed()) {
      run_train(ta);
    } else if (eval->parsed()) {
      run_eval(ea);
    } else if (self->parsed()) {
      return run_selftest(std::cout) == 0 ? 0 : 1;
    }
  } catch (const argument_error& e) {
    std::cerr << "toa_lab: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "toa_lab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

} // namespace toalab::cli
