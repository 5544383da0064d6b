// ctm: train, evaluate and probe context-guided triple matching models.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctm/checkpoint.hpp"
#include "ctm/config.hpp"
#include "ctm/data.hpp"
#include "ctm/errors.hpp"
#include "ctm/tensor.hpp"
#include "ctm/trainer.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::string data_dir;
  std::string format = "race";
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, Common& c, bool needs_data) {
  app->add_option("--config", c.config_path, "flat JSON config");
  auto* d = app->add_option("--data", c.data_dir, "dataset directory");
  if (needs_data) d->required();
  app->add_option("--format", c.format, "race | dream | synth");
  app->add_option("--out", c.out, "output path");
  app->add_option("--seed", c.seed, "overrides the config seed");
}

ctm::CtmConfig load_config(const Common& c) {
  ctm::CtmConfig config = c.config_path.empty() ? ctm::CtmConfig{} : ctm::CtmConfig::load(c.config_path);
  if (c.seed) config.seed = *c.seed;
  config.validate();
  return config;
}

std::vector<ctm::McqaExample> load(const Common& c, const std::string& split) {
  auto ex = ctm::load_split(c.data_dir, ctm::parse_data_format(c.format), split);
  if (ex.empty()) throw ctm::ParseError("no " + split + " examples under " + c.data_dir);
  return ex;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ctm::Error("cannot write " + path);
  f << text;
}

std::string sibling(const std::string& path, const std::string& suffix) {
  return fs::path(path).replace_extension(suffix).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"context-guided triple matching for multiple-choice QA"};
  app.require_subcommand(1);

  Common train_opt;
  std::string test_split = "test";
  bool no_test = false;
  auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  add_common(train_cmd, train_opt, true);
  train_cmd->add_option("--test-split", test_split, "split evaluated after each epoch");
  train_cmd->add_flag("--no-test", no_test, "skip per-epoch test evaluation");

  Common eval_opt;
  std::string checkpoint, eval_split = "test";
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval_cmd, eval_opt, true);
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval_cmd->add_option("--split", eval_split, "split to evaluate");

  Common ablate_opt;
  std::vector<std::string> sets{"a", "q", "p", "aqp"};
  std::vector<std::uint64_t> ablate_seeds{1, 2, 3, 4, 5};
  auto* ablate_cmd = app.add_subcommand("ablate", "compare branch sets and baselines");
  add_common(ablate_cmd, ablate_opt, true);
  ablate_cmd->add_option("--sets", sets, "branch sets (a, qp, aqp, ...) or dcmn, co, cnn");
  ablate_cmd->add_option("--seeds", ablate_seeds, "paired seeds");

  Common sweep_opt;
  std::vector<double> lambdas{0.0, 0.5, 1.0, 1.5};
  std::vector<std::uint64_t> sweep_seeds{1, 2, 3};
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep the contrastive weight lambda_cr");
  add_common(sweep_cmd, sweep_opt, true);
  sweep_cmd->add_option("--lambdas", lambdas, "lambda_cr values");
  sweep_cmd->add_option("--seeds", sweep_seeds, "paired seeds");

  Common grad_opt;
  double eps = 1e-5;
  double tolerance = 1e-5;
  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference check of the joint objective");
  add_common(grad_cmd, grad_opt, false);
  grad_cmd->add_option("--eps", eps, "central difference step");
  grad_cmd->add_option("--tolerance", tolerance, "worst relative error allowed");

  Common synth_opt;
  ctm::SynthSpec spec;
  spec.questions = 1000;
  double test_fraction = 0.2;
  auto* synth_cmd = app.add_subcommand("synth", "write a keyword synth corpus (train.json, test.json)");
  add_common(synth_cmd, synth_opt, false);
  synth_cmd->add_option("--questions", spec.questions);
  synth_cmd->add_option("--options", spec.options);
  synth_cmd->add_option("--vocab", spec.vocab_size);
  synth_cmd->add_option("--keywords", spec.keywords, "content words reserved as keywords");
  synth_cmd->add_option("--filler", spec.filler_sentences, "filler sentences per passage");
  synth_cmd->add_option("--sentence-length", spec.sentence_length);
  synth_cmd->add_option("--option-length", spec.option_length);
  synth_cmd->add_option("--test-fraction", test_fraction);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      const auto config = load_config(train_opt);
      const auto train_set = load(train_opt, "train");
      std::vector<ctm::McqaExample> test_set;
      ctm::TrainOptions opts;
      if (!no_test) {
        test_set = load(train_opt, test_split);
        opts.eval_set = &test_set;
      }
      opts.on_epoch = [](const ctm::EpochMetrics& m) {
        std::fprintf(stderr, "epoch %zu %s loss_tm=%.4f loss_cr=%.4f acc=%.4f\n", m.epoch, m.split.c_str(),
                     m.loss_tm, m.loss_cr, m.accuracy);
      };
      const auto result = ctm::train(config, train_set, opts);
      const std::string out = train_opt.out.empty() ? "model.ctm" : train_opt.out;
      ctm::save_checkpoint(out, result.model);
      write_text(sibling(out, ".metrics.csv"), ctm::metrics_csv(result.metrics));
      write_text(sibling(out, ".trace.csv"), ctm::trace_csv(result.trace));
      std::cout << "checkpoint " << out << '\n';
    } else if (*eval_cmd) {
      const auto model = ctm::load_checkpoint(checkpoint);
      if (!eval_opt.config_path.empty()) ctm::require_compatible(model.config(), load_config(eval_opt));
      const auto ev = ctm::evaluate(model, load(eval_opt, eval_split));
      ctm::EpochMetrics m{0, eval_split, ev.loss_tm, 0.0, ev.accuracy, 0.0};
      write_text(eval_opt.out, ctm::metrics_csv({m}));
    } else if (*ablate_cmd) {
      const auto config = load_config(ablate_opt);
      const auto rows = ctm::ablate(config, load(ablate_opt, "train"), load(ablate_opt, "test"), sets, ablate_seeds);
      write_text(ablate_opt.out, ctm::comparison_csv(rows));
    } else if (*sweep_cmd) {
      const auto config = load_config(sweep_opt);
      const auto rows =
          ctm::sweep_lambda(config, load(sweep_opt, "train"), load(sweep_opt, "test"), lambdas, sweep_seeds);
      write_text(sweep_opt.out, ctm::comparison_csv(rows));
    } else if (*grad_cmd) {
      const auto config = load_config(grad_opt);
      const auto report = ctm::gradcheck_model(config, config.seed, eps);
      write_text(grad_opt.out, ctm::format_report(report));
      const bool ok = report.worst_error < tolerance;
      std::fprintf(stderr, "gradcheck %s: worst relative error %.3g (tolerance %.1g)\n", ok ? "passed" : "FAILED",
                   report.worst_error, tolerance);
      return ok ? 0 : 1;
    } else if (*synth_cmd) {
      if (synth_opt.out.empty()) throw ctm::ConfigError("synth: --out <dir> is required");
      if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw ctm::ConfigError("synth: --test-fraction must be in [0, 1)");
      if (synth_opt.seed) spec.seed = *synth_opt.seed;
      const auto all = ctm::synth_dataset(spec);
      const auto n_test = static_cast<std::size_t>(static_cast<double>(all.size()) * test_fraction);
      const std::vector<ctm::McqaExample> train(all.begin(), all.end() - static_cast<std::ptrdiff_t>(n_test));
      const std::vector<ctm::McqaExample> test(all.end() - static_cast<std::ptrdiff_t>(n_test), all.end());
      fs::create_directories(synth_opt.out);
      ctm::write_race(fs::path(synth_opt.out) / "train.json", train);
      ctm::write_race(fs::path(synth_opt.out) / "test.json", test);
      std::cout << train.size() << " train, " << test.size() << " test questions in " << synth_opt.out << '\n';
    }
  } catch (const ctm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ctm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
