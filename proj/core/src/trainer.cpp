#include "ctm/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>

#include "ctm/data.hpp"
#include "ctm/errors.hpp"
#include "ctm/ops.hpp"
#include "ctm/optim.hpp"

namespace ctm {

namespace {

// Stream tags for RngState::fork.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kDraw1Stream = 3;
constexpr std::uint64_t kDraw2Stream = 4;

CtmModel<float> make_model(const CtmConfig& config, const std::vector<McqaExample>& train_set) {
  RngState init = RngState(config.seed).fork(kInitStream);
  if (config.embeddings.empty()) return CtmModel<float>(config, Vocab::build(train_set), init);
  auto enc = std::make_shared<PrecomputedEncoder<float>>(
      PrecomputedEncoder<float>::load(config.embeddings, config.hidden_dim));
  return CtmModel<float>(config, enc, init);
}

std::vector<McqaExample> training_instances(const CtmConfig& config,
                                            const std::vector<McqaExample>& examples) {
  // precomputed embeddings are stored per original example id
  if (!config.embeddings.empty()) return examples;
  return window_examples(examples, config.max_len, config.stride());
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::size_t argmax_lowest(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

template <typename T>
EvalResult evaluate(const CtmModel<T>& model, const std::vector<McqaExample>& examples) {
  NoGradGuard no_grad;
  const auto& config = model.config();
  EvalResult result;
  RngState unused(0);
  // Scores per question, max-pooled over windows, in first-seen order.
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> pooled;
  for (const auto& ex : training_instances(config, examples)) {
    const auto s = model.scores(ex, unused, false);
    auto [it, fresh] = pooled.try_emplace(ex.group_id());
    auto& [best, gold] = it->second;
    if (fresh) {
      order.push_back(ex.group_id());
      best.assign(s.data().begin(), s.data().end());
      gold = ex.gold;
    } else {
      for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::max(best[i], static_cast<double>(s[i]));
    }
  }
  double loss_total = 0.0;
  for (const auto& id : order) {
    const auto& [best, gold] = pooled.at(id);
    const std::size_t pred = argmax_lowest(best);
    result.predictions.push_back(pred);
    result.correct += pred == gold ? 1 : 0;
    const double mx = *std::max_element(best.begin(), best.end());
    double z = 0.0;
    for (double v : best) z += std::exp(v - mx);
    loss_total += mx + std::log(z) - best[gold];
  }
  result.questions = order.size();
  if (result.questions > 0) {
    result.accuracy = static_cast<double>(result.correct) / static_cast<double>(result.questions);
    result.loss_tm = loss_total / static_cast<double>(result.questions);
  }
  return result;
}

TrainResult train(const CtmConfig& config, const std::vector<McqaExample>& train_set,
                  const TrainOptions& options) {
  config.validate();
  if (train_set.empty()) throw ContractError("train: empty dataset");
  for (const auto& ex : train_set) validate(ex);

  TrainResult result{make_model(config, train_set), {}, {}};
  auto& model = result.model;
  const auto instances = training_instances(config, train_set);
  const Schedule schedule = config.schedule();

  std::vector<Tensor<float>> params;
  for (auto& p : model.parameters()) params.push_back(p.tensor);
  Adam<float> adam(params, AdamHyper{config.learning_rate});

  const RngState root(config.seed);
  RngState shuffle = root.fork(kShuffleStream);
  RngState draw1 = root.fork(kDraw1Stream);
  RngState draw2 = root.fork(kDraw2Stream);

  std::vector<std::size_t> order(instances.size());
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double tm_sum = 0.0, cr_sum = 0.0;
    std::size_t tm_steps = 0, cr_steps = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++step) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const LossKind kind = schedule.at(step);
      const bool need_tm = kind != LossKind::contrastive;
      const bool need_cr = kind != LossKind::selection;
      StepRecord rec{step, kind, need_tm, need_cr};
      try {
        std::vector<Tensor<float>> tm_losses, cr_losses, losses;
        for (std::size_t k = begin; k < end; ++k) {
          const McqaExample& ex = instances[order[k]];
          const auto reps = model.represent(ex, draw1, true);
          Tensor<float> tm, cr;
          if (need_tm) {
            tm = selection_loss(ScoredQuestion<float>{reps, ex.gold}, model.head());
            tm_losses.push_back(tm);
          }
          if (need_cr) {
            ContrastiveViews<float> views;
            views.anchor = reps[ex.gold];
            views.positive = model.represent_candidate(ex, ex.gold, draw2, true);
            for (std::size_t i = 0; i < reps.size(); ++i)
              if (i != ex.gold) views.negatives.push_back(reps[i]);
            views.temperature = config.tau;
            cr = contrastive_loss(views);
            cr_losses.push_back(cr);
          }
          switch (kind) {
            case LossKind::joint: losses.push_back(joint_loss(tm, cr, config.lambda_cr)); break;
            case LossKind::selection: losses.push_back(tm); break;
            case LossKind::contrastive: losses.push_back(cr); break;
          }
        }
        const auto loss = mean(losses);
        if (need_tm) rec.loss_tm = mean(tm_losses).item();
        if (need_cr) rec.loss_cr = mean(cr_losses).item();
        rec.loss = loss.item();
        if (!std::isfinite(rec.loss)) throw NumericError("non-finite loss");
        adam.zero_grad();
        backward(loss);
        clip_grad_norm(params, config.grad_clip);
        adam.step();
      } catch (const NumericError& e) {
        throw NumericError("training diverged at step " + std::to_string(step) + " (epoch " +
                           std::to_string(epoch) + "): " + e.what());
      }
      if (need_tm) { tm_sum += rec.loss_tm; ++tm_steps; }
      if (need_cr) { cr_sum += rec.loss_cr; ++cr_steps; }
      if (options.on_step) options.on_step(rec);
      result.trace.push_back(rec);
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.split = "train";
    m.loss_tm = tm_steps ? tm_sum / static_cast<double>(tm_steps) : 0.0;
    m.loss_cr = cr_steps ? cr_sum / static_cast<double>(cr_steps) : 0.0;
    m.accuracy = options.evaluate_train ? evaluate(model, train_set).accuracy : -1.0;
    if (config.record_time) {
      m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
    result.metrics.push_back(m);
    if (options.on_epoch) options.on_epoch(m);
    if (options.eval_set != nullptr) {
      const auto ev = evaluate(model, *options.eval_set);
      EpochMetrics t{epoch, "test", ev.loss_tm, 0.0, ev.accuracy, 0.0};
      result.metrics.push_back(t);
      if (options.on_epoch) options.on_epoch(t);
    }
    if (options.evaluate_train && m.accuracy >= options.stop_at_train_accuracy) break;
  }
  return result;
}

std::string metrics_csv(const std::vector<EpochMetrics>& metrics) {
  std::ostringstream os;
  os << "epoch,split,loss_tm,loss_cr,accuracy,seconds\n";
  for (const auto& m : metrics) {
    os << m.epoch << ',' << m.split << ',' << format_double(m.loss_tm) << ','
       << format_double(m.loss_cr) << ',' << (m.accuracy < 0 ? "" : format_double(m.accuracy)) << ','
       << format_double(m.seconds) << '\n';
  }
  return os.str();
}

std::string trace_csv(const std::vector<StepRecord>& trace) {
  std::ostringstream os;
  os << "step,kind,loss_tm,loss_cr,loss\n";
  for (const auto& r : trace) {
    os << r.step << ',' << to_string(r.kind) << ',' << (r.has_tm ? format_double(r.loss_tm) : "")
       << ',' << (r.has_cr ? format_double(r.loss_cr) : "") << ',' << format_double(r.loss) << '\n';
  }
  return os.str();
}

namespace {

ComparisonRow run_configuration(const std::string& name, const CtmConfig& config,
                                const std::vector<McqaExample>& train_set,
                                const std::vector<McqaExample>& test_set,
                                const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  ComparisonRow row;
  row.config = name;
  TrainOptions opts;
  opts.evaluate_train = false;
  for (std::uint64_t seed : seeds) {
    CtmConfig c = config;
    c.seed = seed;
    const auto trained = train(c, train_set, opts);
    row.per_seed.push_back(evaluate(trained.model, test_set).accuracy);
  }
  row.accuracy = std::accumulate(row.per_seed.begin(), row.per_seed.end(), 0.0) /
                 static_cast<double>(row.per_seed.size());
  return row;
}

}  // namespace

std::vector<ComparisonRow> ablate(const CtmConfig& base, const std::vector<McqaExample>& train_set,
                                  const std::vector<McqaExample>& test_set,
                                  const std::vector<std::string>& configurations,
                                  const std::vector<std::uint64_t>& seeds) {
  // resolve every name before spending time on training
  std::vector<std::pair<std::string, CtmConfig>> resolved;
  for (const auto& name : configurations) {
    CtmConfig c = base;
    if (name == "dcmn" || name == "co" || name == "cnn") {
      c.matcher = parse_matcher(name);
      resolved.emplace_back(name, c);
    } else {
      c.matcher = Matcher::triple;
      c.branches = BranchSet::parse(name);
      resolved.emplace_back(c.branches.to_string(), c);
    }
  }
  std::vector<ComparisonRow> rows;
  for (const auto& [name, c] : resolved) rows.push_back(run_configuration(name, c, train_set, test_set, seeds));
  return rows;
}

std::vector<ComparisonRow> sweep_lambda(const CtmConfig& base,
                                        const std::vector<McqaExample>& train_set,
                                        const std::vector<McqaExample>& test_set,
                                        const std::vector<double>& values,
                                        const std::vector<std::uint64_t>& seeds) {
  for (double v : values) {
    if (!(v >= 0.0)) throw ConfigError("lambda_cr values must be non-negative");
  }
  std::vector<ComparisonRow> rows;
  for (double v : values) {
    CtmConfig c = base;
    c.lambda_cr = v;
    rows.push_back(run_configuration("lambda_cr=" + format_double(v), c, train_set, test_set, seeds));
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << "config,accuracy\n";
  for (const auto& r : rows) os << r.config << ',' << format_double(r.accuracy) << '\n';
  return os.str();
}

GradCheckReport gradcheck_model(const CtmConfig& config, std::uint64_t seed, double eps) {
  CtmConfig c = config;
  c.hidden_dim = std::min<std::size_t>(config.hidden_dim, 4);
  c.max_len = 8;
  c.embeddings.clear();
  c.validate();

  RngState gen(seed);
  auto sequence = [&](std::size_t min_len, std::size_t max_len) {
    Tokens t;
    const std::size_t n = min_len + gen.below(max_len - min_len + 1);
    for (std::size_t i = 0; i < n; ++i) t.push_back("t" + std::to_string(gen.below(10)));
    return t;
  };
  McqaExample ex;
  ex.id = "gradcheck";
  ex.passage = sequence(4, 5);
  ex.question = sequence(2, 4);
  for (int i = 0; i < 3; ++i) ex.options.push_back(sequence(1, 3));
  ex.gold = gen.below(3);

  RngState init = gen.fork(kInitStream);
  CtmModel<double> model(c, Vocab::build(std::vector<McqaExample>{ex}), init);
  const double lambda = c.lambda_cr > 0.0 ? c.lambda_cr : 0.5;
  const auto draw1 = gen.fork(kDraw1Stream);
  const auto draw2 = gen.fork(kDraw2Stream);
  auto objective = [&]() {
    RngState r1 = draw1, r2 = draw2;  // same masks on every evaluation
    const auto reps = model.represent(ex, r1, true);
    const auto tm = selection_loss(ScoredQuestion<double>{reps, ex.gold}, model.head());
    ContrastiveViews<double> views;
    views.anchor = reps[ex.gold];
    views.positive = model.represent_candidate(ex, ex.gold, r2, true);
    for (std::size_t i = 0; i < reps.size(); ++i)
      if (i != ex.gold) views.negatives.push_back(reps[i]);
    views.temperature = c.tau;
    return joint_loss(tm, contrastive_loss(views), lambda);
  };
  std::vector<NamedParam> params;
  for (auto& p : model.parameters()) {
    // unit-scale embeddings; the training init (+-0.1) leaves some gradients
    // so small that central differences drown in roundoff
    if (p.name.rfind("encoder.", 0) == 0)
      for (auto& v : p.tensor.mutable_data()) v = gen.uniform(-1.0, 1.0);
    params.emplace_back(p.name, p.tensor);
  }
  return finite_diff_check(objective, params, eps);
}

std::string format_report(const GradCheckReport& report) {
  std::ostringstream os;
  os << "parameter,coordinates,worst_rel_error,index,autodiff,numeric\n";
  for (const auto& e : report.entries) {
    os << e.name << ',' << e.coordinates << ',' << format_double(e.worst_error) << ',' << e.worst_index
       << ',' << format_double(e.autodiff) << ',' << format_double(e.numeric) << '\n';
  }
  os << "worst," << format_double(report.worst_error) << '\n';
  return os.str();
}

template EvalResult evaluate(const CtmModel<float>&, const std::vector<McqaExample>&);
template EvalResult evaluate(const CtmModel<double>&, const std::vector<McqaExample>&);

}  // namespace ctm
