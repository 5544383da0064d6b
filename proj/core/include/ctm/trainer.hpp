#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ctm/config.hpp"
#include "ctm/example.hpp"
#include "ctm/gradcheck.hpp"
#include "ctm/model.hpp"
#include "ctm/objectives.hpp"

namespace ctm {

struct StepRecord {
  std::size_t step = 0;
  LossKind kind = LossKind::joint;
  bool has_tm = false;
  bool has_cr = false;
  double loss_tm = 0.0;
  double loss_cr = 0.0;
  double loss = 0.0;  // the objective actually minimized
};

struct EpochMetrics {
  std::size_t epoch = 0;
  std::string split;
  double loss_tm = 0.0;
  double loss_cr = 0.0;
  double accuracy = 0.0;  // negative when not evaluated
  double seconds = 0.0;
};

struct EvalResult {
  std::size_t questions = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  double loss_tm = 0.0;
  std::vector<std::size_t> predictions;  // per question, input order
};

struct TrainOptions {
  const std::vector<McqaExample>* eval_set = nullptr;  // reported as split "test"
  bool evaluate_train = true;
  /// Stop after the first epoch whose train accuracy reaches this value.
  double stop_at_train_accuracy = 2.0;
  std::function<void(const EpochMetrics&)> on_epoch;
  std::function<void(const StepRecord&)> on_step;
};

struct TrainResult {
  CtmModel<float> model;
  std::vector<EpochMetrics> metrics;
  std::vector<StepRecord> trace;
};

/// Runs the configured schedule over question mini-batches. Per question the
/// candidates are represented under dropout draw 1; when the step needs the
/// contrastive term the gold candidate is represented again under draw 2,
/// which comes from a separate stream so it never perturbs draw 1. A
/// non-finite value aborts with a NumericError naming the step.
TrainResult train(const CtmConfig& config, const std::vector<McqaExample>& train_set,
                  const TrainOptions& options = {});

/// Inference-mode accuracy. Long passages are windowed and each candidate's
/// score is the max over its windows; ties go to the lowest index.
template <typename T>
EvalResult evaluate(const CtmModel<T>& model, const std::vector<McqaExample>& examples);

/// Index of the largest score, lowest index on ties.
std::size_t argmax_lowest(std::span<const double> scores);

std::string metrics_csv(const std::vector<EpochMetrics>& metrics);
std::string trace_csv(const std::vector<StepRecord>& trace);

struct ComparisonRow {
  std::string config;
  double accuracy = 0.0;
  std::vector<double> per_seed;
};

/// Trains and evaluates each configuration over the same seeds. Entries are
/// branch sets ("a", "qp", "aqp", ...) or baseline names (dcmn, co, cnn).
std::vector<ComparisonRow> ablate(const CtmConfig& base, const std::vector<McqaExample>& train_set,
                                  const std::vector<McqaExample>& test_set,
                                  const std::vector<std::string>& configurations,
                                  const std::vector<std::uint64_t>& seeds);

/// Same protocol as ablate, varying only lambda_cr.
std::vector<ComparisonRow> sweep_lambda(const CtmConfig& base,
                                        const std::vector<McqaExample>& train_set,
                                        const std::vector<McqaExample>& test_set,
                                        const std::vector<double>& values,
                                        const std::vector<std::uint64_t>& seeds);

std::string comparison_csv(const std::vector<ComparisonRow>& rows);

/// Finite-difference check of the full joint objective on a tiny random
/// question (l <= 6, sequences <= 5 tokens, 3 options) in double precision
/// with frozen dropout masks.
GradCheckReport gradcheck_model(const CtmConfig& config, std::uint64_t seed, double eps = 1e-5);
std::string format_report(const GradCheckReport& report);

}  // namespace ctm
