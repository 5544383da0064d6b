#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ctm/tensor.hpp"

namespace ctm {

// Candidate representations C_i of one question and the gold index.
template <typename T>
struct ScoredQuestion {
  std::vector<Tensor<T>> candidates;
  std::size_t gold = 0;
};

template <typename T>
using QuestionBatch = std::vector<ScoredQuestion<T>>;

/// s_i = C_i . w, as an [n] vector.
template <typename T>
Tensor<T> candidate_scores(const std::vector<Tensor<T>>& candidates, const Tensor<T>& head);

/// -log softmax(s)[gold]
template <typename T>
Tensor<T> selection_loss_from_scores(const Tensor<T>& scores, std::size_t gold);

template <typename T>
Tensor<T> selection_loss(const ScoredQuestion<T>& question, const Tensor<T>& head);

/// Mean of the per-question selection losses.
template <typename T>
Tensor<T> selection_loss(const QuestionBatch<T>& batch, const Tensor<T>& head);

// Anchor and positive are the gold candidate under two dropout draws; the
// negatives are the question's distractors.
template <typename T>
struct ContrastiveViews {
  Tensor<T> anchor;
  Tensor<T> positive;
  std::vector<Tensor<T>> negatives;
  double temperature = 0.07;
};

/// -log( e^{cos(a,p)/tau} / (e^{cos(a,p)/tau} + sum_i e^{cos(a,n_i)/tau}) ),
/// evaluated as logsumexp(z) - z_0. The anchor is not in its own
/// denominator.
template <typename T>
Tensor<T> contrastive_loss(const ContrastiveViews<T>& views);

/// L_TM + lambda * L_CR. Negative lambda is a ConfigError.
template <typename T>
Tensor<T> joint_loss(const Tensor<T>& selection, const Tensor<T>& contrastive, double lambda);

template <typename T>
Tensor<T> mean(const std::vector<Tensor<T>>& scalars);

enum class Strategy { joint, pretrain, alternate };
enum class LossKind { joint, selection, contrastive };

Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy s);
std::string to_string(LossKind k);

// Which objective a given optimizer step uses.
//   joint     - always the combined loss
//   pretrain  - contrastive only for the first pretrain_steps, then selection
//   alternate - selection for n_t - 1 steps, then contrastive once, repeating
struct Schedule {
  Strategy strategy = Strategy::joint;
  std::size_t n_t = 2;
  std::size_t pretrain_steps = 0;

  /// Throws ConfigError for alternate with n_t < 2.
  void validate() const;
  LossKind at(std::size_t step) const;
};

}  // namespace ctm
