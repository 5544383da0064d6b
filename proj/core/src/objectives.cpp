#include "ctm/objectives.hpp"

#include "ctm/errors.hpp"
#include "ctm/ops.hpp"

namespace ctm {

template <typename T>
Tensor<T> candidate_scores(const std::vector<Tensor<T>>& candidates, const Tensor<T>& head) {
  if (candidates.empty()) throw ContractError("candidate_scores: no candidates");
  std::vector<Tensor<T>> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (c.shape() != head.shape()) {
      throw DimensionError("candidate representation " + to_string(c.shape()) +
                           " does not match selection head " + to_string(head.shape()));
    }
    scores.push_back(reshape(dot(c, head), {1}));
  }
  return concat(scores);
}

template <typename T>
Tensor<T> selection_loss_from_scores(const Tensor<T>& scores, std::size_t gold) {
  if (gold >= scores.size()) {
    throw ContractError("gold index " + std::to_string(gold) + " out of range for " +
                        std::to_string(scores.size()) + " candidates");
  }
  return sub(logsumexp(scores), pick(scores, gold));
}

template <typename T>
Tensor<T> selection_loss(const ScoredQuestion<T>& question, const Tensor<T>& head) {
  if (question.candidates.size() < 2) throw ContractError("a question needs at least 2 candidates");
  if (question.gold >= question.candidates.size()) {
    throw ContractError("gold index " + std::to_string(question.gold) + " out of range");
  }
  return selection_loss_from_scores(candidate_scores(question.candidates, head), question.gold);
}

template <typename T>
Tensor<T> mean(const std::vector<Tensor<T>>& scalars) {
  if (scalars.empty()) throw ContractError("mean of an empty batch");
  if (scalars.size() == 1) return scalars.front();
  return scale(add_n(scalars), T(1) / static_cast<T>(scalars.size()));
}

template <typename T>
Tensor<T> selection_loss(const QuestionBatch<T>& batch, const Tensor<T>& head) {
  std::vector<Tensor<T>> losses;
  losses.reserve(batch.size());
  for (const auto& q : batch) losses.push_back(selection_loss(q, head));
  return mean(losses);
}

template <typename T>
Tensor<T> contrastive_loss(const ContrastiveViews<T>& views) {
  if (!(views.temperature > 0.0)) throw ConfigError("temperature must be positive");
  const T inv_tau = T(1) / static_cast<T>(views.temperature);
  std::vector<Tensor<T>> logits;
  logits.push_back(reshape(cosine(views.anchor, views.positive), {1}));
  for (const auto& n : views.negatives) logits.push_back(reshape(cosine(views.anchor, n), {1}));
  const auto z = scale(concat(logits), inv_tau);
  return sub(logsumexp(z), pick(z, 0));
}

template <typename T>
Tensor<T> joint_loss(const Tensor<T>& selection, const Tensor<T>& contrastive, double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("lambda_cr must be non-negative");
  return add(selection, scale(contrastive, static_cast<T>(lambda)));
}

Strategy parse_strategy(const std::string& name) {
  if (name == "joint") return Strategy::joint;
  if (name == "pretrain") return Strategy::pretrain;
  if (name == "alternate") return Strategy::alternate;
  throw ConfigError("unknown training strategy '" + name + "'");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::joint: return "joint";
    case Strategy::pretrain: return "pretrain";
    case Strategy::alternate: return "alternate";
  }
  return "?";
}

std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::joint: return "joint";
    case LossKind::selection: return "TM";
    case LossKind::contrastive: return "CR";
  }
  return "?";
}

void Schedule::validate() const {
  if (strategy == Strategy::alternate && n_t < 2) {
    throw ConfigError("alternate strategy needs n_t >= 2, got " + std::to_string(n_t));
  }
}

LossKind Schedule::at(std::size_t step) const {
  switch (strategy) {
    case Strategy::joint: return LossKind::joint;
    case Strategy::pretrain:
      return step < pretrain_steps ? LossKind::contrastive : LossKind::selection;
    case Strategy::alternate:
      return (step % n_t) == n_t - 1 ? LossKind::contrastive : LossKind::selection;
  }
  return LossKind::joint;
}

#define CTM_INSTANTIATE_OBJECTIVES(T)                                                         \
  template Tensor<T> candidate_scores(const std::vector<Tensor<T>>&, const Tensor<T>&);       \
  template Tensor<T> selection_loss_from_scores(const Tensor<T>&, std::size_t);               \
  template Tensor<T> selection_loss(const ScoredQuestion<T>&, const Tensor<T>&);              \
  template Tensor<T> selection_loss(const QuestionBatch<T>&, const Tensor<T>&);               \
  template Tensor<T> contrastive_loss(const ContrastiveViews<T>&);                            \
  template Tensor<T> joint_loss(const Tensor<T>&, const Tensor<T>&, double);                  \
  template Tensor<T> mean(const std::vector<Tensor<T>>&);

CTM_INSTANTIATE_OBJECTIVES(float)
CTM_INSTANTIATE_OBJECTIVES(double)

}  // namespace ctm
