#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ctm/baselines.hpp"
#include "ctm/config.hpp"
#include "ctm/encoder.hpp"
#include "ctm/example.hpp"
#include "ctm/matching.hpp"

namespace ctm {

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

// Encoder + matcher + selection head. Produces one representation C_i per
// candidate and the scores s_i = C_i . w.
template <typename T>
class CtmModel {
 public:
  /// Toy encoder over vocab; every table and matrix is drawn from init.
  CtmModel(CtmConfig config, Vocab vocab, RngState& init);
  /// Fixed external encoder; only the matcher and head are trainable.
  CtmModel(CtmConfig config, std::shared_ptr<const Encoder<T>> encoder, RngState& init);

  const CtmConfig& config() const { return config_; }
  /// Null when an external encoder is in use.
  const Vocab* vocab() const { return toy_ ? &toy_->vocab() : nullptr; }
  ToyEncoder<T>* toy_encoder() { return toy_.get(); }
  std::size_t representation_size() const;

  /// C_i for every option. Passage and question are encoded once and shared
  /// by all candidates of the call.
  std::vector<Tensor<T>> represent(const McqaExample& ex, RngState& rng, bool training) const;
  /// C for one option with its own encoding pass (used for the second
  /// dropout view of the gold candidate).
  Tensor<T> represent_candidate(const McqaExample& ex, std::size_t option, RngState& rng,
                                bool training) const;
  Tensor<T> scores(const McqaExample& ex, RngState& rng, bool training) const;

  /// Trainable tensors in a stable order; aliased tensors appear once.
  std::vector<NamedTensor<T>> parameters() const;
  const Tensor<T>& head() const { return head_; }

 private:
  void init_matcher(RngState& init);
  Tensor<T> match(const McqaExample& ex, std::size_t option, const Tensor<T>& passage,
                  const Tensor<T>& question, RngState& rng, bool training) const;

  CtmConfig config_;
  std::shared_ptr<ToyEncoder<T>> toy_;
  std::shared_ptr<const Encoder<T>> encoder_;
  TripleParams<T> triple_;
  DcmnParams<T> dcmn_;
  CoMatchParams<T> co_;
  CnnMatchParams<T> cnn_;
  Tensor<T> head_;
};

}  // namespace ctm
