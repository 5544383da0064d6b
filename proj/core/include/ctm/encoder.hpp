#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "ctm/example.hpp"
#include "ctm/rng.hpp"
#include "ctm/tensor.hpp"
#include "ctm/vocab.hpp"

namespace ctm {

// Which sequence of an example to encode. QuestionOption is the question
// followed by one option, used by the joint-encoding baseline.
struct Field {
  enum class Kind { passage, question, option, question_option };

  Kind kind = Kind::passage;
  std::size_t option = 0;

  static Field passage() { return {Kind::passage, 0}; }
  static Field question() { return {Kind::question, 0}; }
  static Field answer(std::size_t i) { return {Kind::option, i}; }
  static Field question_answer(std::size_t i) { return {Kind::question_option, i}; }

  /// "p", "q", "a<i>" or "qa<i>".
  std::string key() const;
};

Tokens field_tokens(const McqaExample& ex, const Field& field);

// Produces the [m x l] matrix of one sequence.
template <typename T>
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual std::size_t hidden_dim() const = 0;
  virtual Tensor<T> encode(const McqaExample& ex, const Field& field, RngState& rng,
                           bool training) const = 0;
};

// Token embedding plus learned position embedding, then dropout.
template <typename T>
class ToyEncoder final : public Encoder<T> {
 public:
  /// Tables drawn uniformly from [-0.1, 0.1] using init.
  ToyEncoder(Vocab vocab, std::size_t hidden_dim, std::size_t max_len, double dropout,
             RngState& init);
  ToyEncoder(Vocab vocab, Tensor<T> token_table, Tensor<T> position_table, double dropout);

  std::size_t hidden_dim() const override { return token_table_.cols(); }
  std::size_t max_len() const { return position_table_.rows(); }
  double dropout_rate() const { return dropout_; }
  const Vocab& vocab() const { return vocab_; }

  Tensor<T> encode(const McqaExample& ex, const Field& field, RngState& rng,
                   bool training) const override;
  /// Sequences longer than max_len are truncated; an empty sequence is a
  /// ContractError.
  Tensor<T> encode_tokens(std::span<const std::string> tokens, RngState& rng, bool training) const;
  Tensor<T> encode_ids(std::span<const std::size_t> ids, RngState& rng, bool training) const;

  Tensor<T>& token_table() { return token_table_; }
  Tensor<T>& position_table() { return position_table_; }
  const Tensor<T>& token_table() const { return token_table_; }
  const Tensor<T>& position_table() const { return position_table_; }

 private:
  Vocab vocab_;
  Tensor<T> token_table_;
  Tensor<T> position_table_;
  double dropout_ = 0.1;
};

// Serves externally computed contextual embeddings, keyed by
// "<example id>/<field key>". Nothing here is trainable.
template <typename T>
class PrecomputedEncoder final : public Encoder<T> {
 public:
  explicit PrecomputedEncoder(std::size_t hidden_dim) : hidden_dim_(hidden_dim) {}

  /// Reads an archive file; every record must be [m x hidden_dim].
  static PrecomputedEncoder load(const std::filesystem::path& path, std::size_t hidden_dim);

  void insert(const std::string& example_id, const Field& field, Tensor<T> matrix);
  std::size_t hidden_dim() const override { return hidden_dim_; }
  std::size_t size() const { return table_.size(); }

  /// A question_option field falls back to stacking the stored question and
  /// option matrices when no joint record exists.
  Tensor<T> encode(const McqaExample& ex, const Field& field, RngState& rng,
                   bool training) const override;

 private:
  std::size_t hidden_dim_;
  std::map<std::string, Tensor<T>> table_;
};

}  // namespace ctm
