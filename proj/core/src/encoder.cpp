#include "ctm/encoder.hpp"

#include <numeric>

#include "ctm/archive.hpp"
#include "ctm/errors.hpp"
#include "ctm/ops.hpp"

namespace ctm {

std::string Field::key() const {
  switch (kind) {
    case Kind::passage: return "p";
    case Kind::question: return "q";
    case Kind::option: return "a" + std::to_string(option);
    case Kind::question_option: return "qa" + std::to_string(option);
  }
  return "?";
}

Tokens field_tokens(const McqaExample& ex, const Field& field) {
  switch (field.kind) {
    case Field::Kind::passage: return ex.passage;
    case Field::Kind::question: return ex.question;
    case Field::Kind::option: return ex.options.at(field.option);
    case Field::Kind::question_option: {
      Tokens joint = ex.question;
      const auto& opt = ex.options.at(field.option);
      joint.insert(joint.end(), opt.begin(), opt.end());
      return joint;
    }
  }
  return {};
}

namespace {

template <typename T>
Tensor<T> uniform_table(std::size_t rows, std::size_t cols, RngState& rng) {
  std::vector<T> data(rows * cols);
  for (auto& v : data) v = static_cast<T>(rng.uniform(-0.1, 0.1));
  return Tensor<T>({rows, cols}, std::move(data), true);
}

}  // namespace

template <typename T>
ToyEncoder<T>::ToyEncoder(Vocab vocab, std::size_t hidden_dim, std::size_t max_len,
                          double dropout, RngState& init)
    : vocab_(std::move(vocab)), dropout_(dropout) {
  if (hidden_dim == 0 || max_len == 0) throw ConfigError("encoder sizes must be positive");
  token_table_ = uniform_table<T>(vocab_.size(), hidden_dim, init);
  position_table_ = uniform_table<T>(max_len, hidden_dim, init);
}

template <typename T>
ToyEncoder<T>::ToyEncoder(Vocab vocab, Tensor<T> token_table, Tensor<T> position_table,
                          double dropout)
    : vocab_(std::move(vocab)),
      token_table_(std::move(token_table)),
      position_table_(std::move(position_table)),
      dropout_(dropout) {
  if (token_table_.rows() != vocab_.size()) {
    throw DimensionError("token table has " + std::to_string(token_table_.rows()) +
                         " rows for a vocabulary of " + std::to_string(vocab_.size()));
  }
  if (token_table_.cols() != position_table_.cols()) {
    throw DimensionError("token and position tables disagree on hidden size");
  }
}

template <typename T>
Tensor<T> ToyEncoder<T>::encode(const McqaExample& ex, const Field& field, RngState& rng,
                                bool training) const {
  const Tokens tokens = field_tokens(ex, field);
  return encode_tokens(tokens, rng, training);
}

template <typename T>
Tensor<T> ToyEncoder<T>::encode_tokens(std::span<const std::string> tokens, RngState& rng,
                                       bool training) const {
  const auto ids = vocab_.ids(tokens);
  return encode_ids(ids, rng, training);
}

template <typename T>
Tensor<T> ToyEncoder<T>::encode_ids(std::span<const std::size_t> ids, RngState& rng,
                                    bool training) const {
  if (ids.empty()) throw ContractError("encode: empty token sequence");
  const auto m = std::min(ids.size(), max_len());
  auto rows = gather_rows(token_table_, ids.first(m));
  auto positions = head_rows(position_table_, m);
  return dropout(add(rows, positions), dropout_, rng, training);
}

template <typename T>
PrecomputedEncoder<T> PrecomputedEncoder<T>::load(const std::filesystem::path& path,
                                                  std::size_t hidden_dim) {
  const auto archive = read_archive(path);
  PrecomputedEncoder enc(hidden_dim);
  for (const auto& rec : archive.tensors) {
    if (rec.shape.size() != 2 || rec.shape[1] != hidden_dim) {
      throw DimensionError("embedding record '" + rec.name + "' has shape " + to_string(rec.shape) +
                           ", expected [m x " + std::to_string(hidden_dim) + "]");
    }
    std::vector<T> data(rec.data.begin(), rec.data.end());
    enc.table_.emplace(rec.name, Tensor<T>(rec.shape, std::move(data)));
  }
  return enc;
}

template <typename T>
void PrecomputedEncoder<T>::insert(const std::string& example_id, const Field& field,
                                   Tensor<T> matrix) {
  if (matrix.rank() != 2 || matrix.cols() != hidden_dim_) {
    throw DimensionError("embedding for " + example_id + "/" + field.key() + " has shape " +
                         to_string(matrix.shape()));
  }
  table_.insert_or_assign(example_id + "/" + field.key(), std::move(matrix));
}

template <typename T>
Tensor<T> PrecomputedEncoder<T>::encode(const McqaExample& ex, const Field& field, RngState&,
                                        bool) const {
  const std::string key = ex.id + "/" + field.key();
  if (auto it = table_.find(key); it != table_.end()) return it->second;
  if (field.kind == Field::Kind::question_option) {
    RngState unused;
    return vstack<T>({encode(ex, Field::question(), unused, false),
                      encode(ex, Field::answer(field.option), unused, false)});
  }
  throw ContractError("no precomputed embedding for " + key);
}

template class ToyEncoder<float>;
template class ToyEncoder<double>;
template class PrecomputedEncoder<float>;
template class PrecomputedEncoder<double>;

}  // namespace ctm
