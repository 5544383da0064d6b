#include "ctm/vocab.hpp"

#include <algorithm>
#include <map>

#include "ctm/errors.hpp"
#include "ctm/tokenize.hpp"

namespace ctm {

Vocab::Vocab() {
  tokens_ = {std::string(kPadToken), std::string(kUnkToken), std::string(kTurnToken)};
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

Vocab Vocab::build(std::span<const Tokens> corpus) {
  std::map<std::string, std::size_t> counts;
  for (const auto& seq : corpus)
    for (const auto& t : seq) ++counts[t];
  std::vector<std::pair<std::string, std::size_t>> ordered(counts.begin(), counts.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocab v;
  for (auto& [tok, n] : ordered) {
    if (v.index_.count(tok)) continue;
    v.index_.emplace(tok, v.tokens_.size());
    v.tokens_.push_back(tok);
  }
  return v;
}

Vocab Vocab::build(std::span<const McqaExample> examples) {
  std::vector<Tokens> corpus;
  for (const auto& ex : examples) {
    corpus.push_back(ex.passage);
    corpus.push_back(ex.question);
    for (const auto& o : ex.options) corpus.push_back(o);
  }
  return build(corpus);
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
  Vocab reference;
  if (tokens.size() < kReserved ||
      !std::equal(reference.tokens_.begin(), reference.tokens_.end(), tokens.begin())) {
    throw FormatError("vocabulary does not start with the reserved tokens");
  }
  Vocab v;
  v.tokens_ = std::move(tokens);
  v.index_.clear();
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], i).second) {
      throw FormatError("duplicate vocabulary token '" + v.tokens_[i] + "'");
    }
  }
  return v;
}

std::size_t Vocab::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::size_t> Vocab::ids(std::span<const std::string> tokens) const {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

}  // namespace ctm
