#include "ctm/tokenize.hpp"

#include <cctype>

#include "ctm/errors.hpp"

namespace ctm {

namespace {

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

void split_word(std::string word, Tokens& out) {
  std::size_t begin = 0, end = word.size();
  while (begin < end && is_punct(word[begin])) ++begin;
  if (begin == end) {
    out.push_back(std::move(word));
    return;
  }
  while (end > begin && is_punct(word[end - 1])) --end;
  for (std::size_t i = 0; i < begin; ++i) out.emplace_back(1, word[i]);
  out.push_back(word.substr(begin, end - begin));
  for (std::size_t i = end; i < word.size(); ++i) out.emplace_back(1, word[i]);
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string word;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!word.empty()) split_word(std::move(word), out);
      word.clear();
    } else {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!word.empty()) split_word(std::move(word), out);
  if (out.empty() && !text.empty()) out.emplace_back(kUnkToken);
  return out;
}

void validate(const McqaExample& ex) {
  if (ex.options.size() < 2) throw ContractError(ex.id + ": fewer than 2 options");
  if (ex.gold >= ex.options.size()) throw ContractError(ex.id + ": gold index out of range");
  if (ex.question.empty()) throw ContractError(ex.id + ": empty question");
  if (ex.passage.empty()) throw ContractError(ex.id + ": empty passage");
  for (const auto& o : ex.options) {
    if (o.empty()) throw ContractError(ex.id + ": empty option");
  }
}

}  // namespace ctm
