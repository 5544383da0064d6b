#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctm/example.hpp"

namespace ctm {

// Token <-> id map. Ids 0, 1 and 2 are reserved for padding, unknown and the
// dialogue turn separator.
class Vocab {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::size_t kTurn = 2;
  static constexpr std::size_t kReserved = 3;

  Vocab();

  /// Frequency-descending, ties broken lexicographically.
  static Vocab build(std::span<const Tokens> corpus);
  static Vocab build(std::span<const McqaExample> examples);
  /// Restores a vocabulary from its id-ordered token list (reserved included).
  static Vocab from_tokens(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  std::size_t id(const std::string& token) const;
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  std::vector<std::size_t> ids(std::span<const std::string> tokens) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace ctm
