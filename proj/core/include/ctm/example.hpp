#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ctm {

using Tokens = std::vector<std::string>;

// One multiple-choice question over a passage.
struct McqaExample {
  std::string id;
  Tokens passage;
  Tokens question;
  std::vector<Tokens> options;
  std::size_t gold = 0;

  // Set when this instance is one sliding window of a longer passage.
  std::string parent_id;
  std::size_t window_index = 0;

  const std::string& group_id() const { return parent_id.empty() ? id : parent_id; }
};

/// Throws ContractError unless n >= 2, gold < n and every option and the
/// question are non-empty.
void validate(const McqaExample& ex);

}  // namespace ctm
