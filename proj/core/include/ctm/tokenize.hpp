#pragma once

#include <string_view>

#include "ctm/example.hpp"

namespace ctm {

inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kTurnToken = "[SEP]";

// Lowercases, splits on whitespace, then peels leading and trailing
// punctuation off each word as single-character tokens. A word made only of
// punctuation ("?", "_____", "...") stays one token. Non-empty input never
// yields an empty list.
Tokens tokenize(std::string_view text);

}  // namespace ctm
