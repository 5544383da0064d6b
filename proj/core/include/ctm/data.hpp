#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctm/example.hpp"

namespace ctm {

enum class DataFormat { race, dream, synth };

DataFormat parse_data_format(const std::string& name);

/// RACE JSON: {article, questions[], options[][], answers[] (letters), id}.
/// A file may also hold an array of such objects. Every question must have
/// exactly expected_options options. Errors name the file and question.
std::vector<McqaExample> parse_race(const std::filesystem::path& path,
                                    std::size_t expected_options = 4);
std::vector<McqaExample> parse_race_text(const std::string& json, const std::string& source,
                                         std::size_t expected_options = 4);

/// DREAM JSON: [[turns...], [{question, choice[3], answer}...], id] records.
/// Turns are joined with the turn separator token; the answer must match
/// exactly one choice.
std::vector<McqaExample> parse_dream(const std::filesystem::path& path);
std::vector<McqaExample> parse_dream_text(const std::string& json, const std::string& source);

/// Examples of one split: `<dir>/<split>/` (all .json/.txt files, sorted,
/// recursive) or `<dir>/<split>.json`. synth data uses the RACE layout.
std::vector<McqaExample> load_split(const std::filesystem::path& dir, DataFormat format,
                                    const std::string& split, std::size_t options = 4);

/// Serializes examples as a RACE-format JSON array, one object per question.
void write_race(const std::filesystem::path& path, const std::vector<McqaExample>& examples);

struct Window {
  std::size_t start = 0;
  Tokens tokens;
};

/// Windows begin at 0, stride, 2*stride, ... and a final window is aligned
/// to the end so the last token is covered. Requires max_len >= 1 and
/// 1 <= stride <= max_len.
std::vector<std::size_t> window_starts(std::size_t length, std::size_t max_len, std::size_t stride);
std::vector<Window> sliding_window(const Tokens& tokens, std::size_t max_len, std::size_t stride);

/// Splits long passages into windowed instances. A passage that fits is
/// passed through unchanged; otherwise each window gets id "<id>@w<k>" and
/// parent_id set to the original id.
std::vector<McqaExample> window_examples(const std::vector<McqaExample>& examples,
                                         std::size_t max_len, std::size_t stride);

enum class QuestionTag { what, which, cloze, other };

std::string to_string(QuestionTag tag);
/// cloze if any token is a run of underscores; otherwise decided by the first
/// interrogative word (what / which / anything else).
QuestionTag tag_question(const Tokens& question);

struct SynthSpec {
  std::size_t questions = 32;
  std::size_t options = 4;
  std::size_t vocab_size = 64;  // content words
  std::size_t keywords = 16;    // ids reserved for keywords
  std::size_t filler_sentences = 3;
  std::size_t sentence_length = 4;
  std::size_t option_length = 2;
  std::uint64_t seed = 7;
};

// Keyword-lookup corpus. The first `keywords` content words are keywords,
// the rest filler. Each passage is filler sentences plus one sentence
// "the key is <k> ."; the question asks for the key. The correct option
// contains k and otherwise filler; distractors are filler words that occur
// nowhere in the passage. Gold positions are balanced: each block of n
// questions uses every index once.
std::vector<McqaExample> synth_dataset(const SynthSpec& spec);

}  // namespace ctm
