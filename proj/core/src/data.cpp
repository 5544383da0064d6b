#include "ctm/data.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ctm/errors.hpp"
#include "ctm/rng.hpp"
#include "ctm/tokenize.hpp"

namespace ctm {

using nlohmann::json;

DataFormat parse_data_format(const std::string& name) {
  if (name == "race") return DataFormat::race;
  if (name == "dream") return DataFormat::dream;
  if (name == "synth") return DataFormat::synth;
  throw ConfigError("unknown data format '" + name + "' (expected race, dream or synth)");
}

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(path.string() + ": cannot open");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": malformed JSON: " + e.what());
  }
}

std::string where(const std::string& source, std::size_t question) {
  return source + ": question " + std::to_string(question);
}

const json& field(const json& obj, const char* name, const std::string& source) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw ParseError(source + ": missing field '" + name + "'");
  }
  return obj.at(name);
}

std::string string_of(const json& v, const std::string& context) {
  if (!v.is_string()) throw ParseError(context + ": expected a string");
  return v.get<std::string>();
}

void parse_race_record(const json& rec, const std::string& source, std::size_t expected_options,
                       std::vector<McqaExample>& out) {
  const std::string id = string_of(field(rec, "id", source), source + ": id");
  const Tokens passage = tokenize(string_of(field(rec, "article", source), source + ": article"));
  const auto& questions = field(rec, "questions", source);
  const auto& options = field(rec, "options", source);
  const auto& answers = field(rec, "answers", source);
  if (!questions.is_array() || !options.is_array() || !answers.is_array()) {
    throw ParseError(source + ": questions, options and answers must be arrays");
  }
  if (questions.size() != options.size() || questions.size() != answers.size()) {
    throw ParseError(source + ": questions, options and answers differ in length");
  }
  if (passage.empty()) throw ParseError(source + ": empty article");
  for (std::size_t qi = 0; qi < questions.size(); ++qi) {
    const std::string loc = where(source, qi);
    McqaExample ex;
    ex.id = id + "#" + std::to_string(qi);
    ex.passage = passage;
    ex.question = tokenize(string_of(questions[qi], loc));
    if (ex.question.empty()) throw ParseError(loc + ": empty question");
    if (!options[qi].is_array() || options[qi].size() != expected_options) {
      throw ParseError(loc + ": expected " + std::to_string(expected_options) + " options");
    }
    for (const auto& o : options[qi]) {
      ex.options.push_back(tokenize(string_of(o, loc + " option")));
      if (ex.options.back().empty()) throw ParseError(loc + ": empty option");
    }
    const std::string letter = string_of(answers[qi], loc + " answer");
    if (letter.size() != 1 || letter[0] < 'A' ||
        static_cast<std::size_t>(letter[0] - 'A') >= expected_options) {
      throw ParseError(loc + ": answer letter '" + letter + "' out of range");
    }
    ex.gold = static_cast<std::size_t>(letter[0] - 'A');
    out.push_back(std::move(ex));
  }
}

}  // namespace

std::vector<McqaExample> parse_race_text(const std::string& text, const std::string& source,
                                         std::size_t expected_options) {
  const json doc = parse_json(text, source);
  std::vector<McqaExample> out;
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      parse_race_record(doc[i], source + "[" + std::to_string(i) + "]", expected_options, out);
    }
  } else {
    parse_race_record(doc, source, expected_options, out);
  }
  return out;
}

std::vector<McqaExample> parse_race(const std::filesystem::path& path,
                                    std::size_t expected_options) {
  return parse_race_text(read_text(path), path.string(), expected_options);
}

std::vector<McqaExample> parse_dream_text(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (!doc.is_array()) throw ParseError(source + ": expected a top-level array");
  std::vector<McqaExample> out;
  for (std::size_t di = 0; di < doc.size(); ++di) {
    const std::string dsrc = source + "[" + std::to_string(di) + "]";
    const json& rec = doc[di];
    if (!rec.is_array() || rec.size() != 3 || !rec[0].is_array() || !rec[1].is_array()) {
      throw ParseError(dsrc + ": expected [turns, questions, id]");
    }
    const std::string id = string_of(rec[2], dsrc + ": id");
    Tokens passage;
    for (std::size_t t = 0; t < rec[0].size(); ++t) {
      if (t > 0) passage.emplace_back(kTurnToken);
      const Tokens turn = tokenize(string_of(rec[0][t], dsrc + ": turn"));
      passage.insert(passage.end(), turn.begin(), turn.end());
    }
    if (passage.empty()) throw ParseError(dsrc + ": empty dialogue");
    for (std::size_t qi = 0; qi < rec[1].size(); ++qi) {
      const std::string loc = where(dsrc, qi);
      const json& q = rec[1][qi];
      McqaExample ex;
      ex.id = id + "#" + std::to_string(qi);
      ex.passage = passage;
      ex.question = tokenize(string_of(field(q, "question", loc), loc));
      if (ex.question.empty()) throw ParseError(loc + ": empty question");
      const json& choices = field(q, "choice", loc);
      if (!choices.is_array() || choices.size() != 3) throw ParseError(loc + ": expected 3 choices");
      const std::string answer = string_of(field(q, "answer", loc), loc + " answer");
      std::size_t matches = 0;
      for (std::size_t c = 0; c < choices.size(); ++c) {
        const std::string text_c = string_of(choices[c], loc + " choice");
        ex.options.push_back(tokenize(text_c));
        if (ex.options.back().empty()) throw ParseError(loc + ": empty choice");
        if (text_c == answer) {
          ex.gold = c;
          ++matches;
        }
      }
      if (matches == 0) throw ParseError(loc + ": answer \"" + answer + "\" is not among the choices");
      if (matches > 1) throw ParseError(loc + ": answer \"" + answer + "\" matches several choices");
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<McqaExample> parse_dream(const std::filesystem::path& path) {
  return parse_dream_text(read_text(path), path.string());
}

std::vector<McqaExample> load_split(const std::filesystem::path& dir, DataFormat format,
                                    const std::string& split, std::size_t options) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  const fs::path sub = dir / split;
  if (fs::is_directory(sub)) {
    for (const auto& entry : fs::recursive_directory_iterator(sub)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".json" || ext == ".txt")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(dir / (split + ".json"))) {
    files.push_back(dir / (split + ".json"));
  } else {
    throw ParseError("no '" + split + "' split under " + dir.string());
  }
  std::vector<McqaExample> out;
  for (const auto& f : files) {
    auto part = format == DataFormat::dream ? parse_dream(f) : parse_race(f, options);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

namespace {

std::string join(const Tokens& tokens) {
  std::string s;
  for (const auto& t : tokens) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

}  // namespace

void write_race(const std::filesystem::path& path, const std::vector<McqaExample>& examples) {
  json doc = json::array();
  for (const auto& ex : examples) {
    json options = json::array();
    for (const auto& o : ex.options) options.push_back(join(o));
    doc.push_back({{"id", ex.id},
                   {"article", join(ex.passage)},
                   {"questions", json::array({join(ex.question)})},
                   {"options", json::array({options})},
                   {"answers", json::array({std::string(1, static_cast<char>('A' + ex.gold))})}});
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << doc.dump(1) << '\n';
}

std::vector<std::size_t> window_starts(std::size_t length, std::size_t max_len, std::size_t stride) {
  if (max_len == 0) throw ContractError("sliding_window: max_len must be >= 1");
  if (stride == 0 || stride > max_len) throw ContractError("sliding_window: need 1 <= stride <= max_len");
  if (length <= max_len) return {0};
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + max_len < length; s += stride) starts.push_back(s);
  const std::size_t last = length - max_len;
  if (starts.back() != last) starts.push_back(last);
  return starts;
}

std::vector<Window> sliding_window(const Tokens& tokens, std::size_t max_len, std::size_t stride) {
  std::vector<Window> out;
  for (std::size_t s : window_starts(tokens.size(), max_len, stride)) {
    const std::size_t end = std::min(tokens.size(), s + max_len);
    out.push_back({s, Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(s),
                             tokens.begin() + static_cast<std::ptrdiff_t>(end))});
  }
  return out;
}

std::vector<McqaExample> window_examples(const std::vector<McqaExample>& examples,
                                         std::size_t max_len, std::size_t stride) {
  std::vector<McqaExample> out;
  for (const auto& ex : examples) {
    if (ex.passage.size() <= max_len) {
      out.push_back(ex);
      continue;
    }
    const auto windows = sliding_window(ex.passage, max_len, stride);
    for (std::size_t k = 0; k < windows.size(); ++k) {
      McqaExample w = ex;
      w.passage = windows[k].tokens;
      w.parent_id = ex.id;
      w.window_index = k;
      w.id = ex.id + "@w" + std::to_string(k);
      out.push_back(std::move(w));
    }
  }
  return out;
}

std::string to_string(QuestionTag tag) {
  switch (tag) {
    case QuestionTag::what: return "what";
    case QuestionTag::which: return "which";
    case QuestionTag::cloze: return "cloze";
    case QuestionTag::other: return "other";
  }
  return "?";
}

QuestionTag tag_question(const Tokens& question) {
  for (const auto& t : question) {
    if (!t.empty() && t.find_first_not_of('_') == std::string::npos) return QuestionTag::cloze;
  }
  static const std::set<std::string> interrogatives = {"what", "which", "who",  "whom", "whose",
                                                       "when", "where", "why", "how"};
  for (const auto& t : question) {
    if (interrogatives.count(t)) {
      if (t == "what") return QuestionTag::what;
      if (t == "which") return QuestionTag::which;
      return QuestionTag::other;
    }
  }
  return QuestionTag::other;
}

std::vector<McqaExample> synth_dataset(const SynthSpec& spec) {
  if (spec.options < 2) throw ConfigError("synth: need at least 2 options");
  if (spec.option_length == 0 || spec.sentence_length == 0) throw ConfigError("synth: zero lengths");
  if (spec.keywords == 0 || spec.keywords >= spec.vocab_size) {
    throw ConfigError("synth: keywords must be in [1, vocab_size)");
  }
  // Ids [0, keywords) are keywords, the rest is filler vocabulary. Worst
  // case the filler sentences use distinct words, and every option token
  // except the keyword needs one more.
  const std::size_t plain = spec.vocab_size - spec.keywords;
  const std::size_t needed = spec.filler_sentences * spec.sentence_length + spec.options * spec.option_length - 1;
  if (plain < needed) {
    throw ConfigError("synth: vocab_size " + std::to_string(spec.vocab_size) + " too small, need " +
                      std::to_string(needed + spec.keywords));
  }
  RngState rng(spec.seed);
  std::vector<std::size_t> golds;
  std::vector<McqaExample> out;
  auto word = [](std::size_t i) { return "w" + std::to_string(i); };
  auto plain_word = [&]() { return spec.keywords + rng.below(plain); };

  for (std::size_t qi = 0; qi < spec.questions; ++qi) {
    if (golds.empty()) {
      golds.resize(spec.options);
      std::iota(golds.begin(), golds.end(), 0);
      for (std::size_t i = golds.size(); i > 1; --i) std::swap(golds[i - 1], golds[rng.below(i)]);
    }
    McqaExample ex;
    ex.id = "synth-" + std::to_string(spec.seed) + "-" + std::to_string(qi);
    ex.gold = golds.back();
    golds.pop_back();

    const std::size_t keyword = rng.below(spec.keywords);
    std::set<std::size_t> used{keyword};
    const std::size_t key_sentence = rng.below(spec.filler_sentences + 1);
    for (std::size_t s = 0; s <= spec.filler_sentences; ++s) {
      if (s == key_sentence) {
        for (const char* t : {"the", "key", "is"}) ex.passage.emplace_back(t);
        ex.passage.push_back(word(keyword));
      } else {
        for (std::size_t k = 0; k < spec.sentence_length; ++k) {
          const std::size_t w = plain_word();
          used.insert(w);
          ex.passage.push_back(word(w));
        }
      }
      ex.passage.emplace_back(".");
    }
    for (const char* t : {"what", "is", "the", "key", "?"}) ex.question.emplace_back(t);

    auto fresh = [&]() {
      std::size_t w = plain_word();
      while (used.count(w)) w = plain_word();
      used.insert(w);
      return w;
    };
    ex.options.resize(spec.options);
    for (std::size_t o = 0; o < spec.options; ++o) {
      if (o == ex.gold) continue;
      for (std::size_t k = 0; k < spec.option_length; ++k) ex.options[o].push_back(word(fresh()));
    }
    const std::size_t key_slot = rng.below(spec.option_length);
    for (std::size_t k = 0; k < spec.option_length; ++k) {
      ex.options[ex.gold].push_back(word(k == key_slot ? keyword : fresh()));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace ctm
