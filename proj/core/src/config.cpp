#include "ctm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ctm/errors.hpp"

namespace ctm {

using nlohmann::json;

Matcher parse_matcher(const std::string& name) {
  if (name == "triple") return Matcher::triple;
  if (name == "dcmn") return Matcher::dcmn;
  if (name == "co") return Matcher::co;
  if (name == "cnn") return Matcher::cnn;
  throw ConfigError("unknown matcher '" + name + "' (expected triple, dcmn, co or cnn)");
}

std::string to_string(Matcher m) {
  switch (m) {
    case Matcher::triple: return "triple";
    case Matcher::dcmn: return "dcmn";
    case Matcher::co: return "co";
    case Matcher::cnn: return "cnn";
  }
  return "?";
}

void CtmConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
  if (hidden_dim == 0) fail("hidden_dim must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (!(tau > 0.0)) fail("tau must be positive");
  if (!(lambda_cr >= 0.0)) fail("lambda_cr must be non-negative");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (batch_size == 0) fail("batch_size must be positive");
  if (epochs == 0) fail("epochs must be positive");
  if (max_len == 0) fail("max_len must be positive");
  if (window_stride > max_len) fail("window_stride must not exceed max_len");
  if (branches.empty()) fail("branches must not be empty");
  if (!(grad_clip > 0.0)) fail("grad_clip must be positive");
  schedule().validate();
}

std::string CtmConfig::to_json() const {
  json j = {{"hidden_dim", hidden_dim},
            {"dropout", dropout},
            {"tau", tau},
            {"lambda_cr", lambda_cr},
            {"learning_rate", learning_rate},
            {"batch_size", batch_size},
            {"epochs", epochs},
            {"max_len", max_len},
            {"window_stride", window_stride},
            {"strategy", ctm::to_string(strategy)},
            {"n_t", n_t},
            {"pretrain_steps", pretrain_steps},
            {"share_branch_weights", share_branch_weights},
            {"branches", branches.to_string()},
            {"matcher", ctm::to_string(matcher)},
            {"seed", seed},
            {"grad_clip", grad_clip},
            {"record_time", record_time},
            {"embeddings", embeddings}};
  return j.dump();
}

CtmConfig CtmConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  CtmConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "hidden_dim") c.hidden_dim = value.get<std::size_t>();
      else if (key == "dropout") c.dropout = value.get<double>();
      else if (key == "tau") c.tau = value.get<double>();
      else if (key == "lambda_cr") c.lambda_cr = value.get<double>();
      else if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
      else if (key == "epochs") c.epochs = value.get<std::size_t>();
      else if (key == "max_len") c.max_len = value.get<std::size_t>();
      else if (key == "window_stride") c.window_stride = value.get<std::size_t>();
      else if (key == "strategy") c.strategy = parse_strategy(value.get<std::string>());
      else if (key == "n_t") c.n_t = value.get<std::size_t>();
      else if (key == "pretrain_steps") c.pretrain_steps = value.get<std::size_t>();
      else if (key == "share_branch_weights") c.share_branch_weights = value.get<bool>();
      else if (key == "branches") {
        if (value.is_array()) {
          std::string letters;
          for (const auto& b : value) letters += b.get<std::string>();
          c.branches = BranchSet::parse(letters);
        } else {
          c.branches = BranchSet::parse(value.get<std::string>());
        }
      } else if (key == "matcher") c.matcher = parse_matcher(value.get<std::string>());
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "grad_clip") c.grad_clip = value.get<double>();
      else if (key == "record_time") c.record_time = value.get<bool>();
      else if (key == "embeddings") c.embeddings = value.get<std::string>();
      else throw ConfigError("config: unknown field '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

CtmConfig CtmConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

std::vector<std::string> CtmConfig::architecture_mismatches(const CtmConfig& other) const {
  std::vector<std::string> out;
  if (hidden_dim != other.hidden_dim) out.push_back("hidden_dim");
  if (!(branches == other.branches)) out.push_back("branches");
  if (matcher != other.matcher) out.push_back("matcher");
  if (share_branch_weights != other.share_branch_weights) out.push_back("share_branch_weights");
  if (max_len != other.max_len) out.push_back("max_len");
  return out;
}

}  // namespace ctm
