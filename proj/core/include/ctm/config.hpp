#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctm/matching.hpp"
#include "ctm/objectives.hpp"

namespace ctm {

enum class Matcher { triple, dcmn, co, cnn };

Matcher parse_matcher(const std::string& name);
std::string to_string(Matcher m);

// All hyperparameters. Serialized as flat JSON using these field names.
struct CtmConfig {
  std::size_t hidden_dim = 32;
  double dropout = 0.1;
  double tau = 0.07;
  double lambda_cr = 0.5;
  double learning_rate = 1e-3;
  std::size_t batch_size = 4;
  std::size_t epochs = 3;
  std::size_t max_len = 360;
  std::size_t window_stride = 0;  // 0 means max_len / 2
  Strategy strategy = Strategy::joint;
  std::size_t n_t = 2;
  std::size_t pretrain_steps = 0;
  bool share_branch_weights = false;
  BranchSet branches = BranchSet::all();
  Matcher matcher = Matcher::triple;
  std::uint64_t seed = 1;
  double grad_clip = 1.0;
  bool record_time = true;
  std::string embeddings;  // precomputed-embedding archive; empty for the toy encoder

  std::size_t stride() const { return window_stride == 0 ? std::max<std::size_t>(1, max_len / 2) : window_stride; }
  Schedule schedule() const { return {strategy, n_t, pretrain_steps}; }
  /// Throws ConfigError naming the offending field.
  void validate() const;

  std::string to_json() const;
  /// Unknown keys are a ConfigError; missing keys keep their defaults.
  static CtmConfig from_json(const std::string& text);
  static CtmConfig load(const std::filesystem::path& path);

  /// Labels of fields that differ in model shape (hidden_dim, branches,
  /// matcher, share_branch_weights, max_len).
  std::vector<std::string> architecture_mismatches(const CtmConfig& other) const;
};

}  // namespace ctm
