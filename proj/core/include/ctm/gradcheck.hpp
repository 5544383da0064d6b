#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ctm/tensor.hpp"

namespace ctm {

struct GradCheckEntry {
  std::string name;
  std::size_t coordinates = 0;
  double worst_error = 0.0;
  std::size_t worst_index = 0;
  double autodiff = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double worst_error = 0.0;
};

using NamedParam = std::pair<std::string, Tensor<double>>;

/// |a - b| / max(1e-8, |a| + |b|)
double gradient_relative_error(double autodiff, double numeric);

// Compares reverse-mode gradients of f against central differences
// (f(x + eps) - f(x - eps)) / 2eps, coordinate by coordinate. f must rebuild
// its graph from the current parameter values on every call and be
// deterministic (fixed dropout seeds). Parameter values are restored.
GradCheckReport finite_diff_check(const std::function<Tensor<double>()>& f,
                                  std::vector<NamedParam> params, double eps);

}  // namespace ctm
