#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctm/tensor.hpp"

namespace ctm {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First and second moments for one tensor.
template <typename T>
struct AdamMoments {
  std::vector<T> m;
  std::vector<T> v;
};

/// One bias-corrected Adam update at 1-based step t. Throws ContractError
/// when the moments or gradient disagree with the parameter in length.
template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamMoments<T>& state,
               std::size_t t, const AdamHyper& hyper);

template <typename T>
class Adam {
 public:
  Adam(std::vector<Tensor<T>> params, AdamHyper hyper);

  /// Applies the accumulated gradients; tensors never reached by backward
  /// count as zero gradient.
  void step();
  void zero_grad();
  std::size_t steps() const { return t_; }

 private:
  std::vector<Tensor<T>> params_;
  std::vector<AdamMoments<T>> state_;
  AdamHyper hyper_;
  std::size_t t_ = 0;
};

/// Rescales all gradients so their joint L2 norm is at most max_norm.
/// Returns the norm before clipping.
template <typename T>
double clip_grad_norm(std::vector<Tensor<T>>& params, double max_norm);

}  // namespace ctm
