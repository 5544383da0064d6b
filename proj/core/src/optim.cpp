#include "ctm/optim.hpp"

#include <cmath>

#include "ctm/errors.hpp"

namespace ctm {

template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamMoments<T>& state,
               std::size_t t, const AdamHyper& hyper) {
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(params.size(), T(0));
    state.v.assign(params.size(), T(0));
  }
  if (state.m.size() != params.size() || state.v.size() != params.size() ||
      (!grads.empty() && grads.size() != params.size())) {
    throw ContractError("adam_step: state or gradient length does not match parameter");
  }
  if (t == 0) throw ContractError("adam_step: step counter is 1-based");
  const T b1 = static_cast<T>(hyper.beta1), b2 = static_cast<T>(hyper.beta2);
  const T c1 = T(1) - static_cast<T>(std::pow(hyper.beta1, static_cast<double>(t)));
  const T c2 = T(1) - static_cast<T>(std::pow(hyper.beta2, static_cast<double>(t)));
  const T lr = static_cast<T>(hyper.lr), eps = static_cast<T>(hyper.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const T g = grads.empty() ? T(0) : grads[i];
    state.m[i] = b1 * state.m[i] + (T(1) - b1) * g;
    state.v[i] = b2 * state.v[i] + (T(1) - b2) * g * g;
    const T m_hat = state.m[i] / c1;
    const T v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

template <typename T>
Adam<T>::Adam(std::vector<Tensor<T>> params, AdamHyper hyper)
    : params_(std::move(params)), state_(params_.size()), hyper_(hyper) {}

template <typename T>
void Adam<T>::step() {
  ++t_;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    adam_step<T>(params_[k].mutable_data(), params_[k].grad(), state_[k], t_, hyper_);
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

template <typename T>
double clip_grad_norm(std::vector<Tensor<T>>& params, double max_norm) {
  double total = 0.0;
  for (auto& p : params)
    for (T g : p.grad()) total += static_cast<double>(g) * static_cast<double>(g);
  const double norm = std::sqrt(total);
  if (norm > max_norm) {
    const T factor = static_cast<T>(max_norm / norm);
    for (auto& p : params) {
      if (p.grad().empty()) continue;
      for (T& g : p.mutable_grad()) g *= factor;
    }
  }
  return norm;
}

template void adam_step(std::span<float>, std::span<const float>, AdamMoments<float>&, std::size_t,
                        const AdamHyper&);
template void adam_step(std::span<double>, std::span<const double>, AdamMoments<double>&,
                        std::size_t, const AdamHyper&);
template class Adam<float>;
template class Adam<double>;
template double clip_grad_norm(std::vector<Tensor<float>>&, double);
template double clip_grad_norm(std::vector<Tensor<double>>&, double);

}  // namespace ctm
