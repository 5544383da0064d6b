#include "ctm/baselines.hpp"

#include <cmath>

#include "ctm/errors.hpp"
#include "ctm/ops.hpp"

namespace ctm {

namespace {

template <typename T>
Tensor<T> glorot(std::size_t rows, std::size_t cols, RngState& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::vector<T> data(rows * cols);
  for (auto& v : data) v = static_cast<T>(rng.uniform(-bound, bound));
  return Tensor<T>({rows, cols}, std::move(data), true);
}

template <typename T>
Tensor<T> pooled_attend(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& W, RngState& rng,
                        DropoutSpec drop) {
  return max_pool_rows(dropout(attend(x, y, y, W), drop.rate, rng, drop.training));
}

}  // namespace

template <typename T>
GateParams<T> GateParams<T>::random(std::size_t hidden_dim, RngState& rng) {
  return {glorot<T>(hidden_dim, 2 * hidden_dim, rng), Tensor<T>::zeros({hidden_dim}, true)};
}

template <typename T>
Tensor<T> gated_fusion(const Tensor<T>& u, const Tensor<T>& v, const GateParams<T>& gate) {
  if (u.rank() != 1 || u.shape() != v.shape()) {
    throw DimensionError("gated_fusion: operands " + to_string(u.shape()) + " and " +
                         to_string(v.shape()));
  }
  const std::size_t l = u.size();
  const auto joint = reshape(concat<T>({u, v}), {2 * l, 1});
  const auto g = sigmoid(add(flatten(matmul(gate.W, joint)), gate.b));
  return add(mul(g, u), mul(one_minus(g), v));
}

template <typename T>
DcmnParams<T> DcmnParams<T>::random(std::size_t hidden_dim, RngState& rng) {
  DcmnParams p;
  p.att_qa = glorot<T>(hidden_dim, hidden_dim, rng);
  p.att_qp = glorot<T>(hidden_dim, hidden_dim, rng);
  p.att_ap = glorot<T>(hidden_dim, hidden_dim, rng);
  for (auto& g : p.gates) g = GateParams<T>::random(hidden_dim, rng);
  return p;
}

template <typename T>
Tensor<T> dcmn_dual_match(const EncodedTriple<T>& enc, const DcmnParams<T>& params,
                          RngState& rng, DropoutSpec drop) {
  const auto M_qa = pooled_attend(enc.question, enc.answer, params.att_qa, rng, drop);
  const auto M_qp = pooled_attend(enc.question, enc.passage, params.att_qp, rng, drop);
  const auto M_ap = pooled_attend(enc.answer, enc.passage, params.att_ap, rng, drop);
  return concat<T>({gated_fusion(M_qa, M_ap, params.gates[0]),
                    gated_fusion(M_qp, M_ap, params.gates[1]),
                    gated_fusion(M_qa, M_qp, params.gates[2])});
}

template <typename T>
Tensor<T> similarity(const Tensor<T>& u, const Tensor<T>& v, const Tensor<T>& projection) {
  return matmul(hstack<T>({mul(u, v), abs(sub(u, v))}), projection);
}

template <typename T>
CoMatchParams<T> CoMatchParams<T>::random(std::size_t hidden_dim, RngState& rng) {
  CoMatchParams p;
  p.att_q = glorot<T>(hidden_dim, hidden_dim, rng);
  p.att_a = glorot<T>(hidden_dim, hidden_dim, rng);
  p.sim_q = glorot<T>(2 * hidden_dim, hidden_dim, rng);
  p.sim_a = glorot<T>(2 * hidden_dim, hidden_dim, rng);
  return p;
}

template <typename T>
Tensor<T> co_match(const EncodedTriple<T>& enc, const CoMatchParams<T>& params, RngState& rng,
                   DropoutSpec drop) {
  const auto& Hp = enc.passage;
  const auto M_qp = dropout(attend(Hp, enc.question, enc.question, params.att_q), drop.rate, rng,
                            drop.training);
  const auto M_ap = dropout(attend(Hp, enc.answer, enc.answer, params.att_a), drop.rate, rng,
                            drop.training);
  return concat<T>({max_pool_rows(similarity(M_qp, Hp, params.sim_q)),
                    max_pool_rows(similarity(M_ap, Hp, params.sim_a))});
}

template <typename T>
CnnMatchParams<T> CnnMatchParams<T>::random(std::size_t hidden_dim, RngState& rng) {
  CnnMatchParams p;
  p.att = glorot<T>(hidden_dim, hidden_dim, rng);
  p.sim = glorot<T>(2 * hidden_dim, hidden_dim, rng);
  return p;
}

template <typename T>
Tensor<T> cnn_match(const Tensor<T>& joint_qa, const Tensor<T>& passage,
                    const CnnMatchParams<T>& params, RngState& rng, DropoutSpec drop) {
  const auto M = dropout(attend(joint_qa, passage, passage, params.att), drop.rate, rng,
                         drop.training);
  return max_pool_rows(similarity(joint_qa, M, params.sim));
}

#define CTM_INSTANTIATE_BASELINES(T)                                                         \
  template struct GateParams<T>;                                                             \
  template struct DcmnParams<T>;                                                             \
  template struct CoMatchParams<T>;                                                          \
  template struct CnnMatchParams<T>;                                                         \
  template Tensor<T> gated_fusion(const Tensor<T>&, const Tensor<T>&, const GateParams<T>&); \
  template Tensor<T> dcmn_dual_match(const EncodedTriple<T>&, const DcmnParams<T>&,          \
                                     RngState&, DropoutSpec);                                \
  template Tensor<T> similarity(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);       \
  template Tensor<T> co_match(const EncodedTriple<T>&, const CoMatchParams<T>&, RngState&,   \
                              DropoutSpec);                                                  \
  template Tensor<T> cnn_match(const Tensor<T>&, const Tensor<T>&, const CnnMatchParams<T>&, \
                               RngState&, DropoutSpec);

CTM_INSTANTIATE_BASELINES(float)
CTM_INSTANTIATE_BASELINES(double)

}  // namespace ctm
