#pragma once

#include <array>

#include "ctm/matching.hpp"

namespace ctm {

// Pairwise ("dual") matching comparators under the same encoder. Att(x, y)
// below is softmax(x W y^T) y, i.e. y re-expressed along the rows of x.

// g = sigmoid(W [u; v] + b), fused = g * u + (1 - g) * v
template <typename T>
struct GateParams {
  Tensor<T> W;  // [l x 2l]
  Tensor<T> b;  // [l]

  static GateParams random(std::size_t hidden_dim, RngState& rng);
};

template <typename T>
Tensor<T> gated_fusion(const Tensor<T>& u, const Tensor<T>& v, const GateParams<T>& gate);

template <typename T>
struct DcmnParams {
  Tensor<T> att_qa;
  Tensor<T> att_qp;
  Tensor<T> att_ap;
  std::array<GateParams<T>, 3> gates;

  static DcmnParams random(std::size_t hidden_dim, RngState& rng);
};

/// [Gat(M^qa, M^ap); Gat(M^qp, M^ap); Gat(M^qa, M^qp)] with each M
/// max-pooled to length l. Output length 3l.
template <typename T>
Tensor<T> dcmn_dual_match(const EncodedTriple<T>& enc, const DcmnParams<T>& params,
                          RngState& rng, DropoutSpec drop);

// Sim(u, v) = [u * v, |u - v|] . W_s with W_s [2l x l]
template <typename T>
Tensor<T> similarity(const Tensor<T>& u, const Tensor<T>& v, const Tensor<T>& projection);

template <typename T>
struct CoMatchParams {
  Tensor<T> att_q;
  Tensor<T> att_a;
  Tensor<T> sim_q;
  Tensor<T> sim_a;

  static CoMatchParams random(std::size_t hidden_dim, RngState& rng);
};

/// [pool(Sim(Att(H^p, H^q), H^p)); pool(Sim(Att(H^p, H^a), H^p))], length 2l.
template <typename T>
Tensor<T> co_match(const EncodedTriple<T>& enc, const CoMatchParams<T>& params, RngState& rng,
                   DropoutSpec drop);

template <typename T>
struct CnnMatchParams {
  Tensor<T> att;
  Tensor<T> sim;

  static CnnMatchParams random(std::size_t hidden_dim, RngState& rng);
};

/// pool(Sim(H^qa, Att(H^qa, H^p))) where H^qa encodes question and answer
/// jointly. Length l.
template <typename T>
Tensor<T> cnn_match(const Tensor<T>& joint_qa, const Tensor<T>& passage,
                    const CnnMatchParams<T>& params, RngState& rng, DropoutSpec drop);

}  // namespace ctm
