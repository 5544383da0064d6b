#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "ctm/rng.hpp"
#include "ctm/tensor.hpp"

namespace ctm {

// H^p, H^q, H^a for one (passage, question, candidate) triple.
template <typename T>
struct EncodedTriple {
  Tensor<T> passage;
  Tensor<T> question;
  Tensor<T> answer;
};

// W scores context rows against entity rows, W1 scores the two
// context-aligned entities against each other, W2 projects before ReLU.
template <typename T>
struct BranchParams {
  Tensor<T> W;
  Tensor<T> W1;
  Tensor<T> W2;

  /// Glorot-uniform l x l matrices marked trainable.
  static BranchParams random(std::size_t hidden_dim, RngState& rng);
  static BranchParams zeros(std::size_t hidden_dim);
};

enum class Context { answer, question, passage };

const char* context_name(Context c);

// Subset of the three context branches, in fixed a, q, p order.
class BranchSet {
 public:
  BranchSet() = default;
  BranchSet(bool a, bool q, bool p) : enabled_{a, q, p} {}
  static BranchSet all() { return {true, true, true}; }
  /// Letters from {a, q, p}, e.g. "aqp", "a", "pq". Unknown letters or an
  /// empty set are a ConfigError.
  static BranchSet parse(const std::string& letters);

  bool contains(Context c) const { return enabled_[static_cast<std::size_t>(c)]; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  /// Canonical letters in a, q, p order.
  std::string to_string() const;
  std::vector<Context> contexts() const;

  bool operator==(const BranchSet&) const = default;

 private:
  std::array<bool, 3> enabled_{true, true, true};
};

// G = softmax(ctx . W . x^T), E = G . x
template <typename T>
struct ContextAttention {
  Tensor<T> weights;
  Tensor<T> mixed;
};

template <typename T>
ContextAttention<T> context_attend(const Tensor<T>& ctx, const Tensor<T>& x, const Tensor<T>& W);

/// softmax(query . W . key^T) . value
template <typename T>
Tensor<T> attend(const Tensor<T>& query, const Tensor<T>& key, const Tensor<T>& value,
                 const Tensor<T>& W);

// Every intermediate of one context branch, for inspection and tests.
template <typename T>
struct BranchTrace {
  ContextAttention<T> ctx_u;  // G^{ctx,u}, E^u
  ContextAttention<T> ctx_v;  // G^{ctx,v}, E^v
  Tensor<T> G_uv;             // softmax(E^u W1 E^v^T), [c x c]
  Tensor<T> G_vu;
  Tensor<T> E_uv;             // G_uv . ctx, [c x l]
  Tensor<T> E_vu;
  Tensor<T> S_uv;             // relu(E_uv W2), after dropout
  Tensor<T> S_vu;
  Tensor<T> output;           // [2 x l]
};

struct DropoutSpec {
  double rate = 0.0;
  bool training = false;
};

/// One context-guided branch: u and v are aligned to ctx, matched against
/// each other under W1, mixed back into ctx rows, projected and max-pooled.
template <typename T>
BranchTrace<T> branch_trace(const Tensor<T>& ctx, const Tensor<T>& u, const Tensor<T>& v,
                            const BranchParams<T>& params, RngState& rng, DropoutSpec drop);

template <typename T>
Tensor<T> branch(const Tensor<T>& ctx, const Tensor<T>& u, const Tensor<T>& v,
                 const BranchParams<T>& params, RngState& rng, DropoutSpec drop);

// One parameter set per context. With sharing the three sets alias the
// same tensors.
template <typename T>
struct TripleParams {
  BranchParams<T> answer;
  BranchParams<T> question;
  BranchParams<T> passage;

  static TripleParams random(std::size_t hidden_dim, bool shared, RngState& rng);
  const BranchParams<T>& operator[](Context c) const;
};

template <typename T>
struct MatchOutput {
  Tensor<T> M_a;  // undefined when the branch is disabled
  Tensor<T> M_q;
  Tensor<T> M_p;
  Tensor<T> C;    // flattened [M_a; M_q; M_p] over enabled branches
};

/// M_a = branch(H^a, H^p, H^q), M_q = branch(H^q, H^a, H^p),
/// M_p = branch(H^p, H^a, H^q). Disabled branches are left out of C.
template <typename T>
MatchOutput<T> match_triple(const EncodedTriple<T>& enc, const TripleParams<T>& params,
                            const BranchSet& branches, RngState& rng, DropoutSpec drop);

/// Answer-context intermediates (E^{pqa}, E^{qpa}) rebuilt as nested
/// attention: M^{qa} = Att(H^q; H^a), M^{pa} = Att(H^p; H^a), then H^a
/// attended by M^{pa} against M^{qa} under W1 and the reverse. No dropout.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> nested_attention_form(const EncodedTriple<T>& enc,
                                                      const BranchParams<T>& params);

}  // namespace ctm
