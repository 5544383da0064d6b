#include "ctm/matching.hpp"

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
void require_entity(const Tensor<T>& x, const char* what) {
  if (!x.defined() || x.rank() != 2) {
    throw ContractError(std::string("branch: ") + what + " must be a non-empty matrix");
  }
}

}  // namespace

template <typename T>
BranchParams<T> BranchParams<T>::random(std::size_t hidden_dim, RngState& rng) {
  BranchParams p;
  p.W = glorot<T>(hidden_dim, hidden_dim, rng);
  p.W1 = glorot<T>(hidden_dim, hidden_dim, rng);
  p.W2 = glorot<T>(hidden_dim, hidden_dim, rng);
  return p;
}

template <typename T>
BranchParams<T> BranchParams<T>::zeros(std::size_t hidden_dim) {
  return {Tensor<T>::zeros({hidden_dim, hidden_dim}, true),
          Tensor<T>::zeros({hidden_dim, hidden_dim}, true),
          Tensor<T>::zeros({hidden_dim, hidden_dim}, true)};
}

const char* context_name(Context c) {
  switch (c) {
    case Context::answer: return "a";
    case Context::question: return "q";
    case Context::passage: return "p";
  }
  return "?";
}

BranchSet BranchSet::parse(const std::string& letters) {
  BranchSet set(false, false, false);
  for (char ch : letters) {
    switch (ch) {
      case 'a': set.enabled_[0] = true; break;
      case 'q': set.enabled_[1] = true; break;
      case 'p': set.enabled_[2] = true; break;
      case '+': case ',': case ' ': break;
      default: throw ConfigError("unknown branch '" + std::string(1, ch) + "' in \"" + letters + "\"");
    }
  }
  if (set.empty()) throw ConfigError("branch set \"" + letters + "\" is empty");
  return set;
}

std::size_t BranchSet::count() const {
  return static_cast<std::size_t>(enabled_[0]) + enabled_[1] + enabled_[2];
}

std::string BranchSet::to_string() const {
  std::string s;
  if (enabled_[0]) s += 'a';
  if (enabled_[1]) s += 'q';
  if (enabled_[2]) s += 'p';
  return s;
}

std::vector<Context> BranchSet::contexts() const {
  std::vector<Context> out;
  for (Context c : {Context::answer, Context::question, Context::passage})
    if (contains(c)) out.push_back(c);
  return out;
}

template <typename T>
ContextAttention<T> context_attend(const Tensor<T>& ctx, const Tensor<T>& x, const Tensor<T>& W) {
  auto G = softmax_rows(matmul(matmul(ctx, W), transpose(x)));
  auto E = matmul(G, x);
  return {G, E};
}

template <typename T>
Tensor<T> attend(const Tensor<T>& query, const Tensor<T>& key, const Tensor<T>& value,
                 const Tensor<T>& W) {
  return matmul(softmax_rows(matmul(matmul(query, W), transpose(key))), value);
}

template <typename T>
BranchTrace<T> branch_trace(const Tensor<T>& ctx, const Tensor<T>& u, const Tensor<T>& v,
                            const BranchParams<T>& params, RngState& rng, DropoutSpec drop) {
  require_entity(ctx, "context");
  require_entity(u, "first entity");
  require_entity(v, "second entity");
  BranchTrace<T> t;
  t.ctx_u = context_attend(ctx, u, params.W);
  t.ctx_v = context_attend(ctx, v, params.W);
  const auto Eu = dropout(t.ctx_u.mixed, drop.rate, rng, drop.training);
  const auto Ev = dropout(t.ctx_v.mixed, drop.rate, rng, drop.training);
  t.G_uv = softmax_rows(matmul(matmul(Eu, params.W1), transpose(Ev)));
  t.G_vu = softmax_rows(matmul(matmul(Ev, params.W1), transpose(Eu)));
  t.E_uv = matmul(t.G_uv, ctx);
  t.E_vu = matmul(t.G_vu, ctx);
  t.S_uv = dropout(relu(matmul(t.E_uv, params.W2)), drop.rate, rng, drop.training);
  t.S_vu = dropout(relu(matmul(t.E_vu, params.W2)), drop.rate, rng, drop.training);
  t.output = stack_rows<T>({max_pool_rows(t.S_uv), max_pool_rows(t.S_vu)});
  return t;
}

template <typename T>
Tensor<T> branch(const Tensor<T>& ctx, const Tensor<T>& u, const Tensor<T>& v,
                 const BranchParams<T>& params, RngState& rng, DropoutSpec drop) {
  return branch_trace(ctx, u, v, params, rng, drop).output;
}

template <typename T>
TripleParams<T> TripleParams<T>::random(std::size_t hidden_dim, bool shared, RngState& rng) {
  TripleParams p;
  p.answer = BranchParams<T>::random(hidden_dim, rng);
  if (shared) {
    p.question = p.answer;
    p.passage = p.answer;
  } else {
    p.question = BranchParams<T>::random(hidden_dim, rng);
    p.passage = BranchParams<T>::random(hidden_dim, rng);
  }
  return p;
}

template <typename T>
const BranchParams<T>& TripleParams<T>::operator[](Context c) const {
  switch (c) {
    case Context::answer: return answer;
    case Context::question: return question;
    case Context::passage: return passage;
  }
  return answer;
}

template <typename T>
MatchOutput<T> match_triple(const EncodedTriple<T>& enc, const TripleParams<T>& params,
                            const BranchSet& branches, RngState& rng, DropoutSpec drop) {
  if (branches.empty()) throw ConfigError("match_triple: no branch enabled");
  MatchOutput<T> out;
  std::vector<Tensor<T>> parts;
  if (branches.contains(Context::answer)) {
    out.M_a = branch(enc.answer, enc.passage, enc.question, params.answer, rng, drop);
    parts.push_back(flatten(out.M_a));
  }
  if (branches.contains(Context::question)) {
    out.M_q = branch(enc.question, enc.answer, enc.passage, params.question, rng, drop);
    parts.push_back(flatten(out.M_q));
  }
  if (branches.contains(Context::passage)) {
    out.M_p = branch(enc.passage, enc.answer, enc.question, params.passage, rng, drop);
    parts.push_back(flatten(out.M_p));
  }
  out.C = parts.size() == 1 ? parts.front() : concat(parts);
  return out;
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> nested_attention_form(const EncodedTriple<T>& enc,
                                                      const BranchParams<T>& params) {
  const auto& Ha = enc.answer;
  require_entity(Ha, "answer");
  require_entity(enc.passage, "passage");
  require_entity(enc.question, "question");
  const auto M_qa = attend(Ha, enc.question, enc.question, params.W);
  const auto M_pa = attend(Ha, enc.passage, enc.passage, params.W);
  auto E_pqa = attend(M_pa, M_qa, Ha, params.W1);
  auto E_qpa = attend(M_qa, M_pa, Ha, params.W1);
  return {E_pqa, E_qpa};
}

#define CTM_INSTANTIATE_MATCHING(T)                                                             \
  template struct BranchParams<T>;                                                              \
  template struct TripleParams<T>;                                                              \
  template ContextAttention<T> context_attend(const Tensor<T>&, const Tensor<T>&,               \
                                              const Tensor<T>&);                                \
  template Tensor<T> attend(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,               \
                            const Tensor<T>&);                                                  \
  template BranchTrace<T> branch_trace(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,    \
                                       const BranchParams<T>&, RngState&, DropoutSpec);         \
  template Tensor<T> branch(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,               \
                            const BranchParams<T>&, RngState&, DropoutSpec);                    \
  template MatchOutput<T> match_triple(const EncodedTriple<T>&, const TripleParams<T>&,         \
                                       const BranchSet&, RngState&, DropoutSpec);               \
  template std::pair<Tensor<T>, Tensor<T>> nested_attention_form(const EncodedTriple<T>&,       \
                                                                 const BranchParams<T>&);

CTM_INSTANTIATE_MATCHING(float)
CTM_INSTANTIATE_MATCHING(double)

}  // namespace ctm
