#include "ctm/model.hpp"

#include <cmath>

#include "ctm/errors.hpp"
#include "ctm/ops.hpp"

namespace ctm {

template <typename T>
CtmModel<T>::CtmModel(CtmConfig config, Vocab vocab, RngState& init) : config_(std::move(config)) {
  config_.validate();
  toy_ = std::make_shared<ToyEncoder<T>>(std::move(vocab), config_.hidden_dim, config_.max_len,
                                         config_.dropout, init);
  encoder_ = toy_;
  init_matcher(init);
}

template <typename T>
CtmModel<T>::CtmModel(CtmConfig config, std::shared_ptr<const Encoder<T>> encoder, RngState& init)
    : config_(std::move(config)), encoder_(std::move(encoder)) {
  config_.validate();
  if (!encoder_ || encoder_->hidden_dim() != config_.hidden_dim) {
    throw ConfigError("encoder hidden size does not match config hidden_dim");
  }
  init_matcher(init);
}

template <typename T>
void CtmModel<T>::init_matcher(RngState& init) {
  const std::size_t l = config_.hidden_dim;
  switch (config_.matcher) {
    case Matcher::triple: triple_ = TripleParams<T>::random(l, config_.share_branch_weights, init); break;
    case Matcher::dcmn: dcmn_ = DcmnParams<T>::random(l, init); break;
    case Matcher::co: co_ = CoMatchParams<T>::random(l, init); break;
    case Matcher::cnn: cnn_ = CnnMatchParams<T>::random(l, init); break;
  }
  const std::size_t n = representation_size();
  const double bound = std::sqrt(6.0 / static_cast<double>(n + 1));
  std::vector<T> w(n);
  for (auto& v : w) v = static_cast<T>(init.uniform(-bound, bound));
  head_ = Tensor<T>({n}, std::move(w), true);
}

template <typename T>
std::size_t CtmModel<T>::representation_size() const {
  const std::size_t l = config_.hidden_dim;
  switch (config_.matcher) {
    case Matcher::triple: return 2 * l * config_.branches.count();
    case Matcher::dcmn: return 3 * l;
    case Matcher::co: return 2 * l;
    case Matcher::cnn: return l;
  }
  return 0;
}

template <typename T>
Tensor<T> CtmModel<T>::match(const McqaExample& ex, std::size_t option, const Tensor<T>& passage,
                             const Tensor<T>& question, RngState& rng, bool training) const {
  const DropoutSpec drop{config_.dropout, training};
  if (config_.matcher == Matcher::cnn) {
    const auto joint = encoder_->encode(ex, Field::question_answer(option), rng, training);
    return cnn_match(joint, passage, cnn_, rng, drop);
  }
  const EncodedTriple<T> enc{passage, question, encoder_->encode(ex, Field::answer(option), rng, training)};
  switch (config_.matcher) {
    case Matcher::triple: return match_triple(enc, triple_, config_.branches, rng, drop).C;
    case Matcher::dcmn: return dcmn_dual_match(enc, dcmn_, rng, drop);
    case Matcher::co: return co_match(enc, co_, rng, drop);
    case Matcher::cnn: break;
  }
  throw ContractError("unreachable matcher");
}

template <typename T>
std::vector<Tensor<T>> CtmModel<T>::represent(const McqaExample& ex, RngState& rng,
                                              bool training) const {
  const auto passage = encoder_->encode(ex, Field::passage(), rng, training);
  Tensor<T> question;
  if (config_.matcher != Matcher::cnn) question = encoder_->encode(ex, Field::question(), rng, training);
  std::vector<Tensor<T>> out;
  out.reserve(ex.options.size());
  for (std::size_t i = 0; i < ex.options.size(); ++i) out.push_back(match(ex, i, passage, question, rng, training));
  return out;
}

template <typename T>
Tensor<T> CtmModel<T>::represent_candidate(const McqaExample& ex, std::size_t option, RngState& rng,
                                           bool training) const {
  if (option >= ex.options.size()) throw ContractError("option index out of range");
  const auto passage = encoder_->encode(ex, Field::passage(), rng, training);
  Tensor<T> question;
  if (config_.matcher != Matcher::cnn) question = encoder_->encode(ex, Field::question(), rng, training);
  return match(ex, option, passage, question, rng, training);
}

template <typename T>
Tensor<T> CtmModel<T>::scores(const McqaExample& ex, RngState& rng, bool training) const {
  return candidate_scores(represent(ex, rng, training), head_);
}

template <typename T>
std::vector<NamedTensor<T>> CtmModel<T>::parameters() const {
  std::vector<NamedTensor<T>> out;
  if (toy_) {
    out.push_back({"encoder.token", toy_->token_table()});
    out.push_back({"encoder.position", toy_->position_table()});
  }
  auto add_branch = [&](const std::string& prefix, const BranchParams<T>& p) {
    out.push_back({prefix + ".W", p.W});
    out.push_back({prefix + ".W1", p.W1});
    out.push_back({prefix + ".W2", p.W2});
  };
  switch (config_.matcher) {
    case Matcher::triple:
      if (config_.share_branch_weights) {
        add_branch("branch.shared", triple_.answer);
      } else {
        add_branch("branch.a", triple_.answer);
        add_branch("branch.q", triple_.question);
        add_branch("branch.p", triple_.passage);
      }
      break;
    case Matcher::dcmn:
      out.push_back({"dcmn.att_qa", dcmn_.att_qa});
      out.push_back({"dcmn.att_qp", dcmn_.att_qp});
      out.push_back({"dcmn.att_ap", dcmn_.att_ap});
      for (std::size_t g = 0; g < dcmn_.gates.size(); ++g) {
        out.push_back({"dcmn.gate" + std::to_string(g) + ".W", dcmn_.gates[g].W});
        out.push_back({"dcmn.gate" + std::to_string(g) + ".b", dcmn_.gates[g].b});
      }
      break;
    case Matcher::co:
      out.push_back({"co.att_q", co_.att_q});
      out.push_back({"co.att_a", co_.att_a});
      out.push_back({"co.sim_q", co_.sim_q});
      out.push_back({"co.sim_a", co_.sim_a});
      break;
    case Matcher::cnn:
      out.push_back({"cnn.att", cnn_.att});
      out.push_back({"cnn.sim", cnn_.sim});
      break;
  }
  out.push_back({"head.w", head_});
  return out;
}

template class CtmModel<float>;
template class CtmModel<double>;

}  // namespace ctm
