#include <cmath>

#include "ctm/baselines.hpp"
#include "ctm/errors.hpp"
#include "ctm/gradcheck.hpp"
#include "ctm/matching.hpp"
#include "ctm/objectives.hpp"
#include "ctm/ops.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ctm;
using namespace ctm::test;

namespace {

// One branch with nothing but loops over plain arrays.
std::vector<double> branch_oracle(const Mat& ctx, const Mat& u, const Mat& v, const Mat& W, const Mat& W1,
                                  const Mat& W2) {
  const Mat Eu = mat_mul(softmax_loop(mat_mul(mat_mul(ctx, W), mat_t(u))), u);
  const Mat Ev = mat_mul(softmax_loop(mat_mul(mat_mul(ctx, W), mat_t(v))), v);
  const Mat Euv = mat_mul(softmax_loop(mat_mul(mat_mul(Eu, W1), mat_t(Ev))), ctx);
  const Mat Evu = mat_mul(softmax_loop(mat_mul(mat_mul(Ev, W1), mat_t(Eu))), ctx);
  auto a = max_pool_loop(relu_loop(mat_mul(Euv, W2)));
  const auto b = max_pool_loop(relu_loop(mat_mul(Evu, W2)));
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

template <typename T>
std::vector<double> branch_oracle(const Tensor<T>& ctx, const Tensor<T>& u, const Tensor<T>& v,
                                  const BranchParams<T>& p) {
  return branch_oracle(to_mat(ctx), to_mat(u), to_mat(v), to_mat(p.W), to_mat(p.W1), to_mat(p.W2));
}

template <typename T>
EncodedTriple<T> random_triple(RngState& rng, std::size_t l, std::size_t np, std::size_t nq, std::size_t na,
                               bool grad = false) {
  return {random_tensor<T>({np, l}, rng, -1, 1, grad), random_tensor<T>({nq, l}, rng, -1, 1, grad),
          random_tensor<T>({na, l}, rng, -1, 1, grad)};
}

template <typename T>
BranchParams<T> random_params(std::size_t l, RngState& rng, double scale = 1.0) {
  return {random_tensor<T>({l, l}, rng, -scale, scale, true), random_tensor<T>({l, l}, rng, -scale, scale, true),
          random_tensor<T>({l, l}, rng, -scale, scale, true)};
}

const DropoutSpec kNoDrop{};

}  // namespace

TEST_CASE("context_attend examples") {
  RngState rng(1);
  auto x = random_tensor<double>({4, 3}, rng);
  auto ctx = random_tensor<double>({2, 3}, rng);
  auto uniform = context_attend(ctx, x, Tensor<double>::zeros({3, 3}));
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < 4; ++i) mean += x.at(i, c) / 4.0;
      CHECK(std::abs(uniform.mixed.at(r, c) - mean) < 1e-12);
    }

  auto eye = Tensor<double>({2, 2}, {1, 0, 0, 1});
  auto one = context_attend(Tensor<double>({1, 2}, {1, 0}), eye, eye);
  CHECK(std::abs(one.weights.at(0, 0) - 0.7310585786300049) < 1e-5);
  CHECK(std::abs(one.weights.at(0, 1) - 0.2689414213699951) < 1e-5);
  CHECK(std::abs(one.mixed.at(0, 0) - 0.7310585786300049) < 1e-5);
  CHECK(std::abs(one.mixed.at(0, 1) - 0.2689414213699951) < 1e-5);

  auto row = random_tensor<double>({1, 3}, rng);
  auto single = context_attend(ctx, row, random_tensor<double>({3, 3}, rng));
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(single.weights.at(r, 0) == 1.0);
    for (std::size_t c = 0; c < 3; ++c) CHECK(single.mixed.at(r, c) == doctest::Approx(row.at(0, c)));
  }
  CHECK_THROWS_AS(context_attend(ctx, random_tensor<double>({4, 2}, rng), Tensor<double>::zeros({3, 3})),
                  DimensionError);
}

TEST_CASE("all-zero branch inputs give a zero output") {
  RngState rng(2);
  const auto params = random_params<double>(4, rng);
  auto out = branch(Tensor<double>::zeros({3, 4}), Tensor<double>::zeros({2, 4}), Tensor<double>::zeros({5, 4}),
                    params, rng, kNoDrop);
  for (double v : out.data()) CHECK(v == 0.0);
}

TEST_CASE("branch output is 2 x l for any lengths") {
  RngState rng(3);
  const auto params = random_params<float>(4, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = 1 + rng.below(8), u = 1 + rng.below(8), v = 1 + rng.below(8);
    auto out = branch(random_tensor<float>({c, 4}, rng), random_tensor<float>({u, 4}, rng),
                      random_tensor<float>({v, 4}, rng), params, rng, kNoDrop);
    CHECK(out.shape() == Shape{2, 4});
  }
  auto out = branch(random_tensor<float>({3, 4}, rng), random_tensor<float>({7, 4}, rng),
                    random_tensor<float>({5, 4}, rng), params, rng, kNoDrop);
  CHECK(out.shape() == Shape{2, 4});
  CHECK_THROWS_AS(branch(Tensor<float>(), random_tensor<float>({7, 4}, rng), random_tensor<float>({5, 4}, rng),
                         params, rng, kNoDrop),
                  ContractError);
}

TEST_CASE("branch matches the loop oracle") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RngState rng(100 + seed);
    const auto params = random_params<double>(3, rng);
    auto ctx = random_tensor<double>({2, 3}, rng), u = random_tensor<double>({3, 3}, rng),
         v = random_tensor<double>({2, 3}, rng);
    auto out = branch(ctx, u, v, params, rng, kNoDrop);
    CHECK(max_abs_diff(branch_oracle(ctx, u, v, params), out.data()) < 1e-12);

    const auto pf = random_params<float>(3, rng);
    auto cf = random_tensor<float>({2, 3}, rng), uf = random_tensor<float>({3, 3}, rng),
         vf = random_tensor<float>({2, 3}, rng);
    CHECK(max_abs_diff(branch_oracle(cf, uf, vf, pf), branch(cf, uf, vf, pf, rng, kNoDrop).data()) < 1e-6);
  }
}

TEST_CASE("branch trace exposes consistent intermediates") {
  RngState rng(4);
  const auto params = random_params<double>(4, rng);
  auto t = branch_trace(random_tensor<double>({3, 4}, rng), random_tensor<double>({5, 4}, rng),
                        random_tensor<double>({2, 4}, rng), params, rng, kNoDrop);
  CHECK(t.ctx_u.weights.shape() == Shape{3, 5});
  CHECK(t.ctx_v.weights.shape() == Shape{3, 2});
  CHECK(t.G_uv.shape() == Shape{3, 3});
  CHECK(t.E_uv.shape() == Shape{3, 4});
  CHECK(t.S_vu.shape() == Shape{3, 4});
  CHECK(t.output.shape() == Shape{2, 4});
}

TEST_CASE("match_triple composes the three branches with the stated roles") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngState rng(200 + seed);
    const auto enc = random_triple<double>(rng, 3, 4, 3, 2);
    const auto params = TripleParams<double>::random(3, false, rng);
    auto out = match_triple(enc, params, BranchSet::all(), rng, kNoDrop);
    CHECK(out.C.shape() == Shape{18});
    auto expect = branch_oracle(enc.answer, enc.passage, enc.question, params.answer);
    auto q = branch_oracle(enc.question, enc.answer, enc.passage, params.question);
    auto p = branch_oracle(enc.passage, enc.answer, enc.question, params.passage);
    expect.insert(expect.end(), q.begin(), q.end());
    expect.insert(expect.end(), p.begin(), p.end());
    CHECK(max_abs_diff(expect, out.C.data()) < 1e-12);
    // C is the row-major flattening of [M_a; M_q; M_p]
    const auto stacked = flatten(vstack<double>({out.M_a, out.M_q, out.M_p}));
    CHECK(max_abs_diff(stacked, out.C) == 0.0);
  }
}

TEST_CASE("zero encodings and zero weights give a zero representation") {
  RngState rng(5);
  const std::size_t l = 4;
  EncodedTriple<float> zero{Tensor<float>::zeros({5, l}), Tensor<float>::zeros({3, l}), Tensor<float>::zeros({2, l})};
  auto out = match_triple(zero, TripleParams<float>::random(l, false, rng), BranchSet::all(), rng, kNoDrop);
  CHECK(out.C.size() == 6 * l);
  for (float v : out.C.data()) CHECK(v == 0.0f);

  TripleParams<float> zp{BranchParams<float>::zeros(l), BranchParams<float>::zeros(l), BranchParams<float>::zeros(l)};
  auto z = match_triple(random_triple<float>(rng, l, 5, 3, 2), zp, BranchSet::all(), rng, kNoDrop);
  for (float v : z.C.data()) CHECK(v == 0.0f);
}

TEST_CASE("branch masks shrink C") {
  RngState rng(6);
  const std::size_t l = 5;
  const auto enc = random_triple<float>(rng, l, 4, 3, 2);
  const auto params = TripleParams<float>::random(l, false, rng);
  auto a = match_triple(enc, params, BranchSet::parse("a"), rng, kNoDrop);
  CHECK(a.C.size() == 2 * l);
  CHECK_FALSE(a.M_q.defined());
  auto qp = match_triple(enc, params, BranchSet::parse("qp"), rng, kNoDrop);
  CHECK(qp.C.size() == 4 * l);
  auto full = match_triple(enc, params, BranchSet::all(), rng, kNoDrop);
  for (std::size_t i = 0; i < 4 * l; ++i) CHECK(qp.C[i] == full.C[2 * l + i]);
}

TEST_CASE("branch set parsing") {
  CHECK(BranchSet::parse("pqa").to_string() == "aqp");
  CHECK(BranchSet::parse("a+p") == BranchSet(true, false, true));
  CHECK(BranchSet::parse("q").count() == 1);
  CHECK_THROWS_AS(BranchSet::parse(""), ConfigError);
  CHECK_THROWS_AS(BranchSet::parse("ax"), ConfigError);
}

TEST_CASE("shared branch weights alias one set") {
  RngState rng(7);
  auto p = TripleParams<float>::random(3, true, rng);
  CHECK(p.answer.W.graph_id() == p.passage.W.graph_id());
  CHECK(p.question.W2.graph_id() == p.answer.W2.graph_id());
  auto q = TripleParams<float>::random(3, false, rng);
  CHECK(q.answer.W.graph_id() != q.passage.W.graph_id());
}

TEST_CASE("nested attention form equals the branch intermediates") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RngState rng(300 + seed);
    const std::size_t l = 2 + rng.below(4);
    const auto enc = random_triple<double>(rng, l, 1 + rng.below(6), 1 + rng.below(5), 1 + rng.below(4));
    const auto params = random_params<double>(l, rng);
    auto [pqa, qpa] = nested_attention_form(enc, params);
    auto t = branch_trace(enc.answer, enc.passage, enc.question, params, rng, kNoDrop);
    CHECK(max_abs_diff(pqa, t.E_uv) < 1e-12);
    CHECK(max_abs_diff(qpa, t.E_vu) < 1e-12);

    const EncodedTriple<float> f{enc.passage.cast<float>(), enc.question.cast<float>(), enc.answer.cast<float>()};
    const BranchParams<float> pf{params.W.cast<float>(), params.W1.cast<float>(), params.W2.cast<float>()};
    auto [fa, fb] = nested_attention_form(f, pf);
    auto tf = branch_trace(f.answer, f.passage, f.question, pf, rng, kNoDrop);
    CHECK(max_abs_diff(fa, tf.E_uv) < 1e-6);
    CHECK(max_abs_diff(fb, tf.E_vu) < 1e-6);
  }
}

TEST_CASE("nested attention degenerate cases") {
  RngState rng(8);
  const std::size_t l = 3;
  auto enc = random_triple<double>(rng, l, 4, 3, 2);
  BranchParams<double> zero = BranchParams<double>::zeros(l);
  auto [a, b] = nested_attention_form(enc, zero);
  for (std::size_t c = 0; c < l; ++c) {
    const double mean = (enc.answer.at(0, c) + enc.answer.at(1, c)) / 2.0;
    for (std::size_t r = 0; r < 2; ++r) {
      CHECK(std::abs(a.at(r, c) - mean) < 1e-12);
      CHECK(std::abs(b.at(r, c) - mean) < 1e-12);
    }
  }
  enc.answer = random_tensor<double>({1, l}, rng);
  auto [s, _] = nested_attention_form(enc, random_params<double>(l, rng));
  CHECK(s.rows() == 1);
  for (std::size_t c = 0; c < l; ++c) CHECK(s.at(0, c) == doctest::Approx(enc.answer.at(0, c)));
}

TEST_CASE("gated fusion limits") {
  RngState rng(9);
  const std::size_t l = 4;
  auto gate = GateParams<double>::random(l, rng);
  auto u = random_tensor<double>({l}, rng), v = random_tensor<double>({l}, rng);
  CHECK(max_abs_diff(gated_fusion(u, u, gate), u) < 1e-15);
  GateParams<double> open{gate.W, Tensor<double>::filled({l}, 60.0)};
  CHECK(max_abs_diff(gated_fusion(u, v, open), u) < 1e-12);
  CHECK_THROWS_AS(gated_fusion(u, random_tensor<double>({l + 1}, rng), gate), DimensionError);
}

namespace {

Mat attend_loop(const Mat& x, const Mat& y, const Mat& W) { return mat_mul(softmax_loop(mat_mul(mat_mul(x, W), mat_t(y))), y); }

std::vector<double> gate_loop(const std::vector<double>& u, const std::vector<double>& v, const Mat& W,
                              const std::vector<double>& b) {
  std::vector<double> joint = u;
  joint.insert(joint.end(), v.begin(), v.end());
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double z = b[i];
    for (std::size_t k = 0; k < joint.size(); ++k) z += W[i][k] * joint[k];
    const double g = 1.0 / (1.0 + std::exp(-z));
    out[i] = g * u[i] + (1.0 - g) * v[i];
  }
  return out;
}

Mat sim_loop(const Mat& u, const Mat& v, const Mat& P) {
  Mat joint(u.size());
  for (std::size_t r = 0; r < u.size(); ++r) {
    for (std::size_t c = 0; c < u[r].size(); ++c) joint[r].push_back(u[r][c] * v[r][c]);
    for (std::size_t c = 0; c < u[r].size(); ++c) joint[r].push_back(std::abs(u[r][c] - v[r][c]));
  }
  return mat_mul(joint, P);
}

std::vector<double> vec_of(const Tensor<double>& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST_CASE("dcmn dual matching matches its loop oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngState rng(400 + seed);
    const std::size_t l = 3;
    const auto enc = random_triple<double>(rng, l, 4, 3, 2);
    auto params = DcmnParams<double>::random(l, rng);
    for (auto& g : params.gates) g.b = random_tensor<double>({l}, rng, -1, 1, true);
    auto out = dcmn_dual_match(enc, params, rng, kNoDrop);
    CHECK(out.size() == 3 * l);
    const Mat P = to_mat(enc.passage), Q = to_mat(enc.question), A = to_mat(enc.answer);
    const auto qa = max_pool_loop(attend_loop(Q, A, to_mat(params.att_qa)));
    const auto qp = max_pool_loop(attend_loop(Q, P, to_mat(params.att_qp)));
    const auto ap = max_pool_loop(attend_loop(A, P, to_mat(params.att_ap)));
    std::vector<double> expect;
    const std::pair<const std::vector<double>*, const std::vector<double>*> pairs[] = {{&qa, &ap}, {&qp, &ap}, {&qa, &qp}};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto g = gate_loop(*pairs[k].first, *pairs[k].second, to_mat(params.gates[k].W), vec_of(params.gates[k].b));
      expect.insert(expect.end(), g.begin(), g.end());
    }
    CHECK(max_abs_diff(expect, out.data()) < 1e-12);

    // saturated gates pass the first operand of each pair through
    for (auto& g : params.gates) g.b = Tensor<double>::filled({l}, 60.0);
    auto sat = dcmn_dual_match(enc, params, rng, kNoDrop);
    std::vector<double> firsts = qa;
    firsts.insert(firsts.end(), qp.begin(), qp.end());
    firsts.insert(firsts.end(), qa.begin(), qa.end());
    CHECK(max_abs_diff(firsts, sat.data()) < 1e-12);
  }
}

TEST_CASE("co-match and cnn-match match their loop oracles") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngState rng(500 + seed);
    const std::size_t l = 3;
    const auto enc = random_triple<double>(rng, l, 4, 3, 2);
    const Mat P = to_mat(enc.passage), Q = to_mat(enc.question), A = to_mat(enc.answer);

    const auto co = CoMatchParams<double>::random(l, rng);
    auto out = co_match(enc, co, rng, kNoDrop);
    CHECK(out.size() == 2 * l);
    auto expect = max_pool_loop(sim_loop(attend_loop(P, Q, to_mat(co.att_q)), P, to_mat(co.sim_q)));
    const auto second = max_pool_loop(sim_loop(attend_loop(P, A, to_mat(co.att_a)), P, to_mat(co.sim_a)));
    expect.insert(expect.end(), second.begin(), second.end());
    CHECK(max_abs_diff(expect, out.data()) < 1e-12);

    const auto cnn = CnnMatchParams<double>::random(l, rng);
    const auto qa = vstack<double>({enc.question, enc.answer});
    auto c = cnn_match(qa, enc.passage, cnn, rng, kNoDrop);
    CHECK(c.size() == l);
    const Mat QA = to_mat(qa);
    const auto ce = max_pool_loop(sim_loop(QA, attend_loop(QA, P, to_mat(cnn.att)), to_mat(cnn.sim)));
    CHECK(max_abs_diff(ce, c.data()) < 1e-12);
  }
}

TEST_CASE("baselines give zero on zero encodings and fixed lengths otherwise") {
  RngState rng(10);
  const std::size_t l = 4;
  EncodedTriple<float> zero{Tensor<float>::zeros({6, l}), Tensor<float>::zeros({2, l}), Tensor<float>::zeros({3, l})};
  const auto co = co_match(zero, CoMatchParams<float>::random(l, rng), rng, kNoDrop);
  for (float v : co.data()) CHECK(v == 0.0f);
  const auto cnn = cnn_match(vstack<float>({zero.question, zero.answer}), zero.passage,
                             CnnMatchParams<float>::random(l, rng), rng, kNoDrop);
  for (float v : cnn.data()) CHECK(v == 0.0f);
  for (int trial = 0; trial < 10; ++trial) {
    const auto enc = random_triple<float>(rng, l, 1 + rng.below(9), 1 + rng.below(9), 1 + rng.below(9));
    CHECK(co_match(enc, CoMatchParams<float>::random(l, rng), rng, kNoDrop).size() == 2 * l);
    CHECK(cnn_match(vstack<float>({enc.question, enc.answer}), enc.passage, CnnMatchParams<float>::random(l, rng),
                    rng, kNoDrop)
              .size() == l);
    CHECK(dcmn_dual_match(enc, DcmnParams<float>::random(l, rng), rng, kNoDrop).size() == 3 * l);
  }
}

TEST_CASE("candidates are matched independently") {
  RngState rng(11);
  const std::size_t l = 4;
  const auto params = TripleParams<float>::random(l, false, rng);
  auto P = random_tensor<float>({6, l}, rng), Q = random_tensor<float>({3, l}, rng);
  std::vector<Tensor<float>> answers;
  for (int i = 0; i < 4; ++i) answers.push_back(random_tensor<float>({2, l}, rng));
  auto rep = [&](const std::vector<std::size_t>& order) {
    std::vector<Tensor<float>> out;
    for (std::size_t i : order) out.push_back(match_triple({P, Q, answers[i]}, params, BranchSet::all(), rng, kNoDrop).C);
    return out;
  };
  const auto base = rep({0, 1, 2, 3});
  const auto perm = rep({2, 0, 3, 1});
  const std::size_t map[] = {2, 0, 3, 1};
  for (std::size_t k = 0; k < 4; ++k) CHECK(max_abs_diff(perm[k], base[map[k]]) == 0.0);
}

TEST_CASE("backward through match_triple passes finite differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RngState rng(600 + seed);
    const std::size_t l = 3;
    const auto enc = random_triple<double>(rng, l, 4, 3, 2, true);
    const auto params = TripleParams<double>::random(l, false, rng);
    auto head = random_tensor<double>({6 * l}, rng, -1, 1, true);
    const RngState masks = rng.fork(1);
    auto f = [&]() {
      RngState r = masks;
      return dot(match_triple(enc, params, BranchSet::all(), r, DropoutSpec{0.2, true}).C, head);
    };
    std::vector<NamedParam> ps{{"Hp", enc.passage}, {"Hq", enc.question}, {"Ha", enc.answer}, {"head", head}};
    for (Context c : {Context::answer, Context::question, Context::passage}) {
      ps.emplace_back(std::string(context_name(c)) + ".W", params[c].W);
      ps.emplace_back(std::string(context_name(c)) + ".W1", params[c].W1);
      ps.emplace_back(std::string(context_name(c)) + ".W2", params[c].W2);
    }
    CHECK(finite_diff_check(f, ps, 1e-6).worst_error <= 1e-5);
  }
}
