#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctm/errors.hpp"
#include "ctm/gradcheck.hpp"
#include "ctm/objectives.hpp"
#include "ctm/ops.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ctm;
using namespace ctm::test;

namespace {

Tensor<double> vec(std::vector<double> v) {
  const auto n = v.size();
  return Tensor<double>({n}, std::move(v));
}

double value(const Tensor<double>& t) { return t.data()[0]; }

// Candidates whose score against head e0 is exactly s_i.
ScoredQuestion<double> scored(const std::vector<double>& s, std::size_t gold) {
  ScoredQuestion<double> q;
  for (double v : s) q.candidates.push_back(vec({v, 0.0}));
  q.gold = gold;
  return q;
}

const Tensor<double> kHead = Tensor<double>({2}, {1.0, 0.0});

long double cos_ld(const std::vector<long double>& a, const std::vector<long double>& b) {
  long double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

// Direct evaluation of the ratio, without any log-sum-exp shift.
long double contrastive_ld(const ContrastiveViews<double>& v) {
  auto ld = [](const Tensor<double>& t) { return std::vector<long double>(t.data().begin(), t.data().end()); };
  const auto a = ld(v.anchor);
  const long double tau = v.temperature;
  const long double num = std::exp(cos_ld(a, ld(v.positive)) / tau);
  long double den = num;
  for (const auto& n : v.negatives) den += std::exp(cos_ld(a, ld(n)) / tau);
  return -std::log(num / den);
}

}  // namespace

TEST_CASE("selection loss examples") {
  CHECK(std::abs(value(selection_loss(scored({0.3, 0.3, 0.3, 0.3}, 2), kHead)) - std::log(4.0)) < 1e-12);
  CHECK(std::abs(value(selection_loss(scored({2, 0, 0, 0}, 0), kHead)) - (std::log(std::exp(2.0) + 3.0) - 2.0)) <
        1e-12);
  CHECK(std::abs(value(selection_loss(scored({2, 0, 0, 0}, 0), kHead)) - 0.34076) < 1e-5);
  CHECK(std::abs(value(selection_loss(scored({0, 0}, 1), kHead)) - 0.69315) < 1e-5);
  CHECK_THROWS_AS(selection_loss(scored({0, 0, 0}, 3), kHead), ContractError);
  CHECK_THROWS_AS(selection_loss(scored({0}, 0), kHead), ContractError);
  CHECK_THROWS_AS(selection_loss_from_scores(vec({1, 2}), 2), ContractError);
}

TEST_CASE("selection loss over a batch is the mean") {
  QuestionBatch<double> batch{scored({0.3, 0.3, 0.3, 0.3}, 0), scored({0, 0}, 0)};
  CHECK(std::abs(value(selection_loss(batch, kHead)) - (std::log(4.0) + std::log(2.0)) / 2.0) < 1e-12);
}

TEST_CASE("selection loss is non-negative and shift invariant") {
  RngState rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(5);
    std::vector<double> s(n);
    for (double& v : s) v = rng.uniform(-5, 5);
    const std::size_t gold = rng.below(n);
    const double base = value(selection_loss(scored(s, gold), kHead));
    CHECK(base >= 0.0);
    const double c = rng.uniform(-50, 50);
    for (double& v : s) v += c;
    CHECK(std::abs(value(selection_loss(scored(s, gold), kHead)) - base) < 1e-6);
  }
}

TEST_CASE("selection probabilities sum to one") {
  RngState rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(5);
    auto s = random_tensor<double>({n}, rng, -20, 20);
    auto p = softmax_rows(reshape(s, {1, n}));
    double total = 0.0;
    for (double v : p.data()) total += v;
    CHECK(std::abs(total - 1.0) < 1e-6);
  }
}

TEST_CASE("contrastive loss examples") {
  ContrastiveViews<double> v{vec({1, 0}), vec({2, 0}), {vec({0, 1}), vec({0, -3})}, 1.0};
  CHECK(std::abs(value(contrastive_loss(v)) - std::log(1.0 + 2.0 * std::exp(-1.0))) < 1e-12);
  CHECK(std::abs(value(contrastive_loss(v)) - 0.55144) < 1e-5);

  ContrastiveViews<double> none{vec({1, 2, 3}), vec({-1, 0.5, 2}), {}, 0.07};
  CHECK(value(contrastive_loss(none)) == 0.0);

  const auto a = vec({0.3, -1.2, 0.8});
  ContrastiveViews<double> aligned{a, a, {scale(a, -1.0), scale(a, -2.0), scale(a, -0.5)}, 0.07};
  const double l = value(contrastive_loss(aligned));
  CHECK(l >= 0.0);
  CHECK(l < 1e-10);
  CHECK(std::isfinite(l));

  CHECK_THROWS_AS(contrastive_loss(ContrastiveViews<double>{a, a, {}, 0.0}), ConfigError);
  CHECK_THROWS_AS(contrastive_loss(ContrastiveViews<double>{Tensor<double>::zeros({3}), a, {}, 0.07}), NumericError);
}

TEST_CASE("contrastive loss matches a long double scalar oracle") {
  RngState rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 2 + rng.below(8);
    ContrastiveViews<double> v{random_tensor<double>({d}, rng), random_tensor<double>({d}, rng), {},
                               trial % 2 ? 0.07 : rng.uniform(0.5, 2.0)};
    for (std::size_t k = rng.below(5); k > 0; --k) v.negatives.push_back(random_tensor<double>({d}, rng));
    const double oracle = static_cast<double>(contrastive_ld(v));
    CHECK(std::abs(value(contrastive_loss(v)) - oracle) < 1e-10 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("contrastive loss falls as the positive aligns with the anchor") {
  const auto anchor = vec({1, 0, 0});
  const std::vector<Tensor<double>> negs{vec({0.2, 1, 0}), vec({-0.5, 0, 1})};
  double last = INFINITY;
  for (int k = 0; k <= 20; ++k) {
    const double angle = 3.0 * (1.0 - k / 20.0);
    ContrastiveViews<double> v{anchor, vec({std::cos(angle), std::sin(angle), 0.0}), negs, 0.07};
    const double l = value(contrastive_loss(v));
    CHECK(l < last);
    last = l;
  }
}

TEST_CASE("contrastive loss ignores vector norms") {
  RngState rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    ContrastiveViews<double> v{random_tensor<double>({5}, rng), random_tensor<double>({5}, rng),
                               {random_tensor<double>({5}, rng), random_tensor<double>({5}, rng)}, 0.07};
    const double base = value(contrastive_loss(v));
    const double c = rng.uniform(0.01, 100.0);
    switch (trial % 4) {
      case 0: v.anchor = scale(v.anchor, c); break;
      case 1: v.positive = scale(v.positive, c); break;
      default: v.negatives[trial % 2] = scale(v.negatives[trial % 2], c); break;
    }
    CHECK(std::abs(value(contrastive_loss(v)) - base) < 1e-6);
  }
}

TEST_CASE("both losses are invariant to candidate order") {
  RngState rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.below(3), d = 6;
    const auto head = random_tensor<double>({d}, rng);
    ScoredQuestion<double> q;
    for (std::size_t i = 0; i < n; ++i) q.candidates.push_back(random_tensor<double>({d}, rng));
    q.gold = rng.below(n);
    const auto positive = random_tensor<double>({d}, rng);
    auto views = [&](const ScoredQuestion<double>& sq) {
      ContrastiveViews<double> v{sq.candidates[sq.gold], positive, {}, 0.07};
      for (std::size_t i = 0; i < sq.candidates.size(); ++i)
        if (i != sq.gold) v.negatives.push_back(sq.candidates[i]);
      return v;
    };
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    ScoredQuestion<double> p;
    for (std::size_t i = 0; i < n; ++i) {
      p.candidates.push_back(q.candidates[perm[i]]);
      if (perm[i] == q.gold) p.gold = i;
    }
    CHECK(std::abs(value(selection_loss(q, head)) - value(selection_loss(p, head))) < 1e-6);
    CHECK(std::abs(value(contrastive_loss(views(q))) - value(contrastive_loss(views(p)))) < 1e-6);
    const auto sq = candidate_scores(q.candidates, head), sp = candidate_scores(p.candidates, head);
    for (std::size_t i = 0; i < n; ++i) CHECK(sp.data()[i] == sq.data()[perm[i]]);
  }
}

TEST_CASE("joint loss combines linearly") {
  const auto tm = selection_loss(scored({2, 0, 0, 0}, 0), kHead);
  const auto cr = contrastive_loss(ContrastiveViews<double>{vec({1, 0}), vec({1, 0}), {vec({0, 1}), vec({0, 1})}, 1.0});
  CHECK(value(joint_loss(tm, cr, 0.0)) == value(tm));
  CHECK(std::abs(value(joint_loss(tm, cr, 1.0)) - (0.34076 + 0.55144)) < 1e-5);
  CHECK(std::abs(value(joint_loss(tm, cr, 0.5)) - (value(tm) + 0.5 * value(cr))) < 1e-15);
  CHECK_THROWS_AS(joint_loss(tm, cr, -0.1), ConfigError);
  CHECK_THROWS_AS(joint_loss(tm, cr, NAN), ConfigError);
}

TEST_CASE("losses pass finite differences") {
  RngState rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 4;
    auto head = random_tensor<double>({d}, rng, -1, 1, true);
    std::vector<Tensor<double>> cands;
    for (int i = 0; i < 3; ++i) cands.push_back(random_tensor<double>({d}, rng, -1, 1, true));
    auto pos = random_tensor<double>({d}, rng, -1, 1, true);
    auto f = [&]() {
      const auto tm = selection_loss(ScoredQuestion<double>{cands, 1}, head);
      const auto cr = contrastive_loss(ContrastiveViews<double>{cands[1], pos, {cands[0], cands[2]}, 0.5});
      return joint_loss(tm, cr, 0.5);
    };
    std::vector<NamedParam> ps{{"head", head}, {"c0", cands[0]}, {"c1", cands[1]}, {"c2", cands[2]}, {"pos", pos}};
    CHECK(finite_diff_check(f, ps, 1e-6).worst_error <= 1e-5);
  }
}

TEST_CASE("schedule patterns") {
  Schedule alt{Strategy::alternate, 3, 0};
  std::string seen;
  for (std::size_t s = 0; s < 9; ++s) seen += to_string(alt.at(s)) + " ";
  CHECK(seen == "TM TM CR TM TM CR TM TM CR ");

  Schedule two{Strategy::alternate, 2, 0};
  for (std::size_t s = 0; s < 6; ++s) CHECK(two.at(s) == (s % 2 ? LossKind::contrastive : LossKind::selection));

  Schedule joint{};
  for (std::size_t s = 0; s < 50; ++s) CHECK(joint.at(s) == LossKind::joint);

  Schedule pre0{Strategy::pretrain, 2, 0};
  for (std::size_t s = 0; s < 50; ++s) CHECK(pre0.at(s) == LossKind::selection);
  Schedule pre3{Strategy::pretrain, 2, 3};
  CHECK(pre3.at(2) == LossKind::contrastive);
  CHECK(pre3.at(3) == LossKind::selection);

  CHECK(parse_strategy("alternate") == Strategy::alternate);
  CHECK(to_string(parse_strategy("pretrain")) == "pretrain");
  CHECK_THROWS_AS(parse_strategy("Joint"), ConfigError);
  CHECK_THROWS_AS((Schedule{Strategy::alternate, 1, 0}.validate()), ConfigError);
}
