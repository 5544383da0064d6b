#include <benchmark/benchmark.h>

#include "ctm/data.hpp"
#include "ctm/matching.hpp"
#include "ctm/model.hpp"
#include "ctm/objectives.hpp"
#include "ctm/ops.hpp"

using namespace ctm;

namespace {

Tensor<float> random_matrix(std::size_t rows, std::size_t cols, RngState& rng, bool grad = false) {
  std::vector<float> v(rows * cols);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  return Tensor<float>({rows, cols}, std::move(v), grad);
}

EncodedTriple<float> triple(std::size_t l, std::size_t passage, RngState& rng, bool grad) {
  return {random_matrix(passage, l, rng, grad), random_matrix(12, l, rng, grad), random_matrix(6, l, rng, grad)};
}

}  // namespace

// args: hidden size, passage length
void BM_MatchTripleForward(benchmark::State& state) {
  const auto l = static_cast<std::size_t>(state.range(0));
  RngState rng(1);
  const auto enc = triple(l, static_cast<std::size_t>(state.range(1)), rng, false);
  const auto params = TripleParams<float>::random(l, false, rng);
  NoGradGuard no_grad;
  for (auto _ : state) {
    auto out = match_triple(enc, params, BranchSet::all(), rng, DropoutSpec{});
    benchmark::DoNotOptimize(out.C.data().data());
  }
}
BENCHMARK(BM_MatchTripleForward)->Args({16, 64})->Args({32, 128})->Args({64, 360});

void BM_MatchTripleBackward(benchmark::State& state) {
  const auto l = static_cast<std::size_t>(state.range(0));
  RngState rng(2);
  const auto enc = triple(l, static_cast<std::size_t>(state.range(1)), rng, true);
  const auto params = TripleParams<float>::random(l, false, rng);
  const auto head = random_matrix(1, 6 * l, rng, true);
  for (auto _ : state) {
    auto out = match_triple(enc, params, BranchSet::all(), rng, DropoutSpec{0.1, true});
    backward(dot(out.C, reshape(head, {6 * l})));
  }
}
BENCHMARK(BM_MatchTripleBackward)->Args({16, 64})->Args({32, 128});

// one optimizer-free training step of a whole question: 4 candidates, both losses
void BM_QuestionLoss(benchmark::State& state) {
  SynthSpec spec;
  spec.questions = 16;
  const auto data = synth_dataset(spec);
  CtmConfig config;
  config.hidden_dim = static_cast<std::size_t>(state.range(0));
  RngState init(3), rng(4);
  const CtmModel<float> model(config, Vocab::build(data), init);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& ex = data[i++ % data.size()];
    const auto reps = model.represent(ex, rng, true);
    ContrastiveViews<float> views{reps[ex.gold], model.represent_candidate(ex, ex.gold, rng, true), {}, 0.07};
    for (std::size_t k = 0; k < reps.size(); ++k)
      if (k != ex.gold) views.negatives.push_back(reps[k]);
    const auto loss =
        joint_loss(selection_loss(ScoredQuestion<float>{reps, ex.gold}, model.head()), contrastive_loss(views), 0.5);
    backward(loss);
  }
}
BENCHMARK(BM_QuestionLoss)->Arg(16)->Arg(32);
BENCHMARK_MAIN();
