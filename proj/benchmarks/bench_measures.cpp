#include <benchmark/benchmark.h>

#include "gazescore/measures.hpp"
#include "gazescore/rng.hpp"
#include "gazescore/simulate.hpp"

using namespace gazescore;

namespace {

// One synthetic trial of the requested fixation count over a 12-word sentence.
TrialRecord make_trial(int n_fix, Rng& rng) {
  TrialRecord t;
  t.participant_id = "p";
  t.sentence_id = "s000";
  t.regime = Regime::Fixed;
  for (int i = 0; i < n_fix; ++i) {
    t.fixations.push_back({i, 1 + static_cast<int>(rng.index(12)),
                           30 + static_cast<long>(rng.index(400))});
  }
  return t;
}

void BM_ComputeWordMeasures(benchmark::State& state) {
  Rng rng(1);
  const auto sentences = sim::synthesize_sentences(1, 12, 12, 2);
  const auto trial = make_trial(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        measures::compute_word_measures(trial, sentences[0]));
  }
}

}  // namespace

BENCHMARK(BM_ComputeWordMeasures)->Arg(8)->Arg(16)->Arg(64);
