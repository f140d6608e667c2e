#include <benchmark/benchmark.h>

#include "gazescore/features.hpp"
#include "gazescore/scoring.hpp"
#include "gazescore/simulate.hpp"

using namespace gazescore;

namespace {

Dataset cohort_dataset(int readers) {
  const auto sentences = sim::synthesize_sentences(78, 9, 13, 11);
  sim::GeneratorConfig g;
  g.n_esl = readers;
  g.n_native = 8;
  g.seed = 12;
  g.fixed_fraction = 1.0;
  g.speed_log_sd = 0.2;
  const auto cohort = sim::generate_cohort(sentences, g);
  Dataset ds;
  ds.sentences = sentences;
  ds.participants = cohort.participants;
  ds.scores = cohort.scores;
  ds.rebuild_index();
  return ds;
}

void BM_ExtractWfc(benchmark::State& state) {
  const auto ds = cohort_dataset(static_cast<int>(state.range(0)));
  const auto records = features::compute_records(ds);
  const auto space = features::build_feature_space(
      records, features::FeatureSet::Wfc, Regime::Fixed, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(features::extract_features(records, space));
  }
}

void BM_RidgeFitWfc(benchmark::State& state) {
  const auto ds = cohort_dataset(48);
  const auto records = features::compute_records(ds);
  const auto space = features::build_feature_space(
      records, features::FeatureSet::Wfc, Regime::Fixed, false);
  const auto matrix = features::extract_features(records, space);
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  const auto scores = ds.scores_for(TestKind::Synthetic);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].group != Group::Esl) continue;
    rows.push_back(matrix.vectors[i].values);
    y.push_back(scores.at(records[i].participant_id));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(scoring::ridge_fit(rows, y, 1.0));
  }
}

}  // namespace

BENCHMARK(BM_ExtractWfc)->Arg(16)->Arg(48);
BENCHMARK(BM_RidgeFitWfc);
