#include <benchmark/benchmark.h>

#include "gazescore/langmodel.hpp"
#include "gazescore/rng.hpp"

using namespace gazescore;

namespace {

std::vector<std::vector<std::string>> corpus(int n_sentences, int vocab) {
  Rng rng(7);
  std::vector<std::vector<std::string>> out;
  for (int i = 0; i < n_sentences; ++i) {
    std::vector<std::string> s;
    const int len = 4 + static_cast<int>(rng.index(10));
    for (int j = 0; j < len; ++j) {
      const double u = rng.uniform();
      s.push_back("w" + std::to_string(static_cast<int>(u * u * vocab)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

void BM_TrainTrigramLm(benchmark::State& state) {
  const auto c = corpus(static_cast<int>(state.range(0)), 500);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lm::TrigramLm::train(c));
  }
}

void BM_Surprisal(benchmark::State& state) {
  const auto c = corpus(2000, 500);
  const auto model = lm::TrigramLm::train(c);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.surprisals(c[i++ % c.size()]));
  }
}

}  // namespace

BENCHMARK(BM_TrainTrigramLm)->Arg(500)->Arg(2000);
BENCHMARK(BM_Surprisal);
