#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "gazescore/corpus.hpp"
#include "gazescore/errors.hpp"
#include "gazescore/features.hpp"
#include "gazescore/measures.hpp"
#include "gazescore/scoring.hpp"
#include "gazescore/simulate.hpp"
#include "helpers.hpp"

using namespace gazescore;

namespace {

// Dyadic-rational coefficients: with quarter-step annotations the noise-free
// durations are exactly integral, so integer rounding is lossless.
sim::ReaderProfile exact_profile() {
  sim::ReaderProfile p;
  p.duration = {120, 8, -12, 4};
  p.skip_logit = {-2.0, -0.3, 0.05, -0.05};
  p.regression_prob = 0;
  p.sigma_ms = 0;
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("sigma=0, p_reg=0 reader is exactly linear; OLS recovers the profile") {
  const auto sentences = sim::synthesize_sentences(30, 8, 12, 7);
  sim::GeneratorConfig g;
  g.n_esl = 3;
  g.n_native = 0;
  g.seed = 77;
  g.learner = exact_profile();
  g.native = exact_profile();
  const auto cohort = sim::generate_cohort(sentences, g);

  Dataset ds;
  ds.sentences = sentences;
  ds.participants = cohort.participants;
  ds.rebuild_index();
  const auto records = features::compute_records(ds);
  const auto space = features::build_feature_space(
      records, features::FeatureSet::WpCoefficients, Regime::Fixed, false);
  const auto m = features::extract_features(records, space);

  for (const auto& v : m.vectors) {
    // all four duration models coincide with the generating model
    for (int block = 0; block < 4; ++block) {
      const std::size_t off = static_cast<std::size_t>(block) * 4;
      CHECK(v.values[off + 0] == doctest::Approx(8.0).epsilon(1e-6));
      CHECK(v.values[off + 1] == doctest::Approx(-12.0).epsilon(1e-6));
      CHECK(v.values[off + 2] == doctest::Approx(4.0).epsilon(1e-6));
      CHECK(v.values[off + 3] == doctest::Approx(120.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("p=1 native cohort: prototype is close to every member, EyeScore >= 0.99") {
  const auto sentences = sim::synthesize_sentences(40, 9, 12, 13);
  sim::GeneratorConfig g;
  g.n_esl = 8;   // a spread cohort for the Z scaler
  g.n_native = 10;
  g.seed = 5;
  // identical natives: no duration noise or regressions, so every p=1 reader
  // produces the same gaze record up to skips drawn from the same stream
  g.learner.sigma_ms = 0;
  g.native.sigma_ms = 0;
  g.learner.regression_prob = 0;
  g.native.regression_prob = 0;
  g.learner.skip_logit = {-30, 0, 0, 0};
  g.native.skip_logit = {-30, 0, 0, 0};
  const auto cohort = sim::generate_cohort(sentences, g);
  Dataset ds;
  ds.sentences = sentences;
  ds.participants = cohort.participants;
  ds.rebuild_index();
  const auto records = features::compute_records(ds);

  const auto space = features::build_feature_space(
      records, features::FeatureSet::Wfc, Regime::Fixed, true);
  const auto matrix = features::extract_features(records, space);
  std::vector<std::vector<double>> esl, natives;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (records[i].group == Group::Esl ? esl : natives)
        .push_back(matrix.vectors[i].values);
  }
  const auto scaler = scoring::fit_zscaler(esl);
  const auto proto = scoring::build_prototype(natives, scaler);
  for (const auto& nat : natives) {
    CHECK(scoring::eyescore(nat, proto, scaler) >= 0.99);
  }
}

TEST_CASE("p_reg=0 cohort produces strictly rightward transitions") {
  const auto sentences = sim::synthesize_sentences(10, 6, 9, 3);
  sim::GeneratorConfig g;
  g.n_esl = 5;
  g.n_native = 0;
  g.seed = 11;
  g.learner.regression_prob = 0;
  g.native.regression_prob = 0;
  const auto cohort = sim::generate_cohort(sentences, g);
  for (const auto& p : cohort.participants) {
    for (const auto& t : p.trials) {
      for (std::size_t i = 1; i < t.fixations.size(); ++i) {
        CHECK(t.fixations[i].word_position > t.fixations[i - 1].word_position);
      }
    }
  }
}

TEST_CASE("same seed emits byte-identical CSV files") {
  const auto sentences = sim::synthesize_sentences(12, 7, 10, 19);
  sim::GeneratorConfig g;
  g.n_esl = 6;
  g.n_native = 2;
  g.seed = 99;
  g.score_noise_sd = 2;
  g.speed_log_sd = 0.2;

  const std::string d1 = testutil::temp_dir("sim_a");
  const std::string d2 = testutil::temp_dir("sim_b");
  for (const auto& dir : {d1, d2}) {
    const auto cohort = sim::generate_cohort(sentences, g);
    corpus::write_corpus(dir + "/tokens.csv", sentences);
    corpus::write_fixations(dir + "/fixations.csv", cohort.participants);
    corpus::write_scores(dir + "/scores.csv", cohort.scores);
  }
  for (const char* name : {"/tokens.csv", "/fixations.csv", "/scores.csv"}) {
    CHECK(slurp(d1 + name) == slurp(d2 + name));
  }
  // and a different seed changes the gaze record
  sim::GeneratorConfig g2 = g;
  g2.seed = 100;
  const auto other = sim::generate_cohort(sentences, g2);
  const std::string d3 = testutil::temp_dir("sim_c");
  corpus::write_fixations(d3 + "/fixations.csv", other.participants);
  CHECK(slurp(d1 + "/fixations.csv") != slurp(d3 + "/fixations.csv"));
}

TEST_CASE("scores follow round(p * max + noise) within [0, max]") {
  const auto sentences = sim::synthesize_sentences(6, 6, 8, 23);
  sim::GeneratorConfig g;
  g.n_esl = 40;
  g.n_native = 0;
  g.seed = 3;
  g.max_score = 50;
  const auto cohort = sim::generate_cohort(sentences, g);
  REQUIRE(cohort.scores.size() == 40);
  for (std::size_t i = 0; i < cohort.scores.size(); ++i) {
    const auto& s = cohort.scores[i];
    CHECK(s.test == TestKind::Synthetic);
    CHECK(s.score >= 0);
    CHECK(s.score <= 50);
    CHECK(s.score == std::round(s.score));
    CHECK(s.score ==
          doctest::Approx(std::round(cohort.truth[i].proficiency * 50)));
  }
}

TEST_CASE("mean EyeScore of high-p readers exceeds the low-p subcohort") {
  const auto sentences = sim::synthesize_sentences(40, 9, 12, 29);
  sim::GeneratorConfig g;
  g.n_esl = 40;
  g.n_native = 8;
  g.seed = 17;
  g.speed_log_sd = 0.3;
  const auto cohort = sim::generate_cohort(sentences, g);
  Dataset ds;
  ds.sentences = sentences;
  ds.participants = cohort.participants;
  ds.rebuild_index();
  const auto result = scoring::compute_eyescores(
      features::compute_records(ds), features::FeatureSet::Wfc, Regime::Fixed,
      true);
  double hi = 0, lo = 0;
  int nhi = 0, nlo = 0;
  for (const auto& t : cohort.truth) {
    auto it = result.scores.find(t.participant_id);
    if (it == result.scores.end()) continue;
    if (t.proficiency > 0.8) {
      hi += it->second;
      ++nhi;
    } else if (t.proficiency < 0.2) {
      lo += it->second;
      ++nlo;
    }
  }
  REQUIRE(nhi > 0);
  REQUIRE(nlo > 0);
  CHECK(hi / nhi > lo / nlo);
}

TEST_CASE("unannotated sentences are rejected") {
  auto sentences = sim::synthesize_sentences(3, 5, 6, 1);
  sentences[1].tokens[2].surprisal.reset();
  sim::GeneratorConfig g;
  g.n_esl = 1;
  CHECK_THROWS_WITH_AS(sim::generate_cohort(sentences, g),
                       doctest::Contains("not annotated"), DataError);
}

TEST_CASE("any-pool subsetting assigns regimes and respects the fraction") {
  const auto sentences = sim::synthesize_sentences(20, 6, 8, 37);
  sim::GeneratorConfig g;
  g.n_esl = 4;
  g.n_native = 0;
  g.seed = 7;
  g.any_read_fraction = 0.5;
  const auto cohort = sim::generate_cohort(sentences, g);
  for (const auto& p : cohort.participants) {
    int fixed = 0, any = 0;
    for (const auto& t : p.trials) {
      (t.regime == Regime::Fixed ? fixed : any)++;
    }
    CHECK(fixed == 10);  // shared suite read by everyone
    CHECK(any < 10);     // strict subset at fraction 0.5 (10 coin flips)
  }
}
