#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gazescore/types.hpp"

namespace gazescore::sim {

/// Linear word model over [length_chars, log_frequency, surprisal].
struct WordModel {
  double intercept = 0;
  double beta_length = 0;
  double beta_logfreq = 0;
  double beta_surprisal = 0;

  double eval(const TokenAnnotation& token) const;
};

/// Generative profile of one reader. Profiles interpolate linearly between a
/// LEARNER endpoint (proficiency 0) and a NATIVE endpoint (proficiency 1).
struct ReaderProfile {
  double proficiency = 0;
  WordModel duration;    // first-pass fixation duration, ms
  WordModel skip_logit;  // P(skip) = sigmoid(skip_logit)
  double regression_prob = 0;  // chance of one regressive saccade per word
  double sigma_ms = 0;         // duration noise
};

ReaderProfile lerp_profile(const ReaderProfile& learner,
                           const ReaderProfile& native, double p);

ReaderProfile default_learner_profile();
ReaderProfile default_native_profile();

struct GeneratorConfig {
  int n_esl = 0;
  int n_native = 0;
  int n_languages = 4;
  double fixed_fraction = 0.5;    // leading share of sentences in Fixed Text
  double any_read_fraction = 1.0; // share of the Any pool each reader reads
  double max_score = 50;
  double score_noise_sd = 0;      // score = round(p * max + N(0, sd)), clamped
  double speed_log_sd = 0;        // reader-specific lognormal pace multiplier
  std::uint64_t seed = 1;
  ReaderProfile learner = default_learner_profile();
  ReaderProfile native = default_native_profile();
};

/// Ground truth retained per generated reader, for recovery oracles.
struct ReaderTruth {
  std::string participant_id;
  double proficiency = 0;
  ReaderProfile profile;
  double speed_factor = 1;
};

struct SyntheticCohort {
  std::vector<Participant> participants;
  std::vector<ScoreRecord> scores;  // SYNTHETIC records for ESL readers
  std::vector<ReaderTruth> truth;
};

/// Generates fixation records from the profile model. Per word: skip with
/// probability sigmoid(skip_logit); otherwise one first-pass fixation of
/// duration round(speed_factor * max(30, N(duration, sigma))); with
/// probability regression_prob one regressive saccade to a uniformly chosen
/// earlier word followed by a return fixation. Reader i draws from a stream
/// seeded with (seed, i), so generation is order-independent per reader.
/// Sentences must carry log_frequency and surprisal annotations.
SyntheticCohort generate_cohort(const std::vector<SentenceText>& sentences,
                                const GeneratorConfig& config);

/// Synthetic annotated sentences for desk-scale runs. Surfaces are
/// pronounceable nonsense; log_frequency and surprisal are drawn uniformly
/// and quantized to 1/4 steps so integer-coefficient profiles produce
/// exactly integral noise-free durations.
std::vector<SentenceText> synthesize_sentences(int n_sentences,
                                               int words_per_sentence_min,
                                               int words_per_sentence_max,
                                               std::uint64_t seed);

}  // namespace gazescore::sim
