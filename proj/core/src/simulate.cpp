#include "gazescore/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "gazescore/errors.hpp"
#include "gazescore/rng.hpp"

namespace gazescore::sim {

double WordModel::eval(const TokenAnnotation& token) const {
  if (!token.log_frequency || !token.surprisal) {
    throw DataError("token '" + token.surface +
                    "' lacks log_frequency/surprisal; the generator needs "
                    "annotated sentences");
  }
  return intercept + beta_length * token.length_chars +
         beta_logfreq * *token.log_frequency + beta_surprisal * *token.surprisal;
}

namespace {

double lerp(double a, double b, double p) { return a + p * (b - a); }

WordModel lerp_model(const WordModel& a, const WordModel& b, double p) {
  return {lerp(a.intercept, b.intercept, p),
          lerp(a.beta_length, b.beta_length, p),
          lerp(a.beta_logfreq, b.beta_logfreq, p),
          lerp(a.beta_surprisal, b.beta_surprisal, p)};
}

double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

ReaderProfile lerp_profile(const ReaderProfile& learner,
                           const ReaderProfile& native, double p) {
  ReaderProfile out;
  out.proficiency = p;
  out.duration = lerp_model(learner.duration, native.duration, p);
  out.skip_logit = lerp_model(learner.skip_logit, native.skip_logit, p);
  out.regression_prob = lerp(learner.regression_prob, native.regression_prob, p);
  out.sigma_ms = lerp(learner.sigma_ms, native.sigma_ms, p);
  return out;
}

// Endpoint profiles: learners read slower with stronger sensitivity to word
// length, frequency and surprisal; skipping depends on word properties only.
ReaderProfile default_learner_profile() {
  ReaderProfile p;
  p.proficiency = 0;
  p.duration = {140, 22, -20, 12};
  p.skip_logit = {-2.4, -0.35, 0.06, -0.05};
  p.regression_prob = 0.15;
  p.sigma_ms = 15;
  return p;
}

ReaderProfile default_native_profile() {
  ReaderProfile p;
  p.proficiency = 1;
  p.duration = {100, 5, -3, 2};
  p.skip_logit = {-2.4, -0.35, 0.06, -0.05};
  p.regression_prob = 0.05;
  p.sigma_ms = 15;
  return p;
}

namespace {

long draw_duration(const ReaderProfile& profile, const TokenAnnotation& token,
                   double speed_factor, Rng& rng) {
  double d = profile.duration.eval(token);
  if (profile.sigma_ms > 0) d += rng.normal(0, profile.sigma_ms);
  d = std::max(30.0, d) * speed_factor;
  return std::max(1ll, std::llround(d));
}

TrialRecord generate_trial(const std::string& participant_id,
                           const SentenceText& sentence, Regime regime,
                           const ReaderProfile& profile, double speed_factor,
                           Rng& rng) {
  TrialRecord trial;
  trial.participant_id = participant_id;
  trial.sentence_id = sentence.sentence_id;
  trial.regime = regime;

  int order = 0;
  for (const auto& token : sentence.tokens) {
    const double p_skip = sigmoid(profile.skip_logit.eval(token));
    if (rng.bernoulli(p_skip)) continue;
    trial.fixations.push_back(
        {order++, token.position, draw_duration(profile, token, speed_factor, rng)});
    if (token.position > 1 && rng.bernoulli(profile.regression_prob)) {
      const int back =
          1 + static_cast<int>(rng.index(static_cast<std::size_t>(token.position - 1)));
      const auto& back_tok = sentence.tokens[static_cast<std::size_t>(back - 1)];
      trial.fixations.push_back(
          {order++, back, draw_duration(profile, back_tok, speed_factor, rng)});
      trial.fixations.push_back(
          {order++, token.position,
           draw_duration(profile, token, speed_factor, rng)});
    }
  }
  return trial;
}

}  // namespace

SyntheticCohort generate_cohort(const std::vector<SentenceText>& sentences,
                                const GeneratorConfig& config) {
  if (sentences.empty()) throw DataError("generator needs at least one sentence");
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      if (!t.log_frequency || !t.surprisal) {
        throw DataError("sentence '" + s.sentence_id +
                        "' is not annotated; fill log_frequency and surprisal "
                        "before simulating");
      }
    }
  }
  if (config.n_esl < 0 || config.n_native < 0 || config.n_languages < 1) {
    throw UsageError("invalid generator configuration");
  }

  const std::size_t n_fixed = std::min(
      sentences.size(),
      static_cast<std::size_t>(std::ceil(config.fixed_fraction *
                                         static_cast<double>(sentences.size()))));
  std::vector<const SentenceText*> fixed_suite, any_pool;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    (i < n_fixed ? fixed_suite : any_pool).push_back(&sentences[i]);
  }

  SyntheticCohort cohort;
  const int total = config.n_esl + config.n_native;
  for (int i = 0; i < total; ++i) {
    const bool is_native = i >= config.n_esl;
    Rng rng(config.seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(i));

    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), is_native ? "nat%03d" : "esl%03d",
                  is_native ? i - config.n_esl : i);

    Participant reader;
    reader.participant_id = idbuf;
    reader.group = is_native ? Group::Native : Group::Esl;
    reader.native_language =
        is_native ? "english"
                  : "L" + std::to_string(i % config.n_languages + 1);

    const double p = is_native ? 1.0 : rng.uniform();
    const ReaderProfile profile = lerp_profile(config.learner, config.native, p);
    const double speed_factor =
        config.speed_log_sd > 0 ? std::exp(rng.normal(0, config.speed_log_sd)) : 1.0;

    for (const auto* s : fixed_suite) {
      reader.trials.push_back(generate_trial(reader.participant_id, *s,
                                             Regime::Fixed, profile,
                                             speed_factor, rng));
    }
    for (const auto* s : any_pool) {
      if (config.any_read_fraction < 1.0 &&
          !rng.bernoulli(config.any_read_fraction)) {
        continue;
      }
      reader.trials.push_back(generate_trial(reader.participant_id, *s,
                                             Regime::Any, profile, speed_factor,
                                             rng));
    }

    if (!is_native) {
      double score = p * config.max_score;
      if (config.score_noise_sd > 0) score += rng.normal(0, config.score_noise_sd);
      score = std::min(std::max(std::round(score), 0.0), config.max_score);
      cohort.scores.push_back(
          {reader.participant_id, TestKind::Synthetic, score, config.max_score});
    }
    cohort.truth.push_back({reader.participant_id, p, profile, speed_factor});
    cohort.participants.push_back(std::move(reader));
  }
  return cohort;
}

std::vector<SentenceText> synthesize_sentences(int n_sentences,
                                               int words_per_sentence_min,
                                               int words_per_sentence_max,
                                               std::uint64_t seed) {
  if (n_sentences < 1 || words_per_sentence_min < 1 ||
      words_per_sentence_max < words_per_sentence_min) {
    throw UsageError("invalid sentence synthesis parameters");
  }
  static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m",
                                  "n", "p", "r", "s", "t", "v"};
  static const char* kNuclei[] = {"a", "e", "i", "o", "u"};
  static const char* kUpos[] = {"NOUN", "VERB", "ADJ", "DET", "ADP", "PRON"};
  static const char* kXpos[] = {"NN", "VB", "JJ", "DT", "IN", "PRP", "NNS", "VBD"};
  static const char* kDeprel[] = {"nsubj", "obj", "det", "amod", "root", "case"};

  Rng rng(seed);
  std::vector<SentenceText> out;
  out.reserve(static_cast<std::size_t>(n_sentences));
  for (int s = 0; s < n_sentences; ++s) {
    SentenceText sent;
    char sid[16];
    std::snprintf(sid, sizeof(sid), "s%03d", s);
    sent.sentence_id = sid;
    const int n_words =
        words_per_sentence_min +
        static_cast<int>(rng.index(static_cast<std::size_t>(
            words_per_sentence_max - words_per_sentence_min + 1)));
    for (int w = 0; w < n_words; ++w) {
      TokenAnnotation tok;
      tok.position = w + 1;
      const int syllables = 1 + static_cast<int>(rng.index(4));
      for (int k = 0; k < syllables; ++k) {
        tok.surface += kOnsets[rng.index(std::size(kOnsets))];
        tok.surface += kNuclei[rng.index(std::size(kNuclei))];
      }
      tok.length_chars = utf8_length(tok.surface);
      tok.upos = kUpos[rng.index(std::size(kUpos))];
      tok.xpos = kXpos[rng.index(std::size(kXpos))];
      tok.deprel = kDeprel[rng.index(std::size(kDeprel))];
      // quarter-step quantization keeps noise-free durations integral for
      // integer-coefficient profiles
      tok.log_frequency = std::round(rng.uniform(-10.0, -2.0) * 4.0) / 4.0;
      tok.surprisal = std::round(rng.uniform(0.5, 12.0) * 4.0) / 4.0;
      sent.tokens.push_back(std::move(tok));
    }
    out.push_back(std::move(sent));
  }
  return out;
}

}  // namespace gazescore::sim
