#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gazescore/types.hpp"

namespace gazescore::lm {

/// Raw token counts over a training corpus; used for the word log-frequency
/// predictor. OOV words receive a half-count floor so the log is finite.
struct FrequencyTable {
  std::unordered_map<std::string, long long> counts;
  long long total = 0;

  static FrequencyTable from_sentences(
      const std::vector<std::vector<std::string>>& sentences);

  /// ln(count / total); OOV -> ln(0.5 / total).
  double log_frequency(const std::string& word) const;
};

struct SurprisalResult {
  int word_position = 0;
  double surprisal = 0;  // natural log
};

/// Interpolated trigram model with modified Kneser-Ney smoothing
/// (three count-band discounts per order, estimated by count-of-counts).
/// Training is a batch operation; a trained model is immutable and safe for
/// concurrent queries.
///
/// Conventions, normative for this implementation:
///   - sentences are padded with two <s> symbols; </s> is predicted at the end
///   - the prediction vocabulary is all retained types plus <unk> and </s>;
///     <s> is context-only
///   - lower orders use continuation counts, except n-grams whose history
///     starts with <s>, which keep raw counts (<s> admits no history variety)
///   - the unigram level interpolates with the uniform distribution 1/|V|
///   - band discounts are clamped to [0, band]; a band with no members gets 0
class TrigramLm {
 public:
  static constexpr const char* kUnk = "<unk>";
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";

  /// Trains on whitespace-pre-tokenized sentences. Words occurring fewer than
  /// min_count times are mapped to <unk>.
  static TrigramLm train(const std::vector<std::vector<std::string>>& sentences,
                         int min_count = 1);

  /// P(word | context) where context holds up to the two preceding words; a
  /// shorter context queries the matching lower order of the interpolated
  /// model. Unknown words map to <unk>; the result is always finite and > 0.
  double prob(const std::string& word, std::span<const std::string> context) const;

  /// Per-token surprisal of a tokenized sentence, -ln P(w_i | w_{i-2} w_{i-1})
  /// with <s> padding. Does not include the </s> event.
  std::vector<double> surprisals(const std::vector<std::string>& words) const;

  std::vector<SurprisalResult> sentence_surprisals(const SentenceText& sentence) const;

  /// Prediction vocabulary (sorted; includes <unk> and </s>).
  const std::vector<std::string>& vocabulary() const { return vocab_; }

  /// Raw word counts recovered from the count tables (boundary and unknown
  /// symbols excluded), for the log-frequency predictor.
  FrequencyTable frequency_table() const;

  /// Discount for (order 1..3, count band 1..3).
  double discount(int order, int band) const;

  void save(const std::string& path) const;
  static TrigramLm load(const std::string& path);

 private:
  struct ContextStats {
    double total = 0;
    int n1 = 0, n2 = 0, n3p = 0;
  };

  std::vector<std::string> vocab_;  // prediction vocabulary, sorted
  std::unordered_map<std::string, int> word_id_;  // includes <s>
  int bos_id_ = -1, eos_id_ = -1, unk_id_ = -1;
  int min_count_ = 1;

  std::unordered_map<std::uint64_t, long long> tri_;   // raw trigram counts
  std::unordered_map<std::uint64_t, long long> bi_;    // raw bigram counts
  std::unordered_map<std::uint64_t, double> hat2_;     // modified bigram counts
  std::unordered_map<int, double> hat1_;               // modified unigram counts
  std::unordered_map<std::uint64_t, ContextStats> ctx3_;
  std::unordered_map<int, ContextStats> ctx2_;
  ContextStats uni_;
  std::array<std::array<double, 4>, 4> disc_{};  // [order][band]

  int map_id(const std::string& word) const;
  double p_uni(int w) const;
  double p_bi(int w, int v) const;
  double p_tri(int w, int u, int v) const;
  void build_derived();

  static std::uint64_t key2(int a, int b);
  static std::uint64_t key3(int a, int b, int c);
};

/// Reads a plain-text corpus, one sentence per line, whitespace-tokenized.
std::vector<std::vector<std::string>> read_text_corpus(const std::string& path);

}  // namespace gazescore::lm
