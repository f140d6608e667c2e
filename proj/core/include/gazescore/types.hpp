#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gazescore {

/// Fixed Text: all participants read the same sentence suite, enabling
/// token-level features. Any Text: sentence sets differ per participant,
/// only type-level features apply.
enum class Regime { Fixed, Any };

enum class Group { Native, Esl };

enum class TestKind { Met, Toefl, Synthetic };

std::string to_string(Regime r);
std::string to_string(Group g);
std::string to_string(TestKind t);
Regime regime_from_string(const std::string& s);
Group group_from_string(const std::string& s);
TestKind test_from_string(const std::string& s);

/// One word of a sentence with its linguistic annotations. log_frequency and
/// surprisal start unset; feature extraction that needs them fails loudly
/// rather than silently reading zeros.
struct TokenAnnotation {
  int position = 0;  // 1-based
  std::string surface;
  int length_chars = 0;  // unicode code points in surface
  std::string upos;
  std::string xpos;
  std::string deprel;
  std::optional<double> log_frequency;
  std::optional<double> surprisal;
};

struct SentenceText {
  std::string sentence_id;
  std::vector<TokenAnnotation> tokens;

  int length() const { return static_cast<int>(tokens.size()); }
};

struct FixationEvent {
  int order = 0;          // 0-based within the trial
  int word_position = 0;  // 1-based token index
  long duration_ms = 0;   // > 0
};

struct TrialRecord {
  std::string participant_id;
  std::string sentence_id;
  Regime regime = Regime::Fixed;
  std::vector<FixationEvent> fixations;
};

struct Participant {
  std::string participant_id;
  Group group = Group::Esl;
  std::string native_language;
  std::vector<TrialRecord> trials;
};

struct ScoreRecord {
  std::string participant_id;
  TestKind test = TestKind::Synthetic;
  double score = 0;
  double max_score = 0;
};

/// Number of unicode code points in a UTF-8 string.
int utf8_length(const std::string& s);

/// A loaded corpus plus participants and scores, with id lookup.
struct Dataset {
  std::vector<SentenceText> sentences;
  std::vector<Participant> participants;
  std::vector<ScoreRecord> scores;

  const SentenceText& sentence(const std::string& sentence_id) const;
  const SentenceText* find_sentence(const std::string& sentence_id) const;
  const Participant* find_participant(const std::string& participant_id) const;

  /// Scores for one test, keyed by participant.
  std::map<std::string, double> scores_for(TestKind test) const;

  void rebuild_index();

 private:
  std::map<std::string, std::size_t> sentence_index_;
};

}  // namespace gazescore
