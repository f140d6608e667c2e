#pragma once

#include <string>
#include <vector>

#include "gazescore/types.hpp"

namespace gazescore::measures {

/// Per-word fixation metrics for one participant-trial.
///
///   FF  duration of the first fixation on the word
///   FP  sum of consecutive fixations from first entering the word until the
///       gaze first leaves it (re-fixations within the word included)
///   TF  sum of all fixations on the word across the trial
///   RP  sum of all fixation durations from first entry to the word until the
///       first later fixation on any word to its right (exclusive); when no
///       such fixation exists, RP runs to the end of the trial
///
/// A skipped word (never fixated) has all four durations equal to zero.
struct WordMeasures {
  std::string participant_id;
  std::string sentence_id;
  int word_position = 0;
  double ff_ms = 0;
  double fp_ms = 0;
  double tf_ms = 0;
  double rp_ms = 0;
  bool skipped = true;
};

struct ReadingSpeed {
  std::string participant_id;
  double words_per_second = 0;
  long total_words = 0;
  double total_reading_ms = 0;
};

/// One WordMeasures per token of the sentence, in position order. An empty
/// fixation list yields all-skipped words.
std::vector<WordMeasures> compute_word_measures(const TrialRecord& trial,
                                                const SentenceText& sentence);

/// Words per second over every trial of the participant. total_words counts
/// the full length of each sentence read (skipped words included).
ReadingSpeed compute_reading_speed(const Participant& participant,
                                   const Dataset& dataset);

void write_measures_csv(const std::string& path,
                        const std::vector<WordMeasures>& measures);

}  // namespace gazescore::measures
