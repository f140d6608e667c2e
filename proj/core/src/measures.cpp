#include "gazescore/measures.hpp"

#include "gazescore/csv.hpp"
#include "gazescore/errors.hpp"

namespace gazescore::measures {

std::vector<WordMeasures> compute_word_measures(const TrialRecord& trial,
                                                const SentenceText& sentence) {
  const int n = sentence.length();
  std::vector<WordMeasures> out(static_cast<std::size_t>(n));
  for (int w = 0; w < n; ++w) {
    out[w].participant_id = trial.participant_id;
    out[w].sentence_id = trial.sentence_id;
    out[w].word_position = w + 1;
  }

  const auto& fix = trial.fixations;
  std::vector<int> first_entry(static_cast<std::size_t>(n), -1);

  for (std::size_t i = 0; i < fix.size(); ++i) {
    const int w = fix[i].word_position - 1;
    if (w < 0 || w >= n) {
      throw DataError("fixation word_position " +
                      std::to_string(fix[i].word_position) +
                      " outside sentence '" + sentence.sentence_id + "'");
    }
    WordMeasures& m = out[w];
    const double d = static_cast<double>(fix[i].duration_ms);
    m.tf_ms += d;
    if (first_entry[w] < 0) {
      first_entry[w] = static_cast<int>(i);
      m.skipped = false;
      m.ff_ms = d;
      // first pass: consecutive fixations on this word from first entry
      m.fp_ms = d;
      for (std::size_t j = i + 1; j < fix.size() && fix[j].word_position - 1 == w; ++j) {
        m.fp_ms += static_cast<double>(fix[j].duration_ms);
      }
    }
  }

  // regression path: from first entry until the first later fixation strictly
  // to the right; open-ended at trial end
  for (int w = 0; w < n; ++w) {
    if (first_entry[w] < 0) continue;
    double rp = 0;
    for (std::size_t j = static_cast<std::size_t>(first_entry[w]); j < fix.size(); ++j) {
      if (fix[j].word_position - 1 > w) break;
      rp += static_cast<double>(fix[j].duration_ms);
    }
    out[w].rp_ms = rp;
  }
  return out;
}

ReadingSpeed compute_reading_speed(const Participant& participant,
                                   const Dataset& dataset) {
  ReadingSpeed rs;
  rs.participant_id = participant.participant_id;
  for (const auto& trial : participant.trials) {
    rs.total_words += dataset.sentence(trial.sentence_id).length();
    for (const auto& f : trial.fixations) {
      rs.total_reading_ms += static_cast<double>(f.duration_ms);
    }
  }
  if (rs.total_reading_ms <= 0) {
    throw DataError("participant '" + participant.participant_id +
                    "' has no gaze data");
  }
  rs.words_per_second =
      static_cast<double>(rs.total_words) / (rs.total_reading_ms / 1000.0);
  return rs;
}

void write_measures_csv(const std::string& path,
                        const std::vector<WordMeasures>& measures) {
  CsvWriter out(path, {"participant_id", "sentence_id", "word_position", "ff",
                       "fp", "tf", "rp", "skipped"});
  for (const auto& m : measures) {
    out.row({m.participant_id, m.sentence_id, format_int(m.word_position),
             format_double(m.ff_ms), format_double(m.fp_ms),
             format_double(m.tf_ms), format_double(m.rp_ms),
             m.skipped ? "1" : "0"});
  }
}

}  // namespace gazescore::measures
