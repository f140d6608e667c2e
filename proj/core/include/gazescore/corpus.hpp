#pragma once

#include <string>
#include <vector>

#include "gazescore/types.hpp"

namespace gazescore::corpus {

// Pure parsing into immutable values; loaded datasets are read-only and safe
// to share across concurrent feature-extraction workers.
//
// On-disk formats (all header-bearing UTF-8 CSV, LF line endings):
//   tokens.csv    sentence_id,position,surface,upos,xpos,deprel
//                 (optional trailing columns: log_frequency,surprisal)
//   fixations.csv participant_id,group,native_language,sentence_id,regime,
//                 order,word_position,duration_ms
//   scores.csv    participant_id,test,score,max_score

std::vector<SentenceText> load_corpus(const std::string& tokens_path);

std::vector<Participant> load_fixations(const std::string& fixations_path,
                                        const std::vector<SentenceText>& corpus);

std::vector<ScoreRecord> load_scores(const std::string& scores_path);

/// Loads all three files into a Dataset (scores_path may be empty).
Dataset load_dataset(const std::string& tokens_path,
                     const std::string& fixations_path,
                     const std::string& scores_path = "");

void write_corpus(const std::string& tokens_path,
                  const std::vector<SentenceText>& sentences);
void write_fixations(const std::string& fixations_path,
                     const std::vector<Participant>& participants);
void write_scores(const std::string& scores_path,
                  const std::vector<ScoreRecord>& scores);

}  // namespace gazescore::corpus
