#pragma once

#include <string>
#include <vector>

#include "gazescore/linear.hpp"
#include "gazescore/measures.hpp"
#include "gazescore/types.hpp"

namespace gazescore::features {

enum class FeatureSet { WpCoefficients, SClusters, Transitions, Wfc };

std::string to_string(FeatureSet s);
FeatureSet feature_set_from_string(const std::string& s);

/// True for the token-level sets (Transitions, WFC) that presuppose a shared
/// sentence suite and are therefore Fixed-regime only.
bool token_level(FeatureSet s);

/// One participant's word measures, grouped by trial, with the sentence they
/// were read from. Sentences are borrowed from the Dataset, which must
/// outlive the records.
struct TrialMeasures {
  const SentenceText* sentence = nullptr;
  Regime regime = Regime::Fixed;
  std::vector<measures::WordMeasures> words;
  std::vector<FixationEvent> fixations;  // for saccade-based features
};

struct ParticipantRecord {
  std::string participant_id;
  Group group = Group::Esl;
  std::string native_language;
  std::vector<TrialMeasures> trials;
};

std::vector<ParticipantRecord> compute_records(const Dataset& dataset);

/// Reading-speed normalization: each word's metric divided by the
/// mean of that metric over the context (skipped words count as zero in the
/// mean). Context is the surrounding sentence in the Fixed Text regime and
/// the participant's entire in-regime text in the Any Text regime. A context
/// whose mean is zero yields zeros and is counted in zero_contexts.
enum class NormContext { Sentence, AllText };

struct NormReport {
  int zero_contexts = 0;
};

std::vector<TrialMeasures> speed_normalize(const std::vector<TrialMeasures>& trials,
                                           NormContext context,
                                           NormReport* report = nullptr);

/// An ordered, named feature coordinate system. names defines the canonical
/// column order of every vector extracted against this space. Name formats:
///   wp/FF/beta_length        wp/SKIP/intercept
///   sclust/TF/xpos/DT
///   trans/s012/3->5
///   wfc/FP/s012/w03
struct FeatureSpace {
  FeatureSet set = FeatureSet::WpCoefficients;
  Regime regime = Regime::Fixed;
  bool speed_normalized = false;
  bool transitions_include_refixations = false;
  std::vector<std::string> names;
};

struct FeatureVector {
  std::string participant_id;
  std::vector<double> values;  // aligned with the space's names
};

struct FeatureMatrix {
  FeatureSpace space;
  std::vector<FeatureVector> vectors;

  const FeatureVector* find(const std::string& participant_id) const;
};

/// Deterministic space construction. S-Cluster labels are intersected across
/// participants (a label qualifies for a participant when it tags at least
/// one non-skipped in-regime word); Transition cells are the union of cells
/// that are non-zero for at least one participant; the WFC space covers every
/// word of the fixed suite regardless of participants.
FeatureSpace build_feature_space(const std::vector<ParticipantRecord>& records,
                                 FeatureSet set, Regime regime,
                                 bool speed_normalized,
                                 bool transitions_include_refixations = false);

/// Extracts one aligned vector per participant. threads > 1 distributes
/// participants across worker threads; output order is independent of it.
FeatureMatrix extract_features(const std::vector<ParticipantRecord>& records,
                               const FeatureSpace& space, int threads = 1);

FeatureVector extract_wp_coefficients(const ParticipantRecord& record,
                                      const FeatureSpace& space);
FeatureVector extract_s_clusters(const ParticipantRecord& record,
                                 const FeatureSpace& space);
FeatureVector extract_transitions(const ParticipantRecord& record,
                                  const FeatureSpace& space);
FeatureVector extract_wfc(const ParticipantRecord& record,
                          const FeatureSpace& space);

/// OLS over the three word-property predictors [length, logfreq, surprisal].
/// Requires at least 5 rows.
linear::LinearFit fit_ols(const std::vector<std::vector<double>>& x,
                          const std::vector<double>& y);

/// Logistic skip model over the same predictors; both classes required.
linear::LinearFit fit_logistic_skip(const std::vector<std::vector<double>>& x,
                                    const std::vector<char>& skipped);

void write_features_csv(const std::string& path, const FeatureMatrix& matrix);
void write_space_manifest(const std::string& path, const FeatureSpace& space);

}  // namespace gazescore::features
