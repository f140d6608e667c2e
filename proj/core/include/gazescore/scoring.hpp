#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gazescore/features.hpp"
#include "gazescore/types.hpp"

namespace gazescore::scoring {

/// Per-feature standardization fitted on the ESL cohort (population standard
/// deviation). Zero-variance features keep std = 1 so they scale to 0.
struct ZScaler {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<char> zero_variance;
  std::string population;
};

ZScaler fit_zscaler(const std::vector<std::vector<double>>& rows,
                    std::string population = "esl");

std::vector<double> apply_zscaler(const ZScaler& scaler,
                                  const std::vector<double>& row);

/// Mean of the Z-scored native vectors.
struct NativePrototype {
  std::vector<double> values;
};

NativePrototype build_prototype(const std::vector<std::vector<double>>& native_rows,
                                const ZScaler& scaler);

/// Cosine similarity of the Z-scored participant vector to the prototype.
double eyescore(const std::vector<double>& participant_row,
                const NativePrototype& prototype, const ZScaler& scaler);

struct RidgeModel {
  std::vector<double> weights;
  double intercept = 0;
  double lambda = 0;

  double predict(const std::vector<double>& row) const;
};

/// Squared-error loss with an L2 penalty on the weights; the intercept stays
/// unpenalized via feature/target centering. When augment_native is set the
/// native rows are appended with target max_score before fitting.
RidgeModel ridge_fit(const std::vector<std::vector<double>>& x,
                     const std::vector<double>& y, double lambda,
                     bool augment_native = false,
                     const std::vector<std::vector<double>>& native_x = {},
                     double max_score = 0);

double ridge_predict(const RidgeModel& model, const std::vector<double>& row);
double clamp_score(double value, double max_score);

double pearson_r(const std::vector<double>& x, const std::vector<double>& y);
double mae(const std::vector<double>& x, const std::vector<double>& y);

struct EvalPair {
  std::string participant_id;
  double truth = 0;
  double predicted = 0;
};

/// pearson_r is absent when it is undefined for the stored pairs (constant
/// predictions or n < 2).
struct EvalReport {
  std::optional<double> pearson_r;
  double mae = 0;
  std::size_t n = 0;
  std::vector<EvalPair> pairs;
};

EvalReport eval_from_pairs(std::vector<EvalPair> pairs);

/// Train/test partition of the ESL cohort: the full held-out native language
/// plus per_language_sample seeded-random speakers of each other language.
struct DataSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::string held_out_language;
};

DataSplit make_split(const std::vector<Participant>& cohort,
                     const std::string& held_out_language,
                     int per_language_sample, std::uint64_t seed);

struct RidgePipelineConfig {
  double lambda = 1.0;
  std::vector<double> lambda_grid;  // tune by CV when it has > 1 entries
  int cv_folds = 10;
  bool augment_native = true;
  double max_score = 50;
  bool clamp = false;
  std::uint64_t seed = 1;
};

/// Default grid used when tuning is requested without an explicit grid.
std::vector<double> default_lambda_grid();

/// k-fold cross validation on the training rows minimizing mean MAE across
/// folds; ties take the smaller lambda. Each fold refits the Z scaler on its
/// own training part. Fold assignment is seeded-deterministic.
double tune_lambda(const std::vector<std::vector<double>>& train_rows,
                   const std::vector<double>& train_scores,
                   const std::vector<double>& grid, int folds,
                   std::uint64_t seed, bool augment_native,
                   const std::vector<std::vector<double>>& native_rows,
                   double max_score);

struct PredictOutcome {
  EvalReport report;
  double lambda_used = 0;
};

/// Full prediction protocol on a fixed split: Z scaler fitted on the ESL
/// training rows, applied everywhere; optional lambda tuning; optional native
/// augmentation at max_score.
PredictOutcome predict_split(const std::vector<std::vector<double>>& esl_rows,
                             const std::vector<std::string>& esl_ids,
                             const std::map<std::string, double>& scores,
                             const std::vector<std::vector<double>>& native_rows,
                             const DataSplit& split,
                             const RidgePipelineConfig& config);

/// Leave-one-out over the ESL cohort with a fixed lambda (1 by default per
/// config); every left-out participant is predicted by a model trained on the
/// others plus the optional native augmentation.
EvalReport loocv_predict(const std::vector<std::vector<double>>& esl_rows,
                         const std::vector<std::string>& esl_ids,
                         const std::map<std::string, double>& scores,
                         const std::vector<std::vector<double>>& native_rows,
                         const RidgePipelineConfig& config);

/// Constant predictor at the training-score mean.
EvalReport baseline_mean(const std::vector<double>& train_scores,
                         const std::vector<EvalPair>& test_truth);

/// EyeScore for every ESL participant: space built over all records, Z scaler
/// over the ESL cohort, prototype from natives, cosine per participant.
struct EyeScoreResult {
  features::FeatureSpace space;
  std::map<std::string, double> scores;  // ESL participants
};

EyeScoreResult compute_eyescores(const std::vector<features::ParticipantRecord>& records,
                                 features::FeatureSet set, Regime regime,
                                 bool speed_normalized, int threads = 1);

struct SplitHalfResult {
  double r = 0;
  double spearman_brown = 0;
  std::size_t n = 0;
  int excluded = 0;
};

/// Partitions each participant's in-regime sentences into two halves (one
/// shared seeded partition of the fixed suite for token-level sets), runs the
/// EyeScore pipeline per half and correlates the half-scores across the ESL
/// cohort. Participants with fewer than two in-regime trials are excluded.
SplitHalfResult split_half_consistency(const Dataset& dataset,
                                       features::FeatureSet set, Regime regime,
                                       bool speed_normalized, std::uint64_t seed);

// JSON model artifacts, keyed by feature name.
void save_scaler_json(const std::string& path, const ZScaler& scaler,
                      const std::vector<std::string>& names);
ZScaler load_scaler_json(const std::string& path,
                         const std::vector<std::string>& names);
void save_prototype_json(const std::string& path, const NativePrototype& proto,
                         const std::vector<std::string>& names);
NativePrototype load_prototype_json(const std::string& path,
                                    const std::vector<std::string>& names);
void save_ridge_json(const std::string& path, const RidgeModel& model,
                     const std::vector<std::string>& names);
RidgeModel load_ridge_json(const std::string& path,
                           const std::vector<std::string>& names);

}  // namespace gazescore::scoring
