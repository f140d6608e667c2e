#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gazescore::cli {

/// Resolved configuration of one CLI run. Values come from built-in defaults,
/// then an optional JSON config file, then command-line flags, in that order;
/// the GAZESCORE_SEED environment variable overrides the seed last.
struct RunConfig {
  std::string tokens;
  std::string fixations;
  std::string scores;
  std::string lm_corpus;
  std::string lm_model;
  std::string out_dir;
  std::string report_path;

  std::string feature_set = "wfc";
  std::string regime = "fixed";
  bool speed_normalized = false;
  // -1 unset, 0 false, 1 true; flags beat the config file, which beats the
  // per-command default (eyescore normalizes for speed, predict does not)
  int speed_norm_cli = -1;
  int speed_norm_file = -1;

  double lambda = 1.0;
  std::vector<double> lambda_grid;
  int cv_folds = 10;
  bool loocv = false;
  std::string held_out_language;
  int per_language_sample = 7;
  std::string test = "SYNTHETIC";
  double max_score = 50;
  bool clamp = false;
  bool augment_native = true;

  std::uint64_t seed = 1;
  int threads = 1;
  int min_count = 1;

  // simulate
  int readers = 20;
  int natives = 10;
  int languages = 4;
  int synth_sentences = 0;
  int words_min = 9;
  int words_max = 13;
  double score_noise_sd = 0;
  double speed_log_sd = 0;
  double sigma_ms = -1;         // < 0 keeps profile defaults
  double regression_prob = -1;  // < 0 keeps profile defaults
  double any_fraction = 1.0;

  std::string measures_out;
  std::string x_label;
  std::string y_label;
};

/// Exit codes: 0 success, 2 usage/config error, 3 data validation error,
/// 4 numeric failure.
int run(int argc, const char* const* argv);

}  // namespace gazescore::cli
