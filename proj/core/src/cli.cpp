#include "gazescore/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gazescore/corpus.hpp"
#include "gazescore/csv.hpp"
#include "gazescore/errors.hpp"
#include "gazescore/features.hpp"
#include "gazescore/langmodel.hpp"
#include "gazescore/measures.hpp"
#include "gazescore/report.hpp"
#include "gazescore/scoring.hpp"
#include "gazescore/simulate.hpp"

namespace gazescore::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) {
    throw UsageError("missing required path: " + flag);
  }
  if (!fs::exists(path)) {
    throw UsageError(flag + ": file does not exist: " + path);
  }
}

void require_out_dir(const std::string& out_dir) {
  if (out_dir.empty()) throw UsageError("missing required path: --out-dir");
}

void make_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw UsageError("cannot create output directory: " + out_dir);
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

features::FeatureSet parse_set(const RunConfig& cfg) {
  return features::feature_set_from_string(cfg.feature_set);
}

Regime parse_regime(const RunConfig& cfg) {
  if (cfg.regime == "fixed") return Regime::Fixed;
  if (cfg.regime == "any") return Regime::Any;
  throw UsageError("unknown regime '" + cfg.regime + "' (expected fixed or any)");
}

void check_compatibility(const RunConfig& cfg) {
  if (features::token_level(parse_set(cfg)) && parse_regime(cfg) == Regime::Any) {
    throw UsageError("feature set '" + cfg.feature_set +
                     "' is token-level and requires --regime fixed");
  }
}

void apply_env_seed(RunConfig& cfg) {
  if (const char* env = std::getenv("GAZESCORE_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      throw UsageError("GAZESCORE_SEED is not an integer: " + std::string(env));
    }
    cfg.seed = v;
  }
}

std::map<std::string, std::string> config_echo(const RunConfig& cfg,
                                               const std::string& command) {
  std::map<std::string, std::string> echo;
  echo["command"] = command;
  echo["feature_set"] = cfg.feature_set;
  echo["regime"] = cfg.regime;
  echo["speed_normalized"] = cfg.speed_normalized ? "true" : "false";
  echo["test"] = cfg.test;
  echo["seed"] = std::to_string(cfg.seed);
  echo["threads"] = std::to_string(cfg.threads);
  return echo;
}

Dataset load_inputs(const RunConfig& cfg, bool need_scores) {
  require_file(cfg.tokens, "--tokens");
  require_file(cfg.fixations, "--fixations");
  if (need_scores || !cfg.scores.empty()) require_file(cfg.scores, "--scores");
  return corpus::load_dataset(cfg.tokens, cfg.fixations, cfg.scores);
}

// ---- subcommands ----------------------------------------------------------

int cmd_ingest_validate(const RunConfig& cfg) {
  const Dataset ds = load_inputs(cfg, false);
  long trials = 0, fixations = 0;
  for (const auto& p : ds.participants) {
    trials += static_cast<long>(p.trials.size());
    for (const auto& t : p.trials) fixations += static_cast<long>(t.fixations.size());
  }
  std::printf("sentences: %zu\nparticipants: %zu\ntrials: %ld\nfixations: %ld\nscores: %zu\n",
              ds.sentences.size(), ds.participants.size(), trials, fixations,
              ds.scores.size());
  if (!cfg.measures_out.empty()) {
    std::vector<measures::WordMeasures> all;
    for (const auto& p : ds.participants) {
      for (const auto& t : p.trials) {
        auto ms = measures::compute_word_measures(t, ds.sentence(t.sentence_id));
        all.insert(all.end(), ms.begin(), ms.end());
      }
    }
    measures::write_measures_csv(cfg.measures_out, all);
    std::printf("measures written: %s\n", cfg.measures_out.c_str());
  }
  return 0;
}

int cmd_lm_train(const RunConfig& cfg) {
  require_file(cfg.lm_corpus, "--corpus");
  if (cfg.lm_model.empty()) throw UsageError("missing required path: --out");
  const auto sentences = lm::read_text_corpus(cfg.lm_corpus);
  const auto model = lm::TrigramLm::train(sentences, cfg.min_count);
  model.save(cfg.lm_model);
  std::printf("model written: %s (vocabulary %zu)\n", cfg.lm_model.c_str(),
              model.vocabulary().size());
  return 0;
}

int cmd_annotate_surprisal(const RunConfig& cfg) {
  require_file(cfg.lm_model, "--model");
  require_file(cfg.tokens, "--tokens");
  const std::string out = cfg.out_dir.empty() ? cfg.tokens : cfg.out_dir;
  const auto model = lm::TrigramLm::load(cfg.lm_model);
  const auto freq = model.frequency_table();
  auto sentences = corpus::load_corpus(cfg.tokens);
  for (auto& s : sentences) {
    const auto surp = model.sentence_surprisals(s);
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      s.tokens[i].surprisal = surp[i].surprisal;
      s.tokens[i].log_frequency = freq.log_frequency(s.tokens[i].surface);
    }
  }
  corpus::write_corpus(out, sentences);
  std::printf("annotated tokens written: %s\n", out.c_str());
  return 0;
}

int cmd_features(const RunConfig& cfg) {
  check_compatibility(cfg);
  require_out_dir(cfg.out_dir);
  const Dataset ds = load_inputs(cfg, false);
  const auto records = features::compute_records(ds);
  const auto space = features::build_feature_space(
      records, parse_set(cfg), parse_regime(cfg), cfg.speed_normalized);
  const auto matrix = features::extract_features(records, space, cfg.threads);
  make_out_dir(cfg.out_dir);
  features::write_features_csv(join(cfg.out_dir, "features.csv"), matrix);
  features::write_space_manifest(join(cfg.out_dir, "space_manifest.txt"), space);
  if (!cfg.measures_out.empty()) {
    std::vector<measures::WordMeasures> all;
    for (const auto& p : ds.participants) {
      for (const auto& t : p.trials) {
        auto ms = measures::compute_word_measures(t, ds.sentence(t.sentence_id));
        all.insert(all.end(), ms.begin(), ms.end());
      }
    }
    measures::write_measures_csv(cfg.measures_out, all);
  }
  std::printf("features: %zu participants x %zu features -> %s\n",
              matrix.vectors.size(), space.names.size(), cfg.out_dir.c_str());
  return 0;
}

int cmd_eyescore(const RunConfig& cfg) {
  check_compatibility(cfg);
  require_out_dir(cfg.out_dir);
  const Dataset ds = load_inputs(cfg, false);
  const auto records = features::compute_records(ds);

  const auto result = scoring::compute_eyescores(
      records, parse_set(cfg), parse_regime(cfg), cfg.speed_normalized,
      cfg.threads);

  std::map<std::string, double> speeds;
  for (const auto& p : ds.participants) {
    if (p.group == Group::Esl) {
      speeds[p.participant_id] =
          measures::compute_reading_speed(p, ds).words_per_second;
    }
  }

  make_out_dir(cfg.out_dir);

  json j;
  j["kind"] = "eyescore_report";
  json cfg_echo = json::object();
  for (const auto& [k, v] : config_echo(cfg, "eyescore")) cfg_echo[k] = v;
  j["config"] = cfg_echo;
  j["n_esl"] = result.scores.size();
  j["feature_count"] = result.space.names.size();

  json per = json::array();
  for (const auto& [id, score] : result.scores) {
    per.push_back({{"participant_id", id},
                   {"eyescore", score},
                   {"words_per_second", speeds.at(id)}});
  }
  j["eyescores"] = per;

  // correlations against every available external test
  std::set<TestKind> tests;
  for (const auto& s : ds.scores) tests.insert(s.test);
  json correlations = json::object();
  CsvWriter scatter(join(cfg.out_dir, "eyescore_scatter.csv"),
                    {"participant_id", "test", "score", "eyescore",
                     "words_per_second"});
  for (TestKind t : tests) {
    const auto test_scores = ds.scores_for(t);
    std::vector<double> xs, eye, spd;
    std::vector<scoring::EvalPair> pairs;
    for (const auto& [id, score] : result.scores) {
      auto it = test_scores.find(id);
      if (it == test_scores.end()) continue;
      xs.push_back(it->second);
      eye.push_back(score);
      spd.push_back(speeds.at(id));
      pairs.push_back({id, it->second, score});
      scatter.row({id, to_string(t), format_double(it->second),
                   format_double(score), format_double(speeds.at(id))});
    }
    if (xs.size() >= 2) {
      json entry;
      entry["n"] = xs.size();
      entry["r_eyescore"] = scoring::pearson_r(eye, xs);
      entry["r_reading_speed"] = scoring::pearson_r(spd, xs);
      correlations[to_string(t)] = entry;

      // pairs file usable by the report subcommand
      auto echo = config_echo(cfg, "eyescore");
      echo["y_kind"] = "eyescore";
      echo["x_kind"] = to_string(t);
      report::write_eval_report_json(
          join(cfg.out_dir, "pairs_" + to_string(t) + ".json"),
          scoring::eval_from_pairs(std::move(pairs)), 0.0, echo);
    }
  }
  j["correlations"] = correlations;

  std::ofstream out(join(cfg.out_dir, "report.json"), std::ios::binary);
  out << j.dump(2) << "\n";

  CsvWriter csv(join(cfg.out_dir, "eyescore.csv"),
                {"participant_id", "eyescore", "words_per_second"});
  for (const auto& [id, score] : result.scores) {
    csv.row({id, format_double(score), format_double(speeds.at(id))});
  }
  std::printf("eyescore report -> %s\n", join(cfg.out_dir, "report.json").c_str());
  return 0;
}

int cmd_predict(const RunConfig& cfg) {
  check_compatibility(cfg);
  require_out_dir(cfg.out_dir);
  if (!cfg.loocv && cfg.held_out_language.empty()) {
    throw UsageError("predict needs either --loocv or --held-out <language>");
  }
  const Dataset ds = load_inputs(cfg, true);
  const TestKind test = test_from_string(cfg.test);
  const auto test_scores = ds.scores_for(test);
  if (test_scores.empty()) {
    throw DataError("no scores for test '" + cfg.test + "'");
  }

  const auto records = features::compute_records(ds);
  const auto space = features::build_feature_space(
      records, parse_set(cfg), parse_regime(cfg), cfg.speed_normalized);
  const auto matrix = features::extract_features(records, space, cfg.threads);

  std::vector<std::vector<double>> esl_rows, native_rows;
  std::vector<std::string> esl_ids;
  std::vector<Participant> esl_cohort;
  std::map<std::string, double> esl_speed;
  std::vector<double> native_speed;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto* p = ds.find_participant(records[i].participant_id);
    const double wps = measures::compute_reading_speed(*p, ds).words_per_second;
    if (records[i].group == Group::Esl) {
      esl_rows.push_back(matrix.vectors[i].values);
      esl_ids.push_back(records[i].participant_id);
      esl_cohort.push_back(*p);
      esl_speed[records[i].participant_id] = wps;
    } else {
      native_rows.push_back(matrix.vectors[i].values);
      native_speed.push_back(wps);
    }
  }

  scoring::RidgePipelineConfig rcfg;
  rcfg.lambda = cfg.lambda;
  rcfg.lambda_grid = cfg.lambda_grid;
  rcfg.cv_folds = cfg.cv_folds;
  rcfg.augment_native = cfg.augment_native;
  rcfg.max_score = cfg.max_score;
  rcfg.clamp = cfg.clamp;
  rcfg.seed = cfg.seed;

  scoring::EvalReport main_report;
  double lambda_used = cfg.lambda;
  scoring::EvalReport mean_base, speed_base;
  std::string split_echo;

  if (cfg.loocv) {
    main_report = scoring::loocv_predict(esl_rows, esl_ids, test_scores,
                                         native_rows, rcfg);
    lambda_used = rcfg.lambda;
    split_echo = "loocv";
    // baselines under the same leave-one-out protocol
    std::vector<scoring::EvalPair> truth = main_report.pairs;
    std::vector<double> all_scores;
    for (const auto& p : main_report.pairs) all_scores.push_back(p.truth);
    mean_base = scoring::baseline_mean(all_scores, truth);
    std::vector<std::vector<double>> speed_rows;
    std::vector<std::vector<double>> native_speed_rows;
    for (const auto& id : esl_ids) speed_rows.push_back({esl_speed.at(id)});
    for (double s : native_speed) native_speed_rows.push_back({s});
    speed_base = scoring::loocv_predict(speed_rows, esl_ids, test_scores,
                                        native_speed_rows, rcfg);
  } else {
    const auto split = scoring::make_split(esl_cohort, cfg.held_out_language,
                                           cfg.per_language_sample, cfg.seed);
    split_echo = "held_out=" + split.held_out_language +
                 " train=" + std::to_string(split.train_ids.size()) +
                 " test=" + std::to_string(split.test_ids.size());
    const auto outcome = scoring::predict_split(esl_rows, esl_ids, test_scores,
                                                native_rows, split, rcfg);
    main_report = outcome.report;
    lambda_used = outcome.lambda_used;

    std::vector<double> train_scores;
    for (const auto& id : split.train_ids) {
      train_scores.push_back(test_scores.at(id));
    }
    std::vector<scoring::EvalPair> truth = main_report.pairs;
    mean_base = scoring::baseline_mean(train_scores, truth);

    std::vector<std::vector<double>> speed_rows;
    std::vector<std::vector<double>> native_speed_rows;
    for (const auto& id : esl_ids) speed_rows.push_back({esl_speed.at(id)});
    for (double s : native_speed) native_speed_rows.push_back({s});
    scoring::RidgePipelineConfig scfg = rcfg;
    scfg.lambda_grid.clear();  // single-feature baseline keeps the main lambda
    scfg.lambda = lambda_used;
    speed_base =
        scoring::predict_split(speed_rows, esl_ids, test_scores, native_speed_rows,
                               split, scfg)
            .report;
  }

  make_out_dir(cfg.out_dir);
  auto echo = config_echo(cfg, "predict");
  echo["split"] = split_echo;
  echo["augment_native"] = cfg.augment_native ? "true" : "false";
  echo["clamp"] = cfg.clamp ? "true" : "false";
  report::write_eval_report_json(join(cfg.out_dir, "report.json"), main_report,
                                 lambda_used, echo);
  report::write_eval_report_csv(join(cfg.out_dir, "report.csv"), main_report);

  json baselines;
  baselines["kind"] = "baselines";
  baselines["mean"] = {{"mae", mean_base.mae}, {"n", mean_base.n}};
  json speed_entry = {{"mae", speed_base.mae}, {"n", speed_base.n}};
  if (speed_base.pearson_r) speed_entry["pearson_r"] = *speed_base.pearson_r;
  baselines["reading_speed"] = speed_entry;
  std::ofstream bout(join(cfg.out_dir, "baselines.json"), std::ios::binary);
  bout << baselines.dump(2) << "\n";

  std::printf("predict: n=%zu r=%s mae=%s lambda=%s -> %s\n", main_report.n,
              main_report.pearson_r ? format_double(*main_report.pearson_r).c_str()
                                    : "n/a",
              format_double(main_report.mae).c_str(),
              format_double(lambda_used).c_str(), cfg.out_dir.c_str());
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  require_out_dir(cfg.out_dir);
  std::vector<SentenceText> sentences;
  if (cfg.synth_sentences > 0) {
    sentences = sim::synthesize_sentences(cfg.synth_sentences, cfg.words_min,
                                          cfg.words_max, cfg.seed);
  } else {
    require_file(cfg.tokens, "--sentences");
    sentences = corpus::load_corpus(cfg.tokens);
  }

  sim::GeneratorConfig gcfg;
  gcfg.n_esl = cfg.readers;
  gcfg.n_native = cfg.natives;
  gcfg.n_languages = cfg.languages;
  gcfg.max_score = cfg.max_score;
  gcfg.score_noise_sd = cfg.score_noise_sd;
  gcfg.speed_log_sd = cfg.speed_log_sd;
  gcfg.any_read_fraction = cfg.any_fraction;
  gcfg.seed = cfg.seed;
  if (cfg.sigma_ms >= 0) {
    gcfg.learner.sigma_ms = cfg.sigma_ms;
    gcfg.native.sigma_ms = cfg.sigma_ms;
  }
  if (cfg.regression_prob >= 0) {
    gcfg.learner.regression_prob = cfg.regression_prob;
    gcfg.native.regression_prob = cfg.regression_prob;
  }

  const auto cohort = sim::generate_cohort(sentences, gcfg);

  make_out_dir(cfg.out_dir);
  corpus::write_corpus(join(cfg.out_dir, "tokens.csv"), sentences);
  corpus::write_fixations(join(cfg.out_dir, "fixations.csv"), cohort.participants);
  corpus::write_scores(join(cfg.out_dir, "scores.csv"), cohort.scores);
  CsvWriter truth(join(cfg.out_dir, "truth.csv"),
                  {"participant_id", "proficiency", "speed_factor"});
  for (const auto& t : cohort.truth) {
    truth.row({t.participant_id, format_double(t.proficiency),
               format_double(t.speed_factor)});
  }
  std::printf("synthetic cohort: %d ESL + %d native readers -> %s\n",
              cfg.readers, cfg.natives, cfg.out_dir.c_str());
  return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
  require_file(cfg.report_path, "--report");
  const auto rep = report::read_eval_report_json(cfg.report_path);
  std::printf("n=%zu mae=%s r=%s\n", rep.n, format_double(rep.mae).c_str(),
              rep.pearson_r ? format_double(*rep.pearson_r).c_str() : "n/a");
  return 0;
}

int cmd_report(const RunConfig& cfg) {
  require_file(cfg.report_path, "--report");
  require_out_dir(cfg.out_dir);
  const auto rep = report::read_eval_report_json(cfg.report_path);
  if (rep.pairs.size() < 2) {
    throw DataError("need >= 2 points to render a report, got " +
                    std::to_string(rep.pairs.size()));
  }

  json j;
  {
    std::ifstream in(cfg.report_path);
    in >> j;
  }
  const bool is_eyescore =
      j.contains("config") && j["config"].value("y_kind", "") == "eyescore";
  std::string xl = cfg.x_label.empty() ? "external test score" : cfg.x_label;
  std::string yl = cfg.y_label;
  if (yl.empty()) yl = is_eyescore ? "EyeScore" : "predicted score";

  std::vector<report::Point> points;
  for (const auto& p : rep.pairs) {
    points.push_back({p.participant_id, p.truth, p.predicted});
  }
  const double r = rep.pearson_r ? *rep.pearson_r : 0.0;
  if (!rep.pearson_r) {
    throw DataError("report has undefined correlation; nothing to plot");
  }
  std::optional<double> mae_annot;
  if (!is_eyescore) mae_annot = rep.mae;

  make_out_dir(cfg.out_dir);
  report::write_text_file(join(cfg.out_dir, "scatter.svg"),
                          report::svg_scatter(points, xl, yl, r, mae_annot));

  std::string summary;
  summary += "points: " + std::to_string(rep.n) + "\n";
  summary += "pearson_r: " + format_double(r) + "\n";
  if (!is_eyescore) summary += "mae: " + format_double(rep.mae) + "\n";
  report::write_text_file(join(cfg.out_dir, "summary.txt"), summary);
  std::printf("report -> %s\n", join(cfg.out_dir, "scatter.svg").c_str());
  return 0;
}

// JSON config file, overridden by explicit flags.
void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  auto str = [&](const char* key, std::string& out) {
    if (j.contains(key)) out = j.at(key).get<std::string>();
  };
  auto num = [&](const char* key, auto& out) {
    if (j.contains(key)) out = j.at(key).get<std::decay_t<decltype(out)>>();
  };
  str("tokens", cfg.tokens);
  str("fixations", cfg.fixations);
  str("scores", cfg.scores);
  str("lm_corpus", cfg.lm_corpus);
  str("lm_model", cfg.lm_model);
  str("out_dir", cfg.out_dir);
  str("feature_set", cfg.feature_set);
  str("regime", cfg.regime);
  str("held_out_language", cfg.held_out_language);
  str("test", cfg.test);
  if (j.contains("speed_normalized")) {
    cfg.speed_norm_file = j.at("speed_normalized").get<bool>() ? 1 : 0;
  }
  num("lambda", cfg.lambda);
  if (j.contains("lambda_grid")) {
    cfg.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  }
  num("cv_folds", cfg.cv_folds);
  num("loocv", cfg.loocv);
  num("per_language_sample", cfg.per_language_sample);
  num("max_score", cfg.max_score);
  num("clamp", cfg.clamp);
  num("augment_native", cfg.augment_native);
  num("seed", cfg.seed);
  num("threads", cfg.threads);
}

}  // namespace

int run(int argc, const char* const* argv) {
  RunConfig cfg;

  // pre-scan for --config so flags can override file values
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        load_config_file(argv[i + 1], cfg);
      } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
      }
      break;
    }
  }

  CLI::App app{"eyetracking-based language proficiency scoring"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--threads", cfg.threads, "worker threads");
    sub->add_option("--seed", cfg.seed, "random seed");
  };
  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--tokens", cfg.tokens, "tokens.csv");
    sub->add_option("--fixations", cfg.fixations, "fixations.csv");
    sub->add_option("--scores", cfg.scores, "scores.csv");
  };
  auto add_feature_flags = [&](CLI::App* sub) {
    sub->add_option("--set", cfg.feature_set,
                    "feature set: wp|sclusters|transitions|wfc");
    sub->add_option("--regime", cfg.regime, "regime: fixed|any");
    sub->add_flag_callback(
        "--speed-norm", [&cfg]() { cfg.speed_norm_cli = 1; },
        "use reading-speed-normalized features");
    sub->add_flag_callback(
        "--no-speed-norm", [&cfg]() { cfg.speed_norm_cli = 0; },
        "use raw (non-normalized) features");
  };

  auto* ingest = app.add_subcommand("ingest-validate", "load and validate CSVs");
  add_common(ingest);
  add_inputs(ingest);
  ingest->add_option("--measures-out", cfg.measures_out, "export measures.csv");

  auto* lmtrain = app.add_subcommand("lm-train", "train the trigram LM");
  add_common(lmtrain);
  lmtrain->add_option("--corpus", cfg.lm_corpus, "plain text, one sentence per line");
  lmtrain->add_option("--out", cfg.lm_model, "model output path");
  lmtrain->add_option("--min-count", cfg.min_count, "vocabulary count threshold");

  auto* annotate = app.add_subcommand("annotate-surprisal",
                                      "fill surprisal/log_frequency columns");
  add_common(annotate);
  annotate->add_option("--model", cfg.lm_model, "trained LM");
  annotate->add_option("--tokens", cfg.tokens, "tokens.csv to annotate");
  annotate->add_option("--out", cfg.out_dir, "output path (default: in place)");

  auto* feat = app.add_subcommand("features", "extract feature vectors");
  add_common(feat);
  add_inputs(feat);
  add_feature_flags(feat);
  feat->add_option("--out-dir", cfg.out_dir, "output directory");
  feat->add_option("--measures-out", cfg.measures_out, "export measures.csv");

  auto* eye = app.add_subcommand("eyescore", "native-likeness proficiency score");
  add_common(eye);
  add_inputs(eye);
  add_feature_flags(eye);
  eye->add_option("--out-dir", cfg.out_dir, "output directory");

  auto* predict = app.add_subcommand("predict", "predict external test scores");
  add_common(predict);
  add_inputs(predict);
  add_feature_flags(predict);
  predict->add_option("--out-dir", cfg.out_dir, "output directory");
  predict->add_option("--test", cfg.test, "score test name (MET|TOEFL|SYNTHETIC)");
  predict->add_option("--lambda", cfg.lambda, "ridge penalty");
  predict
      ->add_option("--lambda-grid", cfg.lambda_grid,
                   "comma-separated candidate penalties, tuned by k-fold CV")
      ->delimiter(',');
  predict->add_option("--folds", cfg.cv_folds, "CV folds for tuning");
  predict->add_flag("--loocv", cfg.loocv, "leave-one-out over the ESL cohort");
  predict->add_option("--held-out", cfg.held_out_language,
                      "held-out native language for the split");
  predict->add_option("--per-language-sample", cfg.per_language_sample,
                      "test-set sample per remaining language");
  predict->add_flag("--clamp", cfg.clamp, "clamp predictions to [0, max]");
  predict->add_flag("--augment-native,!--no-augment-native", cfg.augment_native,
                    "append natives at max score to the training set");
  predict->add_option("--max-score", cfg.max_score, "test maximum score");

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic cohort");
  add_common(simulate);
  simulate->add_option("--sentences", cfg.tokens, "annotated tokens.csv");
  simulate->add_option("--synth-sentences", cfg.synth_sentences,
                       "synthesize this many sentences instead");
  simulate->add_option("--words-min", cfg.words_min, "min words per sentence");
  simulate->add_option("--words-max", cfg.words_max, "max words per sentence");
  simulate->add_option("--readers", cfg.readers, "ESL reader count");
  simulate->add_option("--natives", cfg.natives, "native reader count");
  simulate->add_option("--languages", cfg.languages, "synthetic language count");
  simulate->add_option("--max-score", cfg.max_score, "synthetic test max score");
  simulate->add_option("--score-noise-sd", cfg.score_noise_sd,
                       "noise added to p*max scores");
  simulate->add_option("--speed-log-sd", cfg.speed_log_sd,
                       "reader pace multiplier lognormal sd");
  simulate->add_option("--sigma-ms", cfg.sigma_ms, "duration noise override");
  simulate->add_option("--regression-prob", cfg.regression_prob,
                       "regressive-saccade probability override");
  simulate->add_option("--any-fraction", cfg.any_fraction,
                       "share of the Any pool each reader reads");
  simulate->add_option("--out-dir", cfg.out_dir, "output directory");

  auto* evaluate = app.add_subcommand("evaluate", "recompute metrics from a report");
  add_common(evaluate);
  evaluate->add_option("--report", cfg.report_path, "report.json");

  auto* rep = app.add_subcommand("report", "render summary and SVG scatter");
  add_common(rep);
  rep->add_option("--report", cfg.report_path, "report.json");
  rep->add_option("--out-dir", cfg.out_dir, "output directory");
  rep->add_option("--x-label", cfg.x_label, "x axis label");
  rep->add_option("--y-label", cfg.y_label, "y axis label");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    apply_env_seed(cfg);
    auto resolve_speed_norm = [&cfg](bool command_default) {
      if (cfg.speed_norm_cli != -1) {
        cfg.speed_normalized = cfg.speed_norm_cli == 1;
      } else if (cfg.speed_norm_file != -1) {
        cfg.speed_normalized = cfg.speed_norm_file == 1;
      } else {
        cfg.speed_normalized = command_default;
      }
    };
    if (eye->parsed()) {
      resolve_speed_norm(true);
    } else {
      resolve_speed_norm(false);
    }
    if (ingest->parsed()) return cmd_ingest_validate(cfg);
    if (lmtrain->parsed()) return cmd_lm_train(cfg);
    if (annotate->parsed()) return cmd_annotate_surprisal(cfg);
    if (feat->parsed()) return cmd_features(cfg);
    if (eye->parsed()) return cmd_eyescore(cfg);
    if (predict->parsed()) return cmd_predict(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (evaluate->parsed()) return cmd_evaluate(cfg);
    if (rep->parsed()) return cmd_report(cfg);
    throw UsageError("no subcommand");
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace gazescore::cli
