#include "gazescore/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "gazescore/errors.hpp"
#include "gazescore/linear.hpp"
#include "gazescore/rng.hpp"

namespace gazescore::scoring {

using nlohmann::json;

ZScaler fit_zscaler(const std::vector<std::vector<double>>& rows,
                    std::string population) {
  if (rows.size() < 2) {
    throw DataError("Z scaler needs at least 2 vectors, got " +
                    std::to_string(rows.size()));
  }
  const std::size_t d = rows[0].size();
  ZScaler s;
  s.population = std::move(population);
  s.mean.assign(d, 0);
  s.stddev.assign(d, 0);
  s.zero_variance.assign(d, 0);
  for (const auto& r : rows) {
    if (r.size() != d) throw DataError("ragged feature rows in Z scaler fit");
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
  }
  for (std::size_t j = 0; j < d; ++j) s.mean[j] /= static_cast<double>(rows.size());
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dv = r[j] - s.mean[j];
      s.stddev[j] += dv * dv;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    s.stddev[j] = std::sqrt(s.stddev[j] / static_cast<double>(rows.size()));
    if (s.stddev[j] == 0) {
      s.stddev[j] = 1.0;  // zero-variance features map to 0
      s.zero_variance[j] = 1;
    }
  }
  return s;
}

std::vector<double> apply_zscaler(const ZScaler& scaler,
                                  const std::vector<double>& row) {
  if (row.size() != scaler.mean.size()) {
    throw DataError("vector length does not match Z scaler");
  }
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    out[j] = (row[j] - scaler.mean[j]) / scaler.stddev[j];
  }
  return out;
}

NativePrototype build_prototype(const std::vector<std::vector<double>>& native_rows,
                                const ZScaler& scaler) {
  if (native_rows.empty()) {
    throw DataError("cannot build a native prototype from zero native readers");
  }
  NativePrototype p;
  p.values.assign(scaler.mean.size(), 0);
  for (const auto& r : native_rows) {
    const auto z = apply_zscaler(scaler, r);
    for (std::size_t j = 0; j < z.size(); ++j) p.values[j] += z[j];
  }
  for (auto& v : p.values) v /= static_cast<double>(native_rows.size());
  return p;
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double eyescore(const std::vector<double>& participant_row,
                const NativePrototype& prototype, const ZScaler& scaler) {
  const auto z = apply_zscaler(scaler, participant_row);
  if (z.size() != prototype.values.size()) {
    throw DataError("participant vector and prototype live in different spaces");
  }
  const double nz = norm2(z), np = norm2(prototype.values);
  if (nz == 0 || np == 0) {
    throw NumericError("undefined cosine: zero vector");
  }
  return dot(z, prototype.values) / (nz * np);
}

double RidgeModel::predict(const std::vector<double>& row) const {
  if (row.size() != weights.size()) {
    throw DataError("vector length does not match ridge model");
  }
  double v = intercept;
  for (std::size_t j = 0; j < row.size(); ++j) v += weights[j] * row[j];
  return v;
}

RidgeModel ridge_fit(const std::vector<std::vector<double>>& x,
                     const std::vector<double>& y, double lambda,
                     bool augment_native,
                     const std::vector<std::vector<double>>& native_x,
                     double max_score) {
  std::vector<std::vector<double>> rows = x;
  std::vector<double> targets = y;
  if (augment_native) {
    for (const auto& r : native_x) {
      rows.push_back(r);
      targets.push_back(max_score);
    }
  }
  const auto fit = linear::fit_ridge(rows, targets, lambda);
  RidgeModel m;
  m.weights = fit.coef;
  m.intercept = fit.intercept;
  m.lambda = lambda;
  return m;
}

double ridge_predict(const RidgeModel& model, const std::vector<double>& row) {
  return model.predict(row);
}

double clamp_score(double value, double max_score) {
  return std::min(std::max(value, 0.0), max_score);
}

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("pearson_r: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw NumericError("undefined correlation: need at least 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) {
    throw NumericError("undefined correlation: zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

double mae(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("mae: length mismatch");
  if (x.empty()) throw NumericError("mae of empty sample");
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::fabs(x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

EvalReport eval_from_pairs(std::vector<EvalPair> pairs) {
  EvalReport r;
  r.pairs = std::move(pairs);
  r.n = r.pairs.size();
  std::vector<double> t, p;
  t.reserve(r.n);
  p.reserve(r.n);
  for (const auto& pr : r.pairs) {
    t.push_back(pr.truth);
    p.push_back(pr.predicted);
  }
  r.mae = mae(t, p);
  try {
    r.pearson_r = pearson_r(t, p);
  } catch (const NumericError&) {
    r.pearson_r.reset();
  }
  return r;
}

DataSplit make_split(const std::vector<Participant>& cohort,
                     const std::string& held_out_language,
                     int per_language_sample, std::uint64_t seed) {
  std::map<std::string, std::vector<std::string>> by_language;
  for (const auto& p : cohort) {
    if (p.group == Group::Esl) {
      by_language[p.native_language].push_back(p.participant_id);
    }
  }
  if (!held_out_language.empty() && !by_language.count(held_out_language)) {
    throw DataError("held-out language '" + held_out_language +
                    "' has no speakers in the cohort");
  }

  DataSplit split;
  split.held_out_language = held_out_language;
  Rng rng(seed);
  std::set<std::string> test;

  for (auto& [language, ids] : by_language) {
    std::sort(ids.begin(), ids.end());
    if (language == held_out_language) {
      test.insert(ids.begin(), ids.end());
      continue;
    }
    if (per_language_sample > static_cast<int>(ids.size())) {
      throw DataError("cannot sample " + std::to_string(per_language_sample) +
                      " speakers from language '" + language + "' (" +
                      std::to_string(ids.size()) + " available)");
    }
    std::vector<std::string> pool = ids;
    rng.shuffle(pool);
    for (int i = 0; i < per_language_sample; ++i) test.insert(pool[static_cast<std::size_t>(i)]);
  }
  if (test.empty()) {
    throw DataError("split produced an empty test set");
  }

  for (const auto& [language, ids] : by_language) {
    (void)language;
    for (const auto& id : ids) {
      (test.count(id) ? split.test_ids : split.train_ids).push_back(id);
    }
  }
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());
  return split;
}

std::vector<double> default_lambda_grid() {
  return {0.01, 0.1, 1, 10, 100, 1000};
}

namespace {

ZScaler identity_scaler(std::size_t d) {
  ZScaler s;
  s.population = "identity";
  s.mean.assign(d, 0);
  s.stddev.assign(d, 1);
  s.zero_variance.assign(d, 0);
  return s;
}

// Fit scaler on ESL train rows, scale train + natives, fit ridge, predict
// scaled test rows. A single-row training side (leave-one-out on a cohort of
// two) cannot support a scaler and falls back to identity scaling.
std::vector<double> pipeline_predict(
    const std::vector<std::vector<double>>& train_rows,
    const std::vector<double>& train_scores,
    const std::vector<std::vector<double>>& native_rows,
    const std::vector<std::vector<double>>& test_rows, double lambda,
    bool augment_native, double max_score) {
  const ZScaler scaler = train_rows.size() >= 2
                             ? fit_zscaler(train_rows, "esl-train")
                             : identity_scaler(train_rows[0].size());
  std::vector<std::vector<double>> ztrain, znative, ztest;
  ztrain.reserve(train_rows.size());
  for (const auto& r : train_rows) ztrain.push_back(apply_zscaler(scaler, r));
  znative.reserve(native_rows.size());
  for (const auto& r : native_rows) znative.push_back(apply_zscaler(scaler, r));
  const RidgeModel model = ridge_fit(ztrain, train_scores, lambda,
                                     augment_native, znative, max_score);
  std::vector<double> out;
  out.reserve(test_rows.size());
  for (const auto& r : test_rows) {
    out.push_back(model.predict(apply_zscaler(scaler, r)));
  }
  return out;
}

}  // namespace

double tune_lambda(const std::vector<std::vector<double>>& train_rows,
                   const std::vector<double>& train_scores,
                   const std::vector<double>& grid, int folds,
                   std::uint64_t seed, bool augment_native,
                   const std::vector<std::vector<double>>& native_rows,
                   double max_score) {
  if (grid.empty()) throw UsageError("lambda grid is empty");
  if (grid.size() == 1) return grid[0];
  if (folds < 2) throw UsageError("cross validation needs at least 2 folds");
  const std::size_t n = train_rows.size();
  if (n < static_cast<std::size_t>(folds)) {
    throw DataError("fewer training rows than folds");
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<double> sorted_grid = grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());

  double best_lambda = sorted_grid[0];
  double best_mae = std::numeric_limits<double>::infinity();
  for (double lambda : sorted_grid) {
    double total = 0;
    for (int f = 0; f < folds; ++f) {
      std::vector<std::vector<double>> tr, te;
      std::vector<double> try_, tey;
      for (std::size_t i = 0; i < n; ++i) {
        const bool in_fold = static_cast<int>(i % static_cast<std::size_t>(folds)) == f;
        const std::size_t idx = order[i];
        if (in_fold) {
          te.push_back(train_rows[idx]);
          tey.push_back(train_scores[idx]);
        } else {
          tr.push_back(train_rows[idx]);
          try_.push_back(train_scores[idx]);
        }
      }
      const auto pred = pipeline_predict(tr, try_, native_rows, te, lambda,
                                         augment_native, max_score);
      total += mae(pred, tey);
    }
    const double mean_mae = total / folds;
    if (mean_mae < best_mae - 1e-12) {  // ties keep the smaller lambda
      best_mae = mean_mae;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

PredictOutcome predict_split(const std::vector<std::vector<double>>& esl_rows,
                             const std::vector<std::string>& esl_ids,
                             const std::map<std::string, double>& scores,
                             const std::vector<std::vector<double>>& native_rows,
                             const DataSplit& split,
                             const RidgePipelineConfig& config) {
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < esl_ids.size(); ++i) row_of[esl_ids[i]] = i;

  auto gather = [&](const std::vector<std::string>& ids, bool need_scores,
                    std::vector<std::vector<double>>& rows,
                    std::vector<double>& y, std::vector<std::string>& kept) {
    for (const auto& id : ids) {
      auto rit = row_of.find(id);
      if (rit == row_of.end()) {
        throw DataError("split references unknown participant '" + id + "'");
      }
      auto sit = scores.find(id);
      if (sit == scores.end()) {
        if (need_scores) {
          throw DataError("no score for training participant '" + id + "'");
        }
        continue;  // unscored test participants are skipped in the report
      }
      rows.push_back(esl_rows[rit->second]);
      y.push_back(sit->second);
      kept.push_back(id);
    }
  };

  std::vector<std::vector<double>> train_rows, test_rows;
  std::vector<double> train_y, test_y;
  std::vector<std::string> train_kept, test_kept;
  gather(split.train_ids, true, train_rows, train_y, train_kept);
  gather(split.test_ids, false, test_rows, test_y, test_kept);
  if (train_rows.empty()) throw DataError("empty training set");
  if (test_rows.empty()) throw DataError("no scored test participants");

  PredictOutcome out;
  out.lambda_used = config.lambda;
  if (config.lambda_grid.size() > 1) {
    out.lambda_used =
        tune_lambda(train_rows, train_y, config.lambda_grid, config.cv_folds,
                    config.seed, config.augment_native, native_rows,
                    config.max_score);
  } else if (config.lambda_grid.size() == 1) {
    out.lambda_used = config.lambda_grid[0];
  }

  const auto pred =
      pipeline_predict(train_rows, train_y, native_rows, test_rows,
                       out.lambda_used, config.augment_native, config.max_score);
  std::vector<EvalPair> pairs;
  pairs.reserve(test_kept.size());
  for (std::size_t i = 0; i < test_kept.size(); ++i) {
    const double p = config.clamp ? clamp_score(pred[i], config.max_score) : pred[i];
    pairs.push_back({test_kept[i], test_y[i], p});
  }
  out.report = eval_from_pairs(std::move(pairs));
  return out;
}

EvalReport loocv_predict(const std::vector<std::vector<double>>& esl_rows,
                         const std::vector<std::string>& esl_ids,
                         const std::map<std::string, double>& scores,
                         const std::vector<std::vector<double>>& native_rows,
                         const RidgePipelineConfig& config) {
  std::vector<std::size_t> scored;
  for (std::size_t i = 0; i < esl_ids.size(); ++i) {
    if (scores.count(esl_ids[i])) scored.push_back(i);
  }
  if (scored.size() < 2) {
    throw DataError("leave-one-out needs at least 2 scored participants");
  }

  std::vector<EvalPair> pairs;
  pairs.reserve(scored.size());
  for (std::size_t k = 0; k < scored.size(); ++k) {
    std::vector<std::vector<double>> train_rows;
    std::vector<double> train_y;
    for (std::size_t j = 0; j < scored.size(); ++j) {
      if (j == k) continue;
      train_rows.push_back(esl_rows[scored[j]]);
      train_y.push_back(scores.at(esl_ids[scored[j]]));
    }
    const auto pred = pipeline_predict(train_rows, train_y, native_rows,
                                       {esl_rows[scored[k]]}, config.lambda,
                                       config.augment_native, config.max_score);
    double p = pred[0];
    if (config.clamp) p = clamp_score(p, config.max_score);
    pairs.push_back({esl_ids[scored[k]], scores.at(esl_ids[scored[k]]), p});
  }
  return eval_from_pairs(std::move(pairs));
}

EvalReport baseline_mean(const std::vector<double>& train_scores,
                         const std::vector<EvalPair>& test_truth) {
  if (train_scores.empty()) throw DataError("no training scores");
  double m = 0;
  for (double s : train_scores) m += s;
  m /= static_cast<double>(train_scores.size());
  std::vector<EvalPair> pairs = test_truth;
  for (auto& p : pairs) p.predicted = m;
  return eval_from_pairs(std::move(pairs));
}

EyeScoreResult compute_eyescores(const std::vector<features::ParticipantRecord>& records,
                                 features::FeatureSet set, Regime regime,
                                 bool speed_normalized, int threads) {
  EyeScoreResult out;
  out.space = features::build_feature_space(records, set, regime, speed_normalized);
  const auto matrix = features::extract_features(records, out.space, threads);

  std::vector<std::vector<double>> esl_rows, native_rows;
  std::vector<std::string> esl_ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].group == Group::Esl) {
      esl_rows.push_back(matrix.vectors[i].values);
      esl_ids.push_back(records[i].participant_id);
    } else {
      native_rows.push_back(matrix.vectors[i].values);
    }
  }
  const ZScaler scaler = fit_zscaler(esl_rows, "esl-all");
  const NativePrototype proto = build_prototype(native_rows, scaler);
  for (std::size_t i = 0; i < esl_ids.size(); ++i) {
    out.scores[esl_ids[i]] = eyescore(esl_rows[i], proto, scaler);
  }
  return out;
}

SplitHalfResult split_half_consistency(const Dataset& dataset,
                                       features::FeatureSet set, Regime regime,
                                       bool speed_normalized,
                                       std::uint64_t seed) {
  const auto records = features::compute_records(dataset);
  Rng rng(seed);

  // token-level sets need one shared sentence partition; type-level sets
  // partition each participant's own trials
  std::set<std::string> shared_half_a;
  if (features::token_level(set)) {
    std::set<std::string> suite;
    for (const auto& rec : records) {
      for (const auto& t : rec.trials) {
        if (t.regime == regime) suite.insert(t.sentence->sentence_id);
      }
    }
    std::vector<std::string> ids(suite.begin(), suite.end());
    if (ids.size() < 2) throw DataError("fewer than 2 sentences to split");
    rng.shuffle(ids);
    for (std::size_t i = 0; i < ids.size() / 2; ++i) shared_half_a.insert(ids[i]);
  }

  std::vector<features::ParticipantRecord> half_a, half_b;
  int excluded = 0;
  for (const auto& rec : records) {
    std::vector<const features::TrialMeasures*> mine;
    for (const auto& t : rec.trials) {
      if (t.regime == regime) mine.push_back(&t);
    }
    if (mine.size() < 2) {
      std::fprintf(stderr,
                   "warning: participant %s has %zu trial(s) in regime %s; "
                   "excluded from split-half analysis\n",
                   rec.participant_id.c_str(), mine.size(),
                   to_string(regime).c_str());
      ++excluded;
      continue;
    }
    features::ParticipantRecord a{rec.participant_id, rec.group,
                                  rec.native_language, {}};
    features::ParticipantRecord b = a;
    if (features::token_level(set)) {
      for (const auto* t : mine) {
        (shared_half_a.count(t->sentence->sentence_id) ? a : b)
            .trials.push_back(*t);
      }
    } else {
      std::vector<std::size_t> order(mine.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng.shuffle(order);
      for (std::size_t i = 0; i < order.size(); ++i) {
        (i < order.size() / 2 ? a : b).trials.push_back(*mine[order[i]]);
      }
    }
    if (a.trials.empty() || b.trials.empty()) {
      ++excluded;
      continue;
    }
    half_a.push_back(std::move(a));
    half_b.push_back(std::move(b));
  }

  const auto run_a = compute_eyescores(half_a, set, regime, speed_normalized);
  const auto run_b = compute_eyescores(half_b, set, regime, speed_normalized);

  std::vector<double> xs, ys;
  for (const auto& [id, score] : run_a.scores) {
    auto it = run_b.scores.find(id);
    if (it != run_b.scores.end()) {
      xs.push_back(score);
      ys.push_back(it->second);
    }
  }
  SplitHalfResult res;
  res.n = xs.size();
  res.excluded = excluded;
  res.r = pearson_r(xs, ys);
  res.spearman_brown = 2 * res.r / (1 + res.r);
  return res;
}

// ---- JSON model artifacts -------------------------------------------------

namespace {

json named_array(const std::vector<std::string>& names,
                 const std::vector<double>& values) {
  json arr = json::array();
  for (std::size_t i = 0; i < names.size(); ++i) {
    arr.push_back({{"name", names[i]}, {"value", values[i]}});
  }
  return arr;
}

std::vector<double> read_named_array(const json& arr,
                                     const std::vector<std::string>& names,
                                     const std::string& what) {
  std::map<std::string, double> by_name;
  for (const auto& e : arr) {
    by_name[e.at("name").get<std::string>()] = e.at("value").get<double>();
  }
  std::vector<double> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    auto it = by_name.find(n);
    if (it == by_name.end()) {
      throw DataError(what + ": missing feature '" + n + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  json j;
  in >> j;
  return j;
}

void dump_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

}  // namespace

void save_scaler_json(const std::string& path, const ZScaler& scaler,
                      const std::vector<std::string>& names) {
  json j;
  j["kind"] = "zscaler";
  j["population"] = scaler.population;
  j["mean"] = named_array(names, scaler.mean);
  std::vector<double> sd(scaler.stddev.begin(), scaler.stddev.end());
  j["stddev"] = named_array(names, sd);
  json zv = json::array();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (scaler.zero_variance[i]) zv.push_back(names[i]);
  }
  j["zero_variance"] = zv;
  dump_json(path, j);
}

ZScaler load_scaler_json(const std::string& path,
                         const std::vector<std::string>& names) {
  const json j = load_json(path);
  if (j.value("kind", "") != "zscaler") throw DataError(path + ": not a zscaler");
  ZScaler s;
  s.population = j.value("population", "");
  s.mean = read_named_array(j.at("mean"), names, path);
  s.stddev = read_named_array(j.at("stddev"), names, path);
  s.zero_variance.assign(names.size(), 0);
  std::set<std::string> zv;
  for (const auto& e : j.at("zero_variance")) zv.insert(e.get<std::string>());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (zv.count(names[i])) s.zero_variance[i] = 1;
  }
  return s;
}

void save_prototype_json(const std::string& path, const NativePrototype& proto,
                         const std::vector<std::string>& names) {
  json j;
  j["kind"] = "native_prototype";
  j["values"] = named_array(names, proto.values);
  dump_json(path, j);
}

NativePrototype load_prototype_json(const std::string& path,
                                    const std::vector<std::string>& names) {
  const json j = load_json(path);
  if (j.value("kind", "") != "native_prototype") {
    throw DataError(path + ": not a native prototype");
  }
  NativePrototype p;
  p.values = read_named_array(j.at("values"), names, path);
  return p;
}

void save_ridge_json(const std::string& path, const RidgeModel& model,
                     const std::vector<std::string>& names) {
  json j;
  j["kind"] = "ridge";
  j["lambda"] = model.lambda;
  j["intercept"] = model.intercept;
  j["weights"] = named_array(names, model.weights);
  dump_json(path, j);
}

RidgeModel load_ridge_json(const std::string& path,
                           const std::vector<std::string>& names) {
  const json j = load_json(path);
  if (j.value("kind", "") != "ridge") throw DataError(path + ": not a ridge model");
  RidgeModel m;
  m.lambda = j.at("lambda").get<double>();
  m.intercept = j.at("intercept").get<double>();
  m.weights = read_named_array(j.at("weights"), names, path);
  return m;
}

}  // namespace gazescore::scoring
