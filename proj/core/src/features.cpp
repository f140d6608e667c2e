#include "gazescore/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <thread>

#include "gazescore/csv.hpp"
#include "gazescore/errors.hpp"

namespace gazescore::features {

namespace {

enum class Met { FF, FP, TF, RP };

const char* met_name(Met m) {
  switch (m) {
    case Met::FF: return "FF";
    case Met::FP: return "FP";
    case Met::TF: return "TF";
    case Met::RP: return "RP";
  }
  return "?";
}

double met_value(const measures::WordMeasures& w, Met m) {
  switch (m) {
    case Met::FF: return w.ff_ms;
    case Met::FP: return w.fp_ms;
    case Met::TF: return w.tf_ms;
    case Met::RP: return w.rp_ms;
  }
  return 0;
}

double& met_ref(measures::WordMeasures& w, Met m) {
  switch (m) {
    case Met::FF: return w.ff_ms;
    case Met::FP: return w.fp_ms;
    case Met::TF: return w.tf_ms;
    case Met::RP: return w.rp_ms;
  }
  return w.ff_ms;
}

constexpr Met kAllMetrics[] = {Met::FF, Met::FP, Met::TF, Met::RP};
constexpr Met kClusterMetrics[] = {Met::FF, Met::FP, Met::TF};
const char* kTagsets[] = {"upos", "xpos", "deprel"};

const std::string& tag_of(const TokenAnnotation& t, int tagset) {
  return tagset == 0 ? t.upos : tagset == 1 ? t.xpos : t.deprel;
}

std::string wfc_name(const char* metric, const std::string& sid, int pos) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%02d", pos);
  return std::string("wfc/") + metric + "/" + sid + "/" + buf;
}

NormContext context_for(Regime regime) {
  return regime == Regime::Fixed ? NormContext::Sentence : NormContext::AllText;
}

std::vector<const TrialMeasures*> in_regime(const ParticipantRecord& rec,
                                            Regime regime) {
  std::vector<const TrialMeasures*> out;
  for (const auto& t : rec.trials) {
    if (t.regime == regime) out.push_back(&t);
  }
  return out;
}

void require_annotations(const SentenceText& s) {
  for (const auto& t : s.tokens) {
    if (!t.log_frequency || !t.surprisal) {
      throw DataError("sentence '" + s.sentence_id + "' token " +
                      std::to_string(t.position) +
                      " lacks log_frequency/surprisal annotations; run "
                      "annotate-surprisal first");
    }
  }
}

std::vector<double> predictors(const TokenAnnotation& t) {
  return {static_cast<double>(t.length_chars), *t.log_frequency, *t.surprisal};
}

// Saccade counts for one trial: consecutive fixation pairs (from, to),
// within-word re-fixations excluded unless requested.
std::map<std::pair<int, int>, long> transition_counts(const TrialMeasures& t,
                                                      bool include_refixations) {
  std::map<std::pair<int, int>, long> cells;
  for (std::size_t i = 1; i < t.fixations.size(); ++i) {
    const int from = t.fixations[i - 1].word_position;
    const int to = t.fixations[i].word_position;
    if (from == to && !include_refixations) continue;
    ++cells[{from, to}];
  }
  return cells;
}

struct ParsedName {
  std::string a, b, c, d;
};

ParsedName split_name(const std::string& name, std::size_t parts) {
  ParsedName p;
  std::string* slot[4] = {&p.a, &p.b, &p.c, &p.d};
  std::size_t start = 0, idx = 0;
  for (; idx + 1 < parts; ++idx) {
    const std::size_t sep = name.find('/', start);
    if (sep == std::string::npos) {
      throw DataError("malformed feature name '" + name + "'");
    }
    *slot[idx] = name.substr(start, sep - start);
    start = sep + 1;
  }
  *slot[idx] = name.substr(start);
  return p;
}

Met met_from(const std::string& s, const std::string& name) {
  if (s == "FF") return Met::FF;
  if (s == "FP") return Met::FP;
  if (s == "TF") return Met::TF;
  if (s == "RP") return Met::RP;
  throw DataError("unknown metric in feature name '" + name + "'");
}

}  // namespace

std::string to_string(FeatureSet s) {
  switch (s) {
    case FeatureSet::WpCoefficients: return "wp";
    case FeatureSet::SClusters: return "sclusters";
    case FeatureSet::Transitions: return "transitions";
    case FeatureSet::Wfc: return "wfc";
  }
  return "?";
}

FeatureSet feature_set_from_string(const std::string& s) {
  if (s == "wp") return FeatureSet::WpCoefficients;
  if (s == "sclusters") return FeatureSet::SClusters;
  if (s == "transitions") return FeatureSet::Transitions;
  if (s == "wfc") return FeatureSet::Wfc;
  throw UsageError("unknown feature set '" + s +
                   "' (expected wp, sclusters, transitions or wfc)");
}

bool token_level(FeatureSet s) {
  return s == FeatureSet::Transitions || s == FeatureSet::Wfc;
}

std::vector<ParticipantRecord> compute_records(const Dataset& dataset) {
  std::vector<ParticipantRecord> out;
  out.reserve(dataset.participants.size());
  for (const auto& p : dataset.participants) {
    ParticipantRecord rec;
    rec.participant_id = p.participant_id;
    rec.group = p.group;
    rec.native_language = p.native_language;
    for (const auto& trial : p.trials) {
      const SentenceText& sent = dataset.sentence(trial.sentence_id);
      TrialMeasures tm;
      tm.sentence = &sent;
      tm.regime = trial.regime;
      tm.words = measures::compute_word_measures(trial, sent);
      tm.fixations = trial.fixations;
      rec.trials.push_back(std::move(tm));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<TrialMeasures> speed_normalize(const std::vector<TrialMeasures>& trials,
                                           NormContext context,
                                           NormReport* report) {
  std::vector<TrialMeasures> out = trials;
  for (Met m : kAllMetrics) {
    if (context == NormContext::AllText) {
      double sum = 0;
      long n = 0;
      for (const auto& t : trials) {
        for (const auto& w : t.words) {
          sum += met_value(w, m);
          ++n;
        }
      }
      const double s = n ? sum / static_cast<double>(n) : 0.0;
      if (s <= 0 && report) ++report->zero_contexts;
      for (auto& t : out) {
        for (auto& w : t.words) {
          met_ref(w, m) = s > 0 ? met_value(w, m) / s : 0.0;
        }
      }
    } else {
      for (std::size_t ti = 0; ti < trials.size(); ++ti) {
        double sum = 0;
        for (const auto& w : trials[ti].words) sum += met_value(w, m);
        const double s = trials[ti].words.empty()
                             ? 0.0
                             : sum / static_cast<double>(trials[ti].words.size());
        if (s <= 0 && report) ++report->zero_contexts;
        for (auto& w : out[ti].words) {
          met_ref(w, m) = s > 0 ? met_value(w, m) / s : 0.0;
        }
      }
    }
  }
  return out;
}

FeatureSpace build_feature_space(const std::vector<ParticipantRecord>& records,
                                 FeatureSet set, Regime regime,
                                 bool speed_normalized,
                                 bool transitions_include_refixations) {
  if (records.empty()) throw DataError("no participants");
  if (token_level(set) && regime == Regime::Any) {
    throw UsageError("token-level feature set '" + to_string(set) +
                     "' requires the Fixed Text regime");
  }
  FeatureSpace space;
  space.set = set;
  space.regime = regime;
  space.speed_normalized = speed_normalized;
  space.transitions_include_refixations = transitions_include_refixations;

  switch (set) {
    case FeatureSet::WpCoefficients: {
      const char* metrics[] = {"FF", "FP", "TF", "RP", "SKIP"};
      const char* params[] = {"beta_length", "beta_logfreq", "beta_surprisal",
                              "intercept"};
      const int nparams = speed_normalized ? 3 : 4;
      for (const char* m : metrics) {
        for (int p = 0; p < nparams; ++p) {
          space.names.push_back(std::string("wp/") + m + "/" + params[p]);
        }
      }
      break;
    }
    case FeatureSet::SClusters: {
      // intersect (tagset, label) pairs with >= 1 non-skipped in-regime word
      // across every participant
      std::map<std::pair<int, std::string>, std::size_t> support;
      for (const auto& rec : records) {
        std::set<std::pair<int, std::string>> mine;
        for (const auto* t : in_regime(rec, regime)) {
          for (const auto& w : t->words) {
            if (w.skipped) continue;
            const auto& tok =
                t->sentence->tokens[static_cast<std::size_t>(w.word_position - 1)];
            for (int g = 0; g < 3; ++g) mine.insert({g, tag_of(tok, g)});
          }
        }
        for (const auto& key : mine) ++support[key];
      }
      std::vector<std::pair<int, std::string>> shared;
      for (const auto& [key, n] : support) {
        if (n == records.size()) shared.push_back(key);
      }
      if (shared.empty()) {
        throw DataError("no shared clusters across participants");
      }
      std::sort(shared.begin(), shared.end());
      for (Met m : kClusterMetrics) {
        for (const auto& [tagset, label] : shared) {
          space.names.push_back(std::string("sclust/") + met_name(m) + "/" +
                                kTagsets[tagset] + "/" + label);
        }
      }
      break;
    }
    case FeatureSet::Transitions: {
      std::set<std::tuple<std::string, int, int>> cells;
      for (const auto& rec : records) {
        for (const auto* t : in_regime(rec, regime)) {
          for (const auto& [cell, n] :
               transition_counts(*t, transitions_include_refixations)) {
            (void)n;
            cells.insert({t->sentence->sentence_id, cell.first, cell.second});
          }
        }
      }
      for (const auto& [sid, i, j] : cells) {
        space.names.push_back("trans/" + sid + "/" + std::to_string(i) + "->" +
                              std::to_string(j));
      }
      break;
    }
    case FeatureSet::Wfc: {
      std::map<std::string, int> suite;  // sentence_id -> length
      for (const auto& rec : records) {
        for (const auto* t : in_regime(rec, regime)) {
          suite[t->sentence->sentence_id] = t->sentence->length();
        }
      }
      for (const auto& [sid, len] : suite) {
        for (int pos = 1; pos <= len; ++pos) {
          space.names.push_back(wfc_name("FP", sid, pos));
          space.names.push_back(wfc_name("TF", sid, pos));
        }
      }
      break;
    }
  }
  return space;
}

linear::LinearFit fit_ols(const std::vector<std::vector<double>>& x,
                          const std::vector<double>& y) {
  if (x.size() < 5) {
    throw NumericError("underdetermined word-property regression (" +
                       std::to_string(x.size()) + " rows, need at least 5)");
  }
  return linear::fit_least_squares(x, y);
}

linear::LinearFit fit_logistic_skip(const std::vector<std::vector<double>>& x,
                                    const std::vector<char>& skipped) {
  return linear::fit_logistic(x, skipped);
}

FeatureVector extract_wp_coefficients(const ParticipantRecord& record,
                                      const FeatureSpace& space) {
  const auto trials_raw = in_regime(record, space.regime);
  std::vector<TrialMeasures> owned;
  owned.reserve(trials_raw.size());
  for (const auto* t : trials_raw) owned.push_back(*t);
  for (const auto& t : owned) require_annotations(*t.sentence);

  if (space.speed_normalized) {
    owned = speed_normalize(owned, context_for(space.regime));
  }

  std::vector<std::vector<double>> dur_x;
  std::vector<std::vector<double>> all_x;
  std::vector<char> skip_y;
  std::vector<double> dur_y[4];
  for (const auto& t : owned) {
    for (const auto& w : t.words) {
      const auto& tok =
          t.sentence->tokens[static_cast<std::size_t>(w.word_position - 1)];
      auto row = predictors(tok);
      all_x.push_back(row);
      skip_y.push_back(w.skipped ? 1 : 0);
      if (!w.skipped) {
        dur_x.push_back(row);
        for (int m = 0; m < 4; ++m) {
          dur_y[m].push_back(met_value(w, kAllMetrics[m]));
        }
      }
    }
  }

  linear::LinearFit fits[4];
  for (int m = 0; m < 4; ++m) {
    fits[m] = fit_ols(dur_x, dur_y[m]);
  }
  linear::LinearFit skip_fit;
  try {
    skip_fit = fit_logistic_skip(all_x, skip_y);
  } catch (const NumericError& e) {
    std::fprintf(stderr,
                 "warning: participant %s: %s; substituting zero skip "
                 "coefficients\n",
                 record.participant_id.c_str(), e.what());
    skip_fit.coef = {0, 0, 0};
    skip_fit.intercept = 0;
  }

  FeatureVector v;
  v.participant_id = record.participant_id;
  auto push = [&](const linear::LinearFit& f) {
    v.values.push_back(f.coef[0]);
    v.values.push_back(f.coef[1]);
    v.values.push_back(f.coef[2]);
    if (!space.speed_normalized) v.values.push_back(f.intercept);
  };
  for (int m = 0; m < 4; ++m) push(fits[m]);
  push(skip_fit);
  return v;
}

FeatureVector extract_s_clusters(const ParticipantRecord& record,
                                 const FeatureSpace& space) {
  const auto trials_raw = in_regime(record, space.regime);
  std::vector<TrialMeasures> owned;
  owned.reserve(trials_raw.size());
  for (const auto* t : trials_raw) owned.push_back(*t);
  if (space.speed_normalized) {
    owned = speed_normalize(owned, context_for(space.regime));
  }

  // (metric, tagset, label) -> running mean over non-skipped words
  std::map<std::string, std::pair<double, long>> acc;
  for (const auto& t : owned) {
    for (const auto& w : t.words) {
      if (w.skipped) continue;
      const auto& tok =
          t.sentence->tokens[static_cast<std::size_t>(w.word_position - 1)];
      for (Met m : kClusterMetrics) {
        for (int g = 0; g < 3; ++g) {
          std::string key = std::string("sclust/") + met_name(m) + "/" +
                            kTagsets[g] + "/" + tag_of(tok, g);
          auto& slot = acc[key];
          slot.first += met_value(w, m);
          ++slot.second;
        }
      }
    }
  }

  FeatureVector v;
  v.participant_id = record.participant_id;
  v.values.reserve(space.names.size());
  for (const auto& name : space.names) {
    auto it = acc.find(name);
    if (it == acc.end() || it->second.second == 0) {
      throw DataError("participant '" + record.participant_id +
                      "' has no non-skipped word for cluster '" + name +
                      "'; the feature space was built on a different cohort");
    }
    v.values.push_back(it->second.first / static_cast<double>(it->second.second));
  }
  return v;
}

FeatureVector extract_transitions(const ParticipantRecord& record,
                                  const FeatureSpace& space) {
  if (space.regime == Regime::Any) {
    throw UsageError("token-level feature in Any Text regime");
  }
  std::map<std::string, const TrialMeasures*> by_sid;
  for (const auto* t : in_regime(record, space.regime)) {
    by_sid[t->sentence->sentence_id] = t;
  }

  // per-sentence raw counts and saccade totals
  std::map<std::string, std::map<std::pair<int, int>, long>> counts;
  std::map<std::string, double> totals;
  std::set<std::string> needed;
  for (const auto& name : space.names) {
    needed.insert(split_name(name, 3).b);
  }
  for (const auto& sid : needed) {
    auto it = by_sid.find(sid);
    if (it == by_sid.end()) {
      throw DataError("participant '" + record.participant_id +
                      "' has no Fixed trial for sentence '" + sid + "'");
    }
    auto cells = transition_counts(*it->second,
                                   space.transitions_include_refixations);
    double total = 0;
    for (const auto& [cell, n] : cells) {
      (void)cell;
      total += static_cast<double>(n);
    }
    counts[sid] = std::move(cells);
    totals[sid] = total;
  }

  FeatureVector v;
  v.participant_id = record.participant_id;
  v.values.reserve(space.names.size());
  for (const auto& name : space.names) {
    const auto parts = split_name(name, 3);  // trans / sid / i->j
    const std::size_t arrow = parts.c.find("->");
    if (arrow == std::string::npos) {
      throw DataError("malformed transition feature name '" + name + "'");
    }
    const int i = std::stoi(parts.c.substr(0, arrow));
    const int j = std::stoi(parts.c.substr(arrow + 2));
    const auto& cells = counts[parts.b];
    auto it = cells.find({i, j});
    const double raw = it == cells.end() ? 0.0 : static_cast<double>(it->second);
    if (space.speed_normalized) {
      const double total = totals[parts.b];
      v.values.push_back(total > 0 ? raw / total : 0.0);
    } else {
      v.values.push_back(raw);
    }
  }
  return v;
}

FeatureVector extract_wfc(const ParticipantRecord& record,
                          const FeatureSpace& space) {
  if (space.regime == Regime::Any) {
    throw UsageError("token-level feature in Any Text regime");
  }
  const auto trials_raw = in_regime(record, space.regime);
  std::vector<TrialMeasures> owned;
  owned.reserve(trials_raw.size());
  for (const auto* t : trials_raw) owned.push_back(*t);
  if (space.speed_normalized) {
    owned = speed_normalize(owned, NormContext::Sentence);
  }

  std::map<std::string, const TrialMeasures*> by_sid;
  for (const auto& t : owned) by_sid[t.sentence->sentence_id] = &t;

  FeatureVector v;
  v.participant_id = record.participant_id;
  v.values.reserve(space.names.size());
  for (const auto& name : space.names) {
    const auto parts = split_name(name, 4);  // wfc / metric / sid / wNN
    auto it = by_sid.find(parts.c);
    if (it == by_sid.end()) {
      throw DataError("participant '" + record.participant_id +
                      "' has no Fixed trial for sentence '" + parts.c + "'");
    }
    const int pos = std::stoi(parts.d.substr(1));
    if (pos < 1 || pos > static_cast<int>(it->second->words.size())) {
      throw DataError("feature name '" + name + "' addresses position " +
                      std::to_string(pos) + " outside sentence '" + parts.c + "'");
    }
    const auto& w = it->second->words[static_cast<std::size_t>(pos - 1)];
    v.values.push_back(met_value(w, met_from(parts.b, name)));
  }
  return v;
}

namespace {

FeatureVector extract_one(const ParticipantRecord& rec, const FeatureSpace& space) {
  switch (space.set) {
    case FeatureSet::WpCoefficients: return extract_wp_coefficients(rec, space);
    case FeatureSet::SClusters: return extract_s_clusters(rec, space);
    case FeatureSet::Transitions: return extract_transitions(rec, space);
    case FeatureSet::Wfc: return extract_wfc(rec, space);
  }
  throw UsageError("unknown feature set");
}

}  // namespace

FeatureMatrix extract_features(const std::vector<ParticipantRecord>& records,
                               const FeatureSpace& space, int threads) {
  FeatureMatrix out;
  out.space = space;
  out.vectors.resize(records.size());

  if (threads <= 1 || records.size() < 2) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      out.vectors[i] = extract_one(records[i], space);
    }
  } else {
    const std::size_t nthreads =
        std::min<std::size_t>(static_cast<std::size_t>(threads), records.size());
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t]() {
        try {
          for (std::size_t i = t; i < records.size(); i += nthreads) {
            out.vectors[i] = extract_one(records[i], space);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (const auto& v : out.vectors) {
    if (v.values.size() != space.names.size()) {
      throw NumericError("feature vector length mismatch for participant '" +
                         v.participant_id + "'");
    }
    for (double d : v.values) {
      if (!std::isfinite(d)) {
        throw NumericError("non-finite feature value for participant '" +
                           v.participant_id + "'");
      }
    }
  }
  return out;
}

const FeatureVector* FeatureMatrix::find(const std::string& participant_id) const {
  for (const auto& v : vectors) {
    if (v.participant_id == participant_id) return &v;
  }
  return nullptr;
}

void write_features_csv(const std::string& path, const FeatureMatrix& matrix) {
  CsvWriter out(path, {"participant_id", "feature_name", "value"});
  for (const auto& v : matrix.vectors) {
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      out.row({v.participant_id, matrix.space.names[i], format_double(v.values[i])});
    }
  }
}

void write_space_manifest(const std::string& path, const FeatureSpace& space) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << "# feature space: set=" << to_string(space.set)
      << " regime=" << gazescore::to_string(space.regime)
      << " speed_normalized=" << (space.speed_normalized ? "true" : "false")
      << "\n";
  for (const auto& name : space.names) out << name << "\n";
}

}  // namespace gazescore::features
