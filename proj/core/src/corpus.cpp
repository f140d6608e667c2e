#include "gazescore/corpus.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gazescore/csv.hpp"
#include "gazescore/errors.hpp"

namespace gazescore::corpus {

std::vector<SentenceText> load_corpus(const std::string& tokens_path) {
  CsvReader in(tokens_path,
               {"sentence_id", "position", "surface", "upos", "xpos", "deprel"});
  const bool has_logfreq = in.has_column("log_frequency");
  const bool has_surprisal = in.has_column("surprisal");

  std::map<std::string, SentenceText> by_id;
  std::vector<std::string> order;

  while (in.next()) {
    TokenAnnotation tok;
    tok.position = static_cast<int>(in.int_field("position"));
    tok.surface = in.field("surface");
    tok.length_chars = utf8_length(tok.surface);
    tok.upos = in.field("upos");
    tok.xpos = in.field("xpos");
    tok.deprel = in.field("deprel");
    if (tok.surface.empty()) in.fail("empty surface");
    if (tok.upos.empty() || tok.xpos.empty() || tok.deprel.empty()) {
      in.fail("token is missing a syntactic label (upos/xpos/deprel)");
    }
    if (tok.position < 1) in.fail("position must be >= 1");
    if (has_logfreq && !in.field("log_frequency").empty()) {
      tok.log_frequency = in.double_field("log_frequency");
    }
    if (has_surprisal && !in.field("surprisal").empty()) {
      double s = in.double_field("surprisal");
      if (s < 0) in.fail("surprisal must be >= 0");
      tok.surprisal = s;
    }

    const std::string id = in.field("sentence_id");
    if (id.empty()) in.fail("empty sentence_id");
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      order.push_back(id);
      it = by_id.emplace(id, SentenceText{id, {}}).first;
    }
    it->second.tokens.push_back(std::move(tok));
  }

  std::vector<SentenceText> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    SentenceText& s = by_id[id];
    std::sort(s.tokens.begin(), s.tokens.end(),
              [](const TokenAnnotation& a, const TokenAnnotation& b) {
                return a.position < b.position;
              });
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const int expect = static_cast<int>(i) + 1;
      if (s.tokens[i].position != expect) {
        if (i > 0 && s.tokens[i].position == s.tokens[i - 1].position) {
          throw DataError(tokens_path + ": sentence '" + id +
                          "': duplicate token position " +
                          std::to_string(s.tokens[i].position));
        }
        throw DataError(tokens_path + ": sentence '" + id +
                        "': non-contiguous positions (expected " +
                        std::to_string(expect) + ", found " +
                        std::to_string(s.tokens[i].position) + ")");
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Participant> load_fixations(const std::string& fixations_path,
                                        const std::vector<SentenceText>& corpus) {
  std::map<std::string, int> sentence_len;
  for (const auto& s : corpus) sentence_len[s.sentence_id] = s.length();

  CsvReader in(fixations_path,
               {"participant_id", "group", "native_language", "sentence_id",
                "regime", "order", "word_position", "duration_ms"});

  std::map<std::string, Participant> by_id;
  std::vector<std::string> order;
  // trial lookup per (participant, sentence); also enforces one trial per pair
  std::map<std::pair<std::string, std::string>, std::size_t> trial_of;

  while (in.next()) {
    const std::string pid = in.field("participant_id");
    const std::string sid = in.field("sentence_id");
    if (pid.empty()) in.fail("empty participant_id");
    auto len_it = sentence_len.find(sid);
    if (len_it == sentence_len.end()) {
      in.fail("unknown sentence_id '" + sid + "'");
    }

    FixationEvent ev;
    ev.order = static_cast<int>(in.int_field("order"));
    ev.word_position = static_cast<int>(in.int_field("word_position"));
    ev.duration_ms = in.int_field("duration_ms");
    if (ev.duration_ms <= 0) in.fail("non-positive duration");
    if (ev.word_position < 1 || ev.word_position > len_it->second) {
      in.fail("word_position " + std::to_string(ev.word_position) +
              " outside sentence '" + sid + "' of length " +
              std::to_string(len_it->second));
    }

    const Group group = group_from_string(in.field("group"));
    const Regime regime = regime_from_string(in.field("regime"));
    const std::string lang = in.field("native_language");

    auto pit = by_id.find(pid);
    if (pit == by_id.end()) {
      order.push_back(pid);
      pit = by_id.emplace(pid, Participant{pid, group, lang, {}}).first;
    } else {
      if (pit->second.group != group) in.fail("participant '" + pid + "' changes group");
      if (pit->second.native_language != lang) {
        in.fail("participant '" + pid + "' changes native_language");
      }
    }

    Participant& p = pit->second;
    auto key = std::make_pair(pid, sid);
    auto tit = trial_of.find(key);
    if (tit == trial_of.end()) {
      trial_of[key] = p.trials.size();
      p.trials.push_back(TrialRecord{pid, sid, regime, {}});
      tit = trial_of.find(key);
    }
    TrialRecord& trial = p.trials[tit->second];
    if (trial.regime != regime) {
      in.fail("trial (" + pid + ", " + sid + ") changes regime");
    }
    trial.fixations.push_back(ev);
  }

  std::vector<Participant> out;
  out.reserve(order.size());
  for (const auto& pid : order) {
    Participant& p = by_id[pid];
    for (auto& t : p.trials) {
      std::sort(t.fixations.begin(), t.fixations.end(),
                [](const FixationEvent& a, const FixationEvent& b) {
                  return a.order < b.order;
                });
      for (std::size_t i = 0; i < t.fixations.size(); ++i) {
        if (t.fixations[i].order != static_cast<int>(i)) {
          throw DataError(fixations_path + ": trial (" + pid + ", " +
                          t.sentence_id + "): fixation order values must be 0.." +
                          std::to_string(t.fixations.size() - 1) +
                          " without gaps or repeats");
        }
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ScoreRecord> load_scores(const std::string& scores_path) {
  CsvReader in(scores_path, {"participant_id", "test", "score", "max_score"});
  std::vector<ScoreRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  while (in.next()) {
    ScoreRecord rec;
    rec.participant_id = in.field("participant_id");
    rec.test = test_from_string(in.field("test"));
    rec.score = in.double_field("score");
    rec.max_score = in.double_field("max_score");
    if (rec.participant_id.empty()) in.fail("empty participant_id");
    if (rec.max_score <= 0) in.fail("max_score must be positive");
    if (rec.score < 0 || rec.score > rec.max_score) {
      in.fail("score " + format_double(rec.score) + " outside [0, " +
              format_double(rec.max_score) + "]");
    }
    if (!seen.insert({rec.participant_id, in.field("test")}).second) {
      in.fail("duplicate score for (" + rec.participant_id + ", " +
              in.field("test") + ")");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

Dataset load_dataset(const std::string& tokens_path,
                     const std::string& fixations_path,
                     const std::string& scores_path) {
  Dataset ds;
  ds.sentences = load_corpus(tokens_path);
  ds.participants = load_fixations(fixations_path, ds.sentences);
  if (!scores_path.empty()) {
    ds.scores = load_scores(scores_path);
  }
  ds.rebuild_index();
  return ds;
}

void write_corpus(const std::string& tokens_path,
                  const std::vector<SentenceText>& sentences) {
  bool annotated = false;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      if (t.log_frequency || t.surprisal) annotated = true;
    }
  }
  std::vector<std::string> header = {"sentence_id", "position", "surface",
                                     "upos",        "xpos",     "deprel"};
  if (annotated) {
    header.push_back("log_frequency");
    header.push_back("surprisal");
  }
  CsvWriter out(tokens_path, header);
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      std::vector<std::string> row = {s.sentence_id, format_int(t.position),
                                      t.surface,     t.upos,
                                      t.xpos,        t.deprel};
      if (annotated) {
        row.push_back(t.log_frequency ? format_double(*t.log_frequency) : "");
        row.push_back(t.surprisal ? format_double(*t.surprisal) : "");
      }
      out.row(row);
    }
  }
}

void write_fixations(const std::string& fixations_path,
                     const std::vector<Participant>& participants) {
  CsvWriter out(fixations_path,
                {"participant_id", "group", "native_language", "sentence_id",
                 "regime", "order", "word_position", "duration_ms"});
  for (const auto& p : participants) {
    for (const auto& t : p.trials) {
      for (const auto& f : t.fixations) {
        out.row({p.participant_id, to_string(p.group), p.native_language,
                 t.sentence_id, to_string(t.regime), format_int(f.order),
                 format_int(f.word_position), format_int(f.duration_ms)});
      }
    }
  }
}

void write_scores(const std::string& scores_path,
                  const std::vector<ScoreRecord>& scores) {
  CsvWriter out(scores_path, {"participant_id", "test", "score", "max_score"});
  for (const auto& s : scores) {
    out.row({s.participant_id, to_string(s.test), format_double(s.score),
             format_double(s.max_score)});
  }
}

}  // namespace gazescore::corpus
