#include "gazescore/types.hpp"

#include "gazescore/errors.hpp"

namespace gazescore {

std::string to_string(Regime r) { return r == Regime::Fixed ? "FIXED" : "ANY"; }
std::string to_string(Group g) { return g == Group::Native ? "NATIVE" : "ESL"; }

std::string to_string(TestKind t) {
  switch (t) {
    case TestKind::Met: return "MET";
    case TestKind::Toefl: return "TOEFL";
    case TestKind::Synthetic: return "SYNTHETIC";
  }
  return "?";
}

Regime regime_from_string(const std::string& s) {
  if (s == "FIXED") return Regime::Fixed;
  if (s == "ANY") return Regime::Any;
  throw DataError("unknown regime '" + s + "' (expected FIXED or ANY)");
}

Group group_from_string(const std::string& s) {
  if (s == "NATIVE") return Group::Native;
  if (s == "ESL") return Group::Esl;
  throw DataError("unknown group '" + s + "' (expected NATIVE or ESL)");
}

TestKind test_from_string(const std::string& s) {
  if (s == "MET") return TestKind::Met;
  if (s == "TOEFL") return TestKind::Toefl;
  if (s == "SYNTHETIC") return TestKind::Synthetic;
  throw DataError("unknown test '" + s + "' (expected MET, TOEFL or SYNTHETIC)");
}

int utf8_length(const std::string& s) {
  int n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;  // count non-continuation bytes
  }
  return n;
}

const SentenceText& Dataset::sentence(const std::string& sentence_id) const {
  const SentenceText* s = find_sentence(sentence_id);
  if (!s) {
    throw DataError("unknown sentence_id '" + sentence_id + "'");
  }
  return *s;
}

const SentenceText* Dataset::find_sentence(const std::string& sentence_id) const {
  auto it = sentence_index_.find(sentence_id);
  return it == sentence_index_.end() ? nullptr : &sentences[it->second];
}

const Participant* Dataset::find_participant(const std::string& participant_id) const {
  for (const auto& p : participants) {
    if (p.participant_id == participant_id) return &p;
  }
  return nullptr;
}

std::map<std::string, double> Dataset::scores_for(TestKind test) const {
  std::map<std::string, double> out;
  for (const auto& s : scores) {
    if (s.test == test) out[s.participant_id] = s.score;
  }
  return out;
}

void Dataset::rebuild_index() {
  sentence_index_.clear();
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    sentence_index_[sentences[i].sentence_id] = i;
  }
}

}  // namespace gazescore
