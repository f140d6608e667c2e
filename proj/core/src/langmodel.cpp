#include "gazescore/langmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gazescore/csv.hpp"
#include "gazescore/errors.hpp"

namespace gazescore::lm {

FrequencyTable FrequencyTable::from_sentences(
    const std::vector<std::vector<std::string>>& sentences) {
  FrequencyTable t;
  for (const auto& s : sentences) {
    for (const auto& w : s) {
      ++t.counts[w];
      ++t.total;
    }
  }
  return t;
}

double FrequencyTable::log_frequency(const std::string& word) const {
  if (total <= 0) {
    throw DataError("frequency table is empty");
  }
  auto it = counts.find(word);
  const double c = it == counts.end() ? 0.5 : static_cast<double>(it->second);
  return std::log(c / static_cast<double>(total));
}

namespace {

constexpr std::uint64_t kIdBits = 21;  // vocab capped at 2^21 symbols
constexpr std::uint64_t kIdMask = (1ull << kIdBits) - 1;

// Chen & Goodman count-band discounts from count-of-counts n1..n4.
// A band with no members never contributes; it gets discount 0.
std::array<double, 4> band_discounts(const std::array<long long, 5>& n) {
  std::array<double, 4> d{0, 0, 0, 0};
  const double denom = static_cast<double>(n[1]) + 2.0 * static_cast<double>(n[2]);
  const double y = denom > 0 ? static_cast<double>(n[1]) / denom : 0.0;
  auto clamp = [](double v, double hi) { return std::min(std::max(v, 0.0), hi); };
  if (n[1] > 0) {
    d[1] = clamp(1.0 - 2.0 * y * static_cast<double>(n[2]) / static_cast<double>(n[1]), 1.0);
  }
  if (n[2] > 0) {
    d[2] = clamp(2.0 - 3.0 * y * static_cast<double>(n[3]) / static_cast<double>(n[2]), 2.0);
  }
  if (n[3] > 0) {
    d[3] = clamp(3.0 - 4.0 * y * static_cast<double>(n[4]) / static_cast<double>(n[3]), 3.0);
  }
  return d;
}

template <class Map>
std::array<long long, 5> count_of_counts(const Map& counts) {
  std::array<long long, 5> n{0, 0, 0, 0, 0};
  for (const auto& [k, c] : counts) {
    const long long ci = static_cast<long long>(c);
    if (ci >= 1 && ci <= 4) ++n[ci];
  }
  return n;
}

}  // namespace

std::uint64_t TrigramLm::key2(int a, int b) {
  return (static_cast<std::uint64_t>(a) << kIdBits) | static_cast<std::uint64_t>(b);
}

std::uint64_t TrigramLm::key3(int a, int b, int c) {
  return (((static_cast<std::uint64_t>(a) << kIdBits) |
           static_cast<std::uint64_t>(b))
          << kIdBits) |
         static_cast<std::uint64_t>(c);
}

TrigramLm TrigramLm::train(const std::vector<std::vector<std::string>>& sentences,
                           int min_count) {
  if (sentences.empty()) {
    throw DataError("language model training corpus is empty");
  }
  TrigramLm m;
  m.min_count_ = min_count;

  std::unordered_map<std::string, long long> wc;
  for (const auto& s : sentences) {
    for (const auto& w : s) {
      if (w == kBos || w == kEos || w == kUnk) {
        throw DataError("reserved symbol '" + w + "' appears in corpus");
      }
      ++wc[w];
    }
  }
  std::vector<std::string> kept;
  for (const auto& [w, c] : wc) {
    if (c >= min_count) kept.push_back(w);
  }
  std::sort(kept.begin(), kept.end());

  m.vocab_ = kept;
  m.vocab_.push_back(kEos);
  m.vocab_.push_back(kUnk);
  std::sort(m.vocab_.begin(), m.vocab_.end());
  if (m.vocab_.size() >= (1ull << kIdBits) - 1) {
    throw DataError("vocabulary too large");
  }
  for (std::size_t i = 0; i < m.vocab_.size(); ++i) {
    m.word_id_[m.vocab_[i]] = static_cast<int>(i);
  }
  m.word_id_[kBos] = static_cast<int>(m.vocab_.size());
  m.bos_id_ = m.word_id_[kBos];
  m.eos_id_ = m.word_id_[kEos];
  m.unk_id_ = m.word_id_[kUnk];

  for (const auto& s : sentences) {
    int u = m.bos_id_, v = m.bos_id_;
    auto emit = [&](int w) {
      ++m.tri_[key3(u, v, w)];
      u = v;
      v = w;
    };
    for (const auto& word : s) {
      auto it = m.word_id_.find(word);
      emit(it == m.word_id_.end() ? m.unk_id_ : it->second);
    }
    emit(m.eos_id_);
  }

  m.build_derived();
  return m;
}

void TrigramLm::build_derived() {
  bi_.clear();
  hat2_.clear();
  hat1_.clear();
  ctx3_.clear();
  ctx2_.clear();
  uni_ = ContextStats{};

  for (const auto& [k, c] : tri_) {
    const int v = static_cast<int>((k >> kIdBits) & kIdMask);
    const int w = static_cast<int>(k & kIdMask);
    bi_[key2(v, w)] += c;
  }

  // modified bigram counts: continuation counts N1+(. v w), except histories
  // starting with <s> which keep the raw count
  std::unordered_map<std::uint64_t, long long> distinct_u;
  for (const auto& [k, c] : tri_) {
    (void)c;
    const std::uint64_t vw = k & ((1ull << (2 * kIdBits)) - 1);
    ++distinct_u[vw];
  }
  for (const auto& [k, c] : bi_) {
    const int v = static_cast<int>((k >> kIdBits) & kIdMask);
    hat2_[k] = v == bos_id_ ? static_cast<double>(c)
                            : static_cast<double>(distinct_u[k]);
  }

  // modified unigram counts: N1+(. w) over the bigram table
  std::unordered_map<int, long long> distinct_v;
  for (const auto& [k, c] : bi_) {
    (void)c;
    ++distinct_v[static_cast<int>(k & kIdMask)];
  }
  for (const auto& [w, c] : distinct_v) {
    hat1_[w] = static_cast<double>(c);
  }

  disc_[3] = band_discounts(count_of_counts(tri_));
  disc_[2] = band_discounts(count_of_counts(hat2_));
  disc_[1] = band_discounts(count_of_counts(hat1_));

  auto add = [](ContextStats& s, double c) {
    s.total += c;
    if (c == 1) ++s.n1;
    else if (c == 2) ++s.n2;
    else if (c >= 3) ++s.n3p;
  };
  for (const auto& [k, c] : tri_) {
    add(ctx3_[k >> kIdBits], static_cast<double>(c));
  }
  for (const auto& [k, c] : hat2_) {
    add(ctx2_[static_cast<int>((k >> kIdBits) & kIdMask)], c);
  }
  for (const auto& [w, c] : hat1_) {
    (void)w;
    add(uni_, c);
  }
}

double TrigramLm::discount(int order, int band) const {
  return disc_[order][band];
}

FrequencyTable TrigramLm::frequency_table() const {
  FrequencyTable t;
  for (const auto& [k, c] : bi_) {
    const int w = static_cast<int>(k & kIdMask);
    if (w == eos_id_ || w == unk_id_) continue;
    t.counts[vocab_[static_cast<std::size_t>(w)]] += c;
    t.total += c;
  }
  return t;
}

int TrigramLm::map_id(const std::string& word) const {
  auto it = word_id_.find(word);
  return it == word_id_.end() ? unk_id_ : it->second;
}

double TrigramLm::p_uni(int w) const {
  const double base = 1.0 / static_cast<double>(vocab_.size());
  if (uni_.total <= 0) return base;
  auto it = hat1_.find(w);
  const double c = it == hat1_.end() ? 0.0 : it->second;
  const double d = c > 0 ? disc_[1][std::min<int>(static_cast<int>(c), 3)] : 0.0;
  const double gamma = (disc_[1][1] * uni_.n1 + disc_[1][2] * uni_.n2 +
                        disc_[1][3] * uni_.n3p) /
                       uni_.total;
  return std::max(c - d, 0.0) / uni_.total + gamma * base;
}

double TrigramLm::p_bi(int w, int v) const {
  const double lower = p_uni(w);
  auto cit = ctx2_.find(v);
  if (cit == ctx2_.end()) return lower;
  const ContextStats& s = cit->second;
  auto it = hat2_.find(key2(v, w));
  const double c = it == hat2_.end() ? 0.0 : it->second;
  const double d = c > 0 ? disc_[2][std::min<int>(static_cast<int>(c), 3)] : 0.0;
  const double gamma =
      (disc_[2][1] * s.n1 + disc_[2][2] * s.n2 + disc_[2][3] * s.n3p) / s.total;
  return std::max(c - d, 0.0) / s.total + gamma * lower;
}

double TrigramLm::p_tri(int w, int u, int v) const {
  const double lower = p_bi(w, v);
  auto cit = ctx3_.find(key2(u, v));
  if (cit == ctx3_.end()) return lower;
  const ContextStats& s = cit->second;
  auto it = tri_.find(key3(u, v, w));
  const double c = it == tri_.end() ? 0.0 : static_cast<double>(it->second);
  const double d = c > 0 ? disc_[3][std::min<int>(static_cast<int>(c), 3)] : 0.0;
  const double gamma =
      (disc_[3][1] * s.n1 + disc_[3][2] * s.n2 + disc_[3][3] * s.n3p) / s.total;
  return std::max(c - d, 0.0) / s.total + gamma * lower;
}

double TrigramLm::prob(const std::string& word,
                       std::span<const std::string> context) const {
  const int w = map_id(word);
  if (context.size() >= 2) {
    return p_tri(w, map_id(context[context.size() - 2]),
                 map_id(context[context.size() - 1]));
  }
  if (context.size() == 1) {
    return p_bi(w, map_id(context[0]));
  }
  return p_uni(w);
}

std::vector<double> TrigramLm::surprisals(const std::vector<std::string>& words) const {
  std::vector<double> out;
  out.reserve(words.size());
  int u = bos_id_, v = bos_id_;
  for (const auto& word : words) {
    const int w = map_id(word);
    const double p = p_tri(w, u, v);
    out.push_back(std::max(0.0, -std::log(p)));
    u = v;
    v = w;
  }
  return out;
}

std::vector<SurprisalResult> TrigramLm::sentence_surprisals(
    const SentenceText& sentence) const {
  std::vector<std::string> words;
  words.reserve(sentence.tokens.size());
  for (const auto& t : sentence.tokens) words.push_back(t.surface);
  const auto vals = surprisals(words);
  std::vector<SurprisalResult> out;
  out.reserve(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    out.push_back({sentence.tokens[i].position, vals[i]});
  }
  return out;
}

// Sectioned text format. Raw trigram counts are the source of truth; the
// derived tables (modified counts, discounts) are rebuilt at load so the
// serialized discounts section is informational.
void TrigramLm::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << "gazescore-lm 1\n";
  out << "[meta]\n";
  out << "order 3\n";
  out << "min_count " << min_count_ << "\n";
  out << "[vocab]\n";
  for (const auto& w : vocab_) out << w << "\n";
  out << "[discounts]\n";
  for (int order = 1; order <= 3; ++order) {
    for (int band = 1; band <= 3; ++band) {
      out << order << " " << band << " " << format_double(disc_[order][band])
          << "\n";
    }
  }
  out << "[trigrams]\n";
  std::vector<std::uint64_t> keys;
  keys.reserve(tri_.size());
  for (const auto& [k, c] : tri_) {
    (void)c;
    keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());
  auto name = [&](int id) -> const std::string& {
    static const std::string bos = kBos;
    return id == bos_id_ ? bos : vocab_[static_cast<std::size_t>(id)];
  };
  for (std::uint64_t k : keys) {
    const int u = static_cast<int>((k >> (2 * kIdBits)) & kIdMask);
    const int v = static_cast<int>((k >> kIdBits) & kIdMask);
    const int w = static_cast<int>(k & kIdMask);
    out << name(u) << " " << name(v) << " " << name(w) << " " << tri_.at(k)
        << "\n";
  }
  out << "[end]\n";
}

TrigramLm TrigramLm::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line) || line != "gazescore-lm 1") {
    throw DataError(path + ": not a gazescore-lm file");
  }

  TrigramLm m;
  std::string section;
  std::vector<std::string> vocab;
  struct RawTri {
    std::string u, v, w;
    long long c;
  };
  std::vector<RawTri> tris;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line;
      continue;
    }
    if (section == "[meta]") {
      std::istringstream ss(line);
      std::string k;
      ss >> k;
      if (k == "min_count") ss >> m.min_count_;
    } else if (section == "[vocab]") {
      vocab.push_back(line);
    } else if (section == "[trigrams]") {
      std::istringstream ss(line);
      RawTri t;
      if (!(ss >> t.u >> t.v >> t.w >> t.c)) {
        throw DataError(path + ": malformed trigram line '" + line + "'");
      }
      tris.push_back(std::move(t));
    }
    // [discounts] is informational; recomputed below
  }
  if (vocab.empty()) throw DataError(path + ": empty vocabulary");

  m.vocab_ = vocab;
  for (std::size_t i = 0; i < m.vocab_.size(); ++i) {
    m.word_id_[m.vocab_[i]] = static_cast<int>(i);
  }
  if (!m.word_id_.count(kEos) || !m.word_id_.count(kUnk)) {
    throw DataError(path + ": vocabulary missing reserved symbols");
  }
  m.word_id_[kBos] = static_cast<int>(m.vocab_.size());
  m.bos_id_ = m.word_id_[kBos];
  m.eos_id_ = m.word_id_[kEos];
  m.unk_id_ = m.word_id_[kUnk];

  for (const auto& t : tris) {
    auto id = [&](const std::string& w) {
      auto it = m.word_id_.find(w);
      if (it == m.word_id_.end()) {
        throw DataError(path + ": trigram references unknown word '" + w + "'");
      }
      return it->second;
    };
    if (t.c <= 0) throw DataError(path + ": non-positive trigram count");
    m.tri_[key3(id(t.u), id(t.v), id(t.w))] += t.c;
  }
  m.build_derived();
  return m;
}

std::vector<std::vector<std::string>> read_text_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<std::string> words;
    std::string w;
    while (ss >> w) words.push_back(w);
    if (!words.empty()) out.push_back(std::move(words));
  }
  return out;
}

}  // namespace gazescore::lm
