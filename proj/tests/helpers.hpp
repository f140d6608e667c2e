#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately avoid the library's solver paths: the least-squares oracle
// inverts the Gram matrix by Gauss-Jordan elimination, ridge is minimized by
// steepest descent with exact line search, and the measures oracle walks the
// fixation events per word.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gazescore/measures.hpp"
#include "gazescore/types.hpp"

namespace testutil {

inline std::string temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("gazescore_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline gazescore::SentenceText make_sentence(
    const std::string& id, const std::vector<std::string>& surfaces) {
  gazescore::SentenceText s;
  s.sentence_id = id;
  int pos = 1;
  for (const auto& w : surfaces) {
    gazescore::TokenAnnotation t;
    t.position = pos++;
    t.surface = w;
    t.length_chars = gazescore::utf8_length(w);
    t.upos = "NOUN";
    t.xpos = "NN";
    t.deprel = "nsubj";
    t.log_frequency = -6.0;
    t.surprisal = 4.0;
    s.tokens.push_back(t);
  }
  return s;
}

inline gazescore::TrialRecord make_trial(const std::string& pid,
                                         const std::string& sid,
                                         gazescore::Regime regime,
                                         const std::vector<int>& positions,
                                         const std::vector<long>& durations) {
  gazescore::TrialRecord t;
  t.participant_id = pid;
  t.sentence_id = sid;
  t.regime = regime;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    t.fixations.push_back({static_cast<int>(i), positions[i], durations[i]});
  }
  return t;
}

// ---- independent measures oracle: per-word event walk ----------------------

struct OracleMeasures {
  double ff = 0, fp = 0, tf = 0, rp = 0;
  bool skipped = true;
};

inline OracleMeasures oracle_word_measures(const std::vector<int>& positions,
                                           const std::vector<long>& durations,
                                           int word) {
  OracleMeasures m;
  std::ptrdiff_t first = -1;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] == word) {
      first = static_cast<std::ptrdiff_t>(i);
      break;
    }
  }
  if (first < 0) return m;
  m.skipped = false;
  m.ff = static_cast<double>(durations[static_cast<std::size_t>(first)]);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] == word) m.tf += static_cast<double>(durations[i]);
  }
  for (std::size_t i = static_cast<std::size_t>(first);
       i < positions.size() && positions[i] == word; ++i) {
    m.fp += static_cast<double>(durations[i]);
  }
  for (std::size_t i = static_cast<std::size_t>(first); i < positions.size(); ++i) {
    if (positions[i] > word) break;
    m.rp += static_cast<double>(durations[i]);
  }
  return m;
}

// ---- independent least-squares oracle: Gauss-Jordan pseudo-inverse ---------

inline std::vector<std::vector<double>> gj_invert(
    std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

/// OLS via (A'A)^-1 A'y on the intercept-augmented design.
inline std::vector<double> ols_oracle(const std::vector<std::vector<double>>& x,
                                      const std::vector<double>& y) {
  const std::size_t n = x.size(), d = x[0].size() + 1;
  std::vector<std::vector<double>> gram(d, std::vector<double>(d, 0));
  std::vector<double> aty(d, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(d);
    row[0] = 1;
    for (std::size_t j = 1; j < d; ++j) row[j] = x[i][j - 1];
    for (std::size_t a = 0; a < d; ++a) {
      aty[a] += row[a] * y[i];
      for (std::size_t b = 0; b < d; ++b) gram[a][b] += row[a] * row[b];
    }
  }
  const auto inv = gj_invert(gram);
  std::vector<double> beta(d, 0);  // [intercept, coefs...]
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) beta[a] += inv[a][b] * aty[b];
  }
  return beta;
}

/// Ridge oracle: steepest descent with exact line search on the quadratic
/// loss sum (y - b - theta.x)^2 + lambda |theta|^2.
inline std::vector<double> ridge_oracle(const std::vector<std::vector<double>>& x,
                                        const std::vector<double>& y,
                                        double lambda, int max_iter = 500000) {
  const std::size_t n = x.size(), d = x[0].size();
  std::vector<double> theta(d, 0);
  double b = 0;
  auto grad = [&](std::vector<double>& gt, double& gb) {
    gt.assign(d, 0);
    gb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double pred = b;
      for (std::size_t j = 0; j < d; ++j) pred += theta[j] * x[i][j];
      const double r = pred - y[i];
      gb += 2 * r;
      for (std::size_t j = 0; j < d; ++j) gt[j] += 2 * r * x[i][j];
    }
    for (std::size_t j = 0; j < d; ++j) gt[j] += 2 * lambda * theta[j];
  };
  std::vector<double> gt(d);
  double gb = 0;
  for (int it = 0; it < max_iter; ++it) {
    grad(gt, gb);
    double gnorm2 = gb * gb;
    for (double v : gt) gnorm2 += v * v;
    if (gnorm2 < 1e-22) break;
    // exact line search: step = g'g / g'Hg with H applied by finite products
    double ghg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double xg = gb;
      for (std::size_t j = 0; j < d; ++j) xg += gt[j] * x[i][j];
      ghg += 2 * xg * xg;
    }
    for (std::size_t j = 0; j < d; ++j) ghg += 2 * lambda * gt[j] * gt[j];
    if (ghg <= 0) break;
    const double step = gnorm2 / ghg;
    b -= step * gb;
    for (std::size_t j = 0; j < d; ++j) theta[j] -= step * gt[j];
  }
  std::vector<double> out(d + 1);
  out[0] = b;
  for (std::size_t j = 0; j < d; ++j) out[j + 1] = theta[j];
  return out;
}

}  // namespace testutil
