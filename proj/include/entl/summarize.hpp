// Copyright 2026 The entl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Sentence scorers used as context-importance features: SumBasic (and its
// query-focused variant), LexRank centrality, tf-idf cosine and readability.

#pragma once

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "entl/common.hpp"
#include "entl/text.hpp"

namespace entl {

using TokenList = std::vector<std::string>;

/// SumBasic selection loop. Every sentence gets the average word probability
/// it had at the moment it was selected; after each selection the
/// probabilities of its words are squared. Ties pick the lowest index.
///
/// With a non-empty `focus` distribution (SumFocus) the initial word
/// probabilities are (1 - focus_mix) * p_doc + focus_mix * p_focus.
inline std::vector<double> sumbasic_scores(const std::vector<TokenList>& sentences,
                                           const std::map<std::string, double>& focus = {},
                                           double focus_mix = 0.5) {
  std::unordered_map<std::string, double> p;
  double total = 0;
  for (const auto& s : sentences) {
    for (const auto& w : s) {
      p[w] += 1.0;
      total += 1.0;
    }
  }
  if (total > 0) {
    for (auto& [_, v] : p) v /= total;
  }
  if (!focus.empty()) {
    double fz = 0;
    for (const auto& [_, v] : focus) fz += v;
    for (auto& [w, v] : p) {
      auto it = focus.find(w);
      double q = (it != focus.end() && fz > 0) ? it->second / fz : 0.0;
      v = (1.0 - focus_mix) * v + focus_mix * q;
    }
  }
  std::vector<double> scores(sentences.size(), 0.0);
  std::vector<bool> done(sentences.size(), false);
  for (std::size_t round = 0; round < sentences.size(); ++round) {
    std::size_t best = sentences.size();
    double best_score = -1.0;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (done[i]) continue;
      double s = 0;
      for (const auto& w : sentences[i]) s += p[w];
      s = sentences[i].empty() ? 0.0 : s / static_cast<double>(sentences[i].size());
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    done[best] = true;
    scores[best] = best_score;
    for (const auto& w : sentences[best]) {
      auto& v = p[w];
      v = v * v;
    }
  }
  return scores;
}

/// Sparse tf-idf vectors over a fixed set of "documents" (here sentences).
/// idf(w) = log(1 + n / df(w)).
class TfIdf {
 public:
  explicit TfIdf(const std::vector<TokenList>& docs) : n_(docs.size()) {
    for (const auto& d : docs) {
      std::map<std::string, int> seen;
      for (const auto& w : d) seen[w] = 1;
      for (const auto& [w, _] : seen) ++df_[w];
    }
  }

  double idf(const std::string& w) const {
    auto it = df_.find(w);
    double df = it == df_.end() ? 1.0 : static_cast<double>(it->second);
    return std::log(1.0 + static_cast<double>(std::max<std::size_t>(n_, 1)) / df);
  }

  std::map<std::string, double> vectorize(const TokenList& tokens) const {
    std::map<std::string, double> v;
    for (const auto& w : tokens) v[w] += 1.0;
    for (auto& [w, x] : v) x *= idf(w);
    return v;
  }

  static double cosine(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (const auto& [w, x] : a) {
      na += x * x;
      auto it = b.find(w);
      if (it != b.end()) dot += x * it->second;
    }
    for (const auto& [_, y] : b) nb += y * y;
    if (na == 0 || nb == 0) return 0.0;
    return dot / std::sqrt(na * nb);
  }

  double cosine(const TokenList& a, const TokenList& b) const {
    return cosine(vectorize(a), vectorize(b));
  }

 private:
  std::size_t n_;
  std::map<std::string, int> df_;
};

struct LexRankParams {
  double damping = 0.85;
  double sim_threshold = 0.1;
  double tolerance = 1e-8;
  int max_iterations = 10000;
};

/// Row-stochastic transition matrix of the thresholded similarity graph.
/// Self-loops are always present, so no row is empty.
inline std::vector<std::vector<double>> lexrank_transition(const std::vector<TokenList>& sentences,
                                                           double sim_threshold) {
  std::size_t n = sentences.size();
  TfIdf tfidf(sentences);
  std::vector<std::map<std::string, double>> vecs;
  for (const auto& s : sentences) vecs.push_back(tfidf.vectorize(s));
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double sim = i == j ? 1.0 : TfIdf::cosine(vecs[i], vecs[j]);
      if (sim >= sim_threshold) {
        m[i][j] = 1.0;
        row += 1.0;
      }
    }
    for (auto& x : m[i]) x /= row;
  }
  return m;
}

/// LexRank: stationary distribution of the damped random walk over the
/// thresholded similarity graph, by power iteration until the L1 change
/// drops below the tolerance. Scores sum to 1.
inline std::vector<double> lexrank_centrality(const std::vector<TokenList>& sentences,
                                              const LexRankParams& params = {}) {
  std::size_t n = sentences.size();
  if (n == 0) throw Error("lexrank_centrality: no sentences");
  auto m = lexrank_transition(sentences, params.sim_threshold);
  double nd = static_cast<double>(n);
  std::vector<double> p(n, 1.0 / nd), next(n);
  for (int it = 0; it < params.max_iterations; ++it) {
    std::fill(next.begin(), next.end(), (1.0 - params.damping) / nd);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) next[j] += params.damping * m[i][j] * p[i];
    }
    double delta = 0;
    for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - p[i]);
    p.swap(next);
    if (delta < params.tolerance) break;
  }
  double z = 0;
  for (double x : p) z += x;
  for (double& x : p) x /= z;
  return p;
}

struct Readability {
  double flesch_reading_ease = 0;  // clamped to [0, 100]
  double gunning_fog = 0;          // clamped to [0, 20]
  double flesch_kincaid_grade = 0; // clamped to [0, 20]
};

/// Readability of a single sentence given its word surfaces. Tokens without
/// letters are ignored; an empty sentence scores all zeros.
inline Readability readability(const std::vector<std::string>& surfaces) {
  double words = 0, syllables = 0, complex = 0;
  for (const auto& w : surfaces) {
    if (!has_alpha(w)) continue;
    int syl = count_syllables(w);
    words += 1;
    syllables += syl;
    if (syl >= 3) complex += 1;
  }
  Readability r;
  if (words == 0) return r;
  double wps = words;  // one sentence per context
  double spw = syllables / words;
  r.flesch_reading_ease = std::clamp(206.835 - 1.015 * wps - 84.6 * spw, 0.0, 100.0);
  r.flesch_kincaid_grade = std::clamp(0.39 * wps + 11.8 * spw - 15.59, 0.0, 20.0);
  r.gunning_fog = std::clamp(0.4 * (wps + 100.0 * complex / words), 0.0, 20.0);
  return r;
}

}  // namespace entl
