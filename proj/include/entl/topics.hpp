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

#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "entl/common.hpp"
#include "entl/summarize.hpp"

namespace entl {

struct LdaParams {
  int topics = 20;
  int iterations = 200;
  int inference_iterations = 50;
  double alpha = 0.1;
  double beta = 0.01;
  std::uint64_t seed = 42;
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int sample_discrete(std::mt19937_64& rng, const std::vector<double>& weights, double total) {
  double u = unit_uniform(rng) * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    u -= weights[k];
    if (u < 0) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace detail

/// Latent Dirichlet allocation fitted by collapsed Gibbs sampling. Inference
/// on new text folds the text in with the topic-word counts held fixed; the
/// sampler for a text is seeded from the model seed and the text itself, so
/// equal texts always get equal distributions.
class TopicModel {
 public:
  TopicModel() = default;
  explicit TopicModel(LdaParams params) : params_(params) {}

  bool fitted() const { return fitted_; }
  int topics() const { return params_.topics; }

  void fit(const std::vector<TokenList>& docs) {
    const int k_topics = params_.topics;
    if (k_topics < 1) throw Error("LDA needs at least one topic");
    vocab_.clear();
    std::vector<std::vector<int>> words;
    for (const auto& d : docs) {
      std::vector<int> ids;
      for (const auto& w : d) {
        auto [it, _] = vocab_.emplace(w, static_cast<int>(vocab_.size()));
        ids.push_back(it->second);
      }
      words.push_back(std::move(ids));
    }
    const std::size_t v = vocab_.size();
    word_topic_.assign(v * static_cast<std::size_t>(k_topics), 0);
    topic_total_.assign(static_cast<std::size_t>(k_topics), 0);
    std::mt19937_64 rng(mix_seed(params_.seed));
    std::vector<std::vector<int>> z(words.size());
    std::vector<std::vector<int>> doc_topic(words.size(), std::vector<int>(static_cast<std::size_t>(k_topics), 0));
    for (std::size_t d = 0; d < words.size(); ++d) {
      for (int w : words[d]) {
        int t = static_cast<int>(rng() % static_cast<std::uint64_t>(k_topics));
        z[d].push_back(t);
        ++doc_topic[d][static_cast<std::size_t>(t)];
        ++wt(w, t);
        ++topic_total_[static_cast<std::size_t>(t)];
      }
    }
    std::vector<double> weights(static_cast<std::size_t>(k_topics));
    const double vbeta = static_cast<double>(v) * params_.beta;
    for (int it = 0; it < params_.iterations; ++it) {
      for (std::size_t d = 0; d < words.size(); ++d) {
        for (std::size_t i = 0; i < words[d].size(); ++i) {
          int w = words[d][i], t = z[d][i];
          --doc_topic[d][static_cast<std::size_t>(t)];
          --wt(w, t);
          --topic_total_[static_cast<std::size_t>(t)];
          double total = 0;
          for (int k = 0; k < k_topics; ++k) {
            auto ku = static_cast<std::size_t>(k);
            weights[ku] = (doc_topic[d][ku] + params_.alpha) * (wt(w, k) + params_.beta) /
                          (topic_total_[ku] + vbeta);
            total += weights[ku];
          }
          t = detail::sample_discrete(rng, weights, total);
          z[d][i] = t;
          ++doc_topic[d][static_cast<std::size_t>(t)];
          ++wt(w, t);
          ++topic_total_[static_cast<std::size_t>(t)];
        }
      }
    }
    fitted_ = true;
    std::lock_guard lock(cache_mu_);
    cache_.clear();
  }

  /// p(topic | text). Unknown words are skipped; a text with no known words
  /// gets the uniform distribution.
  std::vector<double> infer(const TokenList& tokens) const {
    if (!fitted_) throw Error("topic model is not fitted");
    std::string key;
    for (const auto& t : tokens) {
      key += t;
      key.push_back('\x1f');
    }
    {
      std::lock_guard lock(cache_mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    const int k_topics = params_.topics;
    const auto ku_n = static_cast<std::size_t>(k_topics);
    std::vector<int> ids;
    for (const auto& w : tokens) {
      auto it = vocab_.find(w);
      if (it != vocab_.end()) ids.push_back(it->second);
    }
    std::vector<double> theta(ku_n, 1.0 / k_topics);
    if (!ids.empty()) {
      std::mt19937_64 rng(mix_seed(params_.seed ^ stable_hash(key)));
      const double vbeta = static_cast<double>(vocab_.size()) * params_.beta;
      std::vector<int> z(ids.size()), dt(ku_n, 0);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        z[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(k_topics));
        ++dt[static_cast<std::size_t>(z[i])];
      }
      std::vector<double> weights(ku_n), acc(ku_n, 0.0);
      int burn = params_.inference_iterations / 2, kept = 0;
      for (int it = 0; it < params_.inference_iterations; ++it) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
          --dt[static_cast<std::size_t>(z[i])];
          double total = 0;
          for (int k = 0; k < k_topics; ++k) {
            auto ku = static_cast<std::size_t>(k);
            weights[ku] = (dt[ku] + params_.alpha) * (wt(ids[i], k) + params_.beta) /
                          (topic_total_[ku] + vbeta);
            total += weights[ku];
          }
          z[i] = detail::sample_discrete(rng, weights, total);
          ++dt[static_cast<std::size_t>(z[i])];
        }
        if (it >= burn) {
          for (std::size_t k = 0; k < ku_n; ++k) acc[k] += dt[k];
          ++kept;
        }
      }
      double denom = static_cast<double>(ids.size()) + k_topics * params_.alpha;
      for (std::size_t k = 0; k < ku_n; ++k) theta[k] = (acc[k] / kept + params_.alpha) / denom;
      double z_sum = 0;
      for (double x : theta) z_sum += x;
      for (double& x : theta) x /= z_sum;
    }
    std::lock_guard lock(cache_mu_);
    cache_.emplace(key, theta);
    return theta;
  }

  /// Euclidean distance between the topic distributions of two texts.
  double diversity(const TokenList& a, const TokenList& b) const;

 private:
  int& wt(int w, int t) { return word_topic_[static_cast<std::size_t>(w) * static_cast<std::size_t>(params_.topics) + static_cast<std::size_t>(t)]; }
  int wt(int w, int t) const { return word_topic_[static_cast<std::size_t>(w) * static_cast<std::size_t>(params_.topics) + static_cast<std::size_t>(t)]; }

  LdaParams params_;
  bool fitted_ = false;
  std::unordered_map<std::string, int> vocab_;
  std::vector<int> word_topic_;
  std::vector<int> topic_total_;
  mutable std::mutex cache_mu_;
  mutable std::unordered_map<std::string, std::vector<double>> cache_;
};

/// sqrt(sum_k (p_k - q_k)^2); in [0, sqrt(2)] for probability vectors.
inline double topic_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw Error("topic_distance: dimension mismatch");
  double s = 0;
  for (std::size_t k = 0; k < p.size(); ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
  return std::sqrt(s);
}

inline double TopicModel::diversity(const TokenList& a, const TokenList& b) const {
  return topic_distance(infer(a), infer(b));
}

}  // namespace entl
