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
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "entl/common.hpp"
#include "entl/summarize.hpp"

namespace entl {

/// Laplace-smoothed unigram model of a collection: (cf(w) + 1) / (N + |V|).
/// Words outside the vocabulary get the add-one floor; callers should build
/// the collection over every text they will score.
class CollectionModel {
 public:
  CollectionModel() = default;
  explicit CollectionModel(const std::vector<TokenList>& texts) {
    for (const auto& t : texts) {
      for (const auto& w : t) {
        ++cf_[w];
        ++length_;
      }
    }
  }

  double prob(const std::string& w) const {
    auto it = cf_.find(w);
    double c = it == cf_.end() ? 0.0 : static_cast<double>(it->second);
    return (c + 1.0) / (static_cast<double>(length_) + static_cast<double>(cf_.size()));
  }

  bool contains(const std::string& w) const { return cf_.count(w) > 0; }
  const std::unordered_map<std::string, long>& counts() const { return cf_; }

 private:
  std::unordered_map<std::string, long> cf_;
  long length_ = 0;
};

/// Dirichlet-smoothed language model of one context:
/// P(w) = (tf(w) + mu * P_coll(w)) / (|c| + mu).
class ContextModel {
 public:
  ContextModel(const TokenList& tokens, const CollectionModel& coll, double mu)
      : coll_(&coll), mu_(mu), length_(static_cast<double>(tokens.size())) {
    for (const auto& w : tokens) tf_[w] += 1.0;
  }

  double prob(const std::string& w) const {
    auto it = tf_.find(w);
    double tf = it == tf_.end() ? 0.0 : it->second;
    return (tf + mu_ * coll_->prob(w)) / (length_ + mu_);
  }

  double length() const { return length_; }
  double mu() const { return mu_; }
  const CollectionModel& collection() const { return *coll_; }
  const std::map<std::string, double>& term_counts() const { return tf_; }

 private:
  const CollectionModel* coll_;
  double mu_;
  double length_;
  std::map<std::string, double> tf_;
};

/// KL(p || q) for two Dirichlet-smoothed models sharing a collection model.
/// Words outside both contexts have the constant ratio (|q|+mu)/(|p|+mu), so
/// their total contribution is computed in closed form from the collection
/// mass left over by the union vocabulary.
inline double kl_divergence(const ContextModel& p, const ContextModel& q) {
  if (p.mu() != q.mu() || &p.collection() != &q.collection()) {
    throw Error("kl_divergence: models must share collection and smoothing");
  }
  std::map<std::string, int> words;
  for (const auto& [w, _] : p.term_counts()) words[w] = 1;
  for (const auto& [w, _] : q.term_counts()) words[w] = 1;
  double kl = 0, seen_mass = 0;
  for (const auto& [w, _] : words) {
    double pw = p.prob(w), qw = q.prob(w);
    kl += pw * std::log(pw / qw);
    seen_mass += p.collection().prob(w);
  }
  double rest = std::max(0.0, 1.0 - seen_mass);
  double rest_p = rest * p.mu() / (p.length() + p.mu());
  if (rest_p > 0) kl += rest_p * std::log((q.length() + q.mu()) / (p.length() + p.mu()));
  return kl;
}

}  // namespace entl
