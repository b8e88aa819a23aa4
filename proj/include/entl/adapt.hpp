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

// Query-dependent adaptation. Each (event, day) is summarized by the mean and
// variance of its entities' feature values, separately in the salience and
// informativeness spaces. A query close to the centroid of the training
// queries in a space gets an adaptive score near 1 for that aspect.

#pragma once

#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entl/common.hpp"
#include "entl/features.hpp"

namespace entl {

enum class Aspect { kSalience, kInformativeness };

struct QueryFeature {
  std::string event_id;
  Day day;
  std::vector<double> salience;         // mean (M) followed by variance (M)
  std::vector<double> informativeness;  // mean (N) followed by variance (N)
};

namespace detail {

inline std::vector<double> mean_and_variance(std::span<const FeatureVector> entities,
                                             const std::vector<double> FeatureVector::*block) {
  std::size_t dim = (entities.front().*block).size();
  std::vector<double> out(2 * dim, 0.0);
  double n = static_cast<double>(entities.size());
  for (const auto& e : entities) {
    if ((e.*block).size() != dim) throw Error("query_features: inconsistent feature dimensions");
    for (std::size_t d = 0; d < dim; ++d) out[d] += (e.*block)[d] / n;
  }
  for (const auto& e : entities) {
    for (std::size_t d = 0; d < dim; ++d) {
      double diff = (e.*block)[d] - out[d];
      out[dim + d] += diff * diff / n;
    }
  }
  return out;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("dimension mismatch in adaptation space");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace detail

/// Pseudo-feedback query features: per-dimension mean and population
/// variance over all entities of one (event, day).
inline QueryFeature query_features(std::span<const FeatureVector> entities) {
  if (entities.empty()) throw Error("query_features: no entities");
  QueryFeature q;
  q.event_id = entities.front().event_id;
  q.day = entities.front().day;
  q.salience = detail::mean_and_variance(entities, &FeatureVector::salience);
  q.informativeness = detail::mean_and_variance(entities, &FeatureVector::informativeness);
  return q;
}

struct AdaptationSpace {
  std::vector<double> centroid;
  double max_sqdist = 0.0;
  bool degenerate() const { return !(max_sqdist > 0.0); }
};

struct AdaptationModel {
  AdaptationSpace salience;
  AdaptationSpace informativeness;
  int components = 1;
};

namespace detail {

/// Diagonal-covariance Gaussian mixture fitted by EM; returns the
/// mixture-weighted mean of the component means.
inline std::vector<double> gmm_centroid(const std::vector<std::vector<double>>& x, int k_comp,
                                        std::uint64_t seed, int iterations = 100) {
  const std::size_t n = x.size(), dim = x.front().size();
  const auto k = static_cast<std::size_t>(k_comp);
  std::mt19937_64 rng(mix_seed(seed));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng() % (i + 1)]);
  std::vector<std::vector<double>> mu(k), var(k, std::vector<double>(dim, 1.0));
  for (std::size_t c = 0; c < k; ++c) mu[c] = x[idx[c]];
  std::vector<double> pi(k, 1.0 / static_cast<double>(k));
  std::vector<std::vector<double>> resp(n, std::vector<double>(k));
  constexpr double kVarFloor = 1e-6;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> logp(k);
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double lp = std::log(pi[c]);
        for (std::size_t d = 0; d < dim; ++d) {
          double diff = x[i][d] - mu[c][d];
          lp -= 0.5 * (std::log(2 * M_PI * var[c][d]) + diff * diff / var[c][d]);
        }
        logp[c] = lp;
        best = std::max(best, lp);
      }
      double z = 0;
      for (std::size_t c = 0; c < k; ++c) z += std::exp(logp[c] - best);
      for (std::size_t c = 0; c < k; ++c) resp[i][c] = std::exp(logp[c] - best) / z;
    }
    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0;
      for (std::size_t i = 0; i < n; ++i) nk += resp[i][c];
      if (nk < 1e-12) continue;  // empty component keeps its parameters
      pi[c] = nk / static_cast<double>(n);
      std::fill(mu[c].begin(), mu[c].end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim; ++d) mu[c][d] += resp[i][c] * x[i][d] / nk;
      }
      std::fill(var[c].begin(), var[c].end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
          double diff = x[i][d] - mu[c][d];
          var[c][d] += resp[i][c] * diff * diff / nk;
        }
      }
      for (auto& v : var[c]) v = std::max(v, kVarFloor);
    }
    double z = 0;
    for (double p : pi) z += p;
    for (double& p : pi) p /= z;
  }
  std::vector<double> centroid(dim, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < dim; ++d) centroid[d] += pi[c] * mu[c][d];
  }
  return centroid;
}

inline AdaptationSpace fit_space(const std::vector<std::vector<double>>& x, int k, std::uint64_t seed) {
  AdaptationSpace s;
  if (k == 1) {
    s.centroid.assign(x.front().size(), 0.0);
    for (const auto& v : x) {
      for (std::size_t d = 0; d < v.size(); ++d) s.centroid[d] += v[d];
    }
    for (auto& c : s.centroid) c /= static_cast<double>(x.size());
  } else {
    s.centroid = gmm_centroid(x, k, seed);
  }
  for (const auto& v : x) s.max_sqdist = std::max(s.max_sqdist, squared_distance(v, s.centroid));
  return s;
}

}  // namespace detail

/// Centroids and maximum squared distances over the training queries.
/// K = 1 uses the arithmetic mean; K > 1 fits a diagonal Gaussian mixture.
inline AdaptationModel fit_adaptation(const std::vector<QueryFeature>& training, int components = 1,
                                      std::uint64_t seed = 42) {
  if (training.size() < 2) throw Error("fit_adaptation: need at least two training queries");
  if (components < 1) throw Error("fit_adaptation: components must be >= 1");
  if (static_cast<std::size_t>(components) > training.size()) {
    throw Error("fit_adaptation: more mixture components than training queries");
  }
  std::vector<std::vector<double>> xs, xi;
  for (const auto& q : training) {
    xs.push_back(q.salience);
    xi.push_back(q.informativeness);
  }
  AdaptationModel m;
  m.components = components;
  m.salience = detail::fit_space(xs, components, seed);
  m.informativeness = detail::fit_space(xi, components, mix_seed(seed));
  return m;
}

/// 1 - |x - centroid|^2 / max_sqdist, clamped to [0, 1]. A degenerate space
/// (all training queries identical) scores 1.
inline double adaptive_score(const QueryFeature& q, const AdaptationModel& m, Aspect aspect) {
  const auto& space = aspect == Aspect::kSalience ? m.salience : m.informativeness;
  const auto& x = aspect == Aspect::kSalience ? q.salience : q.informativeness;
  if (space.degenerate()) return 1.0;
  double s = 1.0 - detail::squared_distance(x, space.centroid) / space.max_sqdist;
  return std::clamp(s, 0.0, 1.0);
}

struct DecayParams {
  double alpha = 0.5;
  double lambda = 2.0;
  double mu_days = 1.0;

  void validate() const {
    if (!(alpha > 0 && alpha < 1)) throw Error("decay: alpha must be in (0, 1)");
    if (!(lambda > 0)) throw Error("decay: lambda must be positive");
    if (!(mu_days > 0)) throw Error("decay: interval unit must be positive");
  }
};

/// alpha^(lambda * gap / mu) for the gap in days to the previous reporting day.
inline double decay(long gap_days, const DecayParams& p = {}) {
  if (gap_days <= 0) throw Error("decay: gap must be at least one day");
  p.validate();
  return std::pow(p.alpha, p.lambda * static_cast<double>(gap_days) / p.mu_days);
}

inline nlohmann::json adaptation_to_json(const AdaptationModel& m) {
  return {{"components", m.components},
          {"salience", {{"centroid", m.salience.centroid}, {"max_sqdist", m.salience.max_sqdist}}},
          {"informativeness",
           {{"centroid", m.informativeness.centroid}, {"max_sqdist", m.informativeness.max_sqdist}}}};
}

inline AdaptationModel adaptation_from_json(const nlohmann::json& j) {
  AdaptationModel m;
  m.components = j.at("components").get<int>();
  m.salience.centroid = j.at("salience").at("centroid").get<std::vector<double>>();
  m.salience.max_sqdist = j.at("salience").at("max_sqdist").get<double>();
  m.informativeness.centroid = j.at("informativeness").at("centroid").get<std::vector<double>>();
  m.informativeness.max_sqdist = j.at("informativeness").at("max_sqdist").get<double>();
  return m;
}

}  // namespace entl
