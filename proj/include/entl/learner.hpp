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

// Joint pairwise learning of the salience and informativeness weight
// vectors. The ranking function is
//
//   y = S(q,t) * <w_s, x_s> + gamma(t) * I(q,t) * <w_i, x_i>,
//
// which is linear in the stacked weights [w_s; w_i] once every feature
// difference is scaled block-wise by S and gamma * I. Training therefore
// reduces to a linear RankSVM on scaled pair differences z:
//
//   min 1/2 (|w_s|^2 + |w_i|^2) + c * sum max(0, 1 - <w, z>).

#pragma once

#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entl/adapt.hpp"
#include "entl/common.hpp"
#include "entl/features.hpp"

namespace entl {

inline constexpr int kModelFormatVersion = 1;

/// Feature-set variants. AdaptER scales blocks by the adaptive scores;
/// the others fix the block coefficients.
enum class RankMode { kAdaptER, kNoAdapt, kSalienceOnly, kInformativenessOnly };

inline std::string to_string(RankMode m) {
  switch (m) {
    case RankMode::kAdaptER: return "AdaptER";
    case RankMode::kNoAdapt: return "No-Adapt";
    case RankMode::kSalienceOnly: return "SAL";
    case RankMode::kInformativenessOnly: return "INF";
  }
  return "?";
}

inline RankMode parse_rank_mode(std::string_view s) {
  if (s == "AdaptER") return RankMode::kAdaptER;
  if (s == "No-Adapt" || s == "NoAdapt") return RankMode::kNoAdapt;
  if (s == "SAL") return RankMode::kSalienceOnly;
  if (s == "INF") return RankMode::kInformativenessOnly;
  throw Error("unknown mode '" + std::string(s) + "' (expected AdaptER, No-Adapt, SAL or INF)");
}

/// Block coefficients (salience, informativeness) applied in training and
/// scoring for a given mode.
struct BlockScale {
  double salience = 1.0;
  double informativeness = 1.0;
};

inline BlockScale block_scale(RankMode mode, double s, double i, double gamma) {
  switch (mode) {
    case RankMode::kAdaptER: return {s, gamma * i};
    case RankMode::kNoAdapt: return {1.0, 1.0};
    case RankMode::kSalienceOnly: return {1.0, 0.0};
    case RankMode::kInformativenessOnly: return {0.0, 1.0};
  }
  return {};
}

struct PreferencePair {
  std::size_t preferred;
  std::size_t other;
};

/// (a, b) for every pair within one group whose labels differ by at least
/// `margin`. A positive margin keeps the relation antisymmetric.
inline std::vector<PreferencePair> build_pairs(std::span<const double> labels, double margin) {
  if (!(margin > 0)) throw Error("build_pairs: margin must be positive");
  std::vector<PreferencePair> out;
  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (std::size_t b = 0; b < labels.size(); ++b) {
      if (a != b && labels[a] - labels[b] >= margin) out.push_back({a, b});
    }
  }
  return out;
}

struct PairConstraint {
  std::string event_id;
  Day day;
  std::string preferred;
  std::string other;
  std::vector<double> z;  // scaled difference, salience block then informativeness block
  std::size_t salience_dim = 0;
  double slack = 0.0;
};

inline PairConstraint transform_pair(const FeatureVector& a, const FeatureVector& b, BlockScale scale) {
  if (a.salience.size() != b.salience.size() || a.informativeness.size() != b.informativeness.size()) {
    throw Error("transform_pair: feature dimension mismatch");
  }
  PairConstraint p;
  p.event_id = a.event_id;
  p.day = a.day;
  p.preferred = a.entity_key;
  p.other = b.entity_key;
  p.salience_dim = a.salience.size();
  for (std::size_t d = 0; d < a.salience.size(); ++d) {
    p.z.push_back(scale.salience * (a.salience[d] - b.salience[d]));
  }
  for (std::size_t d = 0; d < a.informativeness.size(); ++d) {
    p.z.push_back(scale.informativeness * (a.informativeness[d] - b.informativeness[d]));
  }
  return p;
}

inline PairConstraint transform_pair(const FeatureVector& a, const FeatureVector& b, double s, double i,
                                     double gamma) {
  return transform_pair(a, b, BlockScale{s, gamma * i});
}

enum class Solver { kPegasos, kDualCoordinateDescent };

inline std::string to_string(Solver s) {
  return s == Solver::kPegasos ? "pegasos" : "dual-cd";
}

inline Solver parse_solver(std::string_view s) {
  if (s == "pegasos") return Solver::kPegasos;
  if (s == "dual-cd") return Solver::kDualCoordinateDescent;
  throw Error("unknown solver '" + std::string(s) + "'");
}

struct TrainParams {
  double c = 20.0;
  int epochs = 2000;  // cap; training usually stops earlier on the tolerance
  std::uint64_t seed = 42;
  double tolerance = 1e-5;  // relative objective change for early stop
  Solver solver = Solver::kDualCoordinateDescent;
};

struct TrainResult {
  std::vector<double> weights;            // stacked [w_s; w_i]
  std::vector<double> objective_history;  // one entry per epoch
  double objective = 0.0;
  std::size_t violations = 0;  // pairs with <w, z> <= 0
  int epochs_run = 0;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double svm_objective(std::span<const double> w, const std::vector<PairConstraint>& pairs, double c) {
  double reg = 0.5 * dot(w, w), loss = 0;
  for (const auto& p : pairs) loss += std::max(0.0, 1.0 - dot(w, p.z));
  return reg + c * loss;
}

namespace detail {

inline std::vector<std::size_t> shuffled(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  return order;
}

/// Pegasos with lambda = 1 / (c * n), step 1 / (lambda * t), projection onto
/// the ball of radius 1 / sqrt(lambda), and a running average of iterates.
inline TrainResult train_pegasos(const std::vector<PairConstraint>& pairs, const TrainParams& p) {
  const std::size_t n = pairs.size(), dim = pairs.front().z.size();
  const double lambda = 1.0 / (p.c * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);
  std::vector<double> w(dim, 0.0), avg(dim, 0.0);
  std::mt19937_64 rng(mix_seed(p.seed));
  TrainResult r;
  double t = 0;
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    for (auto i : shuffled(n, rng)) {
      t += 1;
      double eta = 1.0 / (lambda * t);
      bool active = dot(w, pairs[i].z) < 1.0;
      double shrink = 1.0 - eta * lambda;
      for (std::size_t d = 0; d < dim; ++d) w[d] = shrink * w[d] + (active ? eta * pairs[i].z[d] : 0.0);
      double norm = std::sqrt(dot(w, w));
      if (norm > radius) {
        for (auto& x : w) x *= radius / norm;
      }
      for (std::size_t d = 0; d < dim; ++d) avg[d] += (w[d] - avg[d]) / t;
    }
    r.objective_history.push_back(svm_objective(avg, pairs, p.c));
    ++r.epochs_run;
    if (epoch > 0) {
      double prev = r.objective_history[r.objective_history.size() - 2];
      if (std::abs(prev - r.objective_history.back()) <= p.tolerance * std::max(1.0, std::abs(prev))) break;
    }
  }
  r.weights = avg;
  return r;
}

/// Dual coordinate descent for the L1-loss linear SVM without bias, visiting
/// the pairs in a freshly shuffled order each epoch. The returned weights
/// are the weighted average of the iterates (weight proportional to the
/// step number), and the recorded objective is taken at that average.
inline TrainResult train_dual_cd(const std::vector<PairConstraint>& pairs, const TrainParams& p) {
  const std::size_t n = pairs.size(), dim = pairs.front().z.size();
  std::vector<double> w(dim, 0.0), avg(dim, 0.0), alpha(n, 0.0), qii(n);
  for (std::size_t i = 0; i < n; ++i) qii[i] = dot(pairs[i].z, pairs[i].z);
  std::mt19937_64 rng(mix_seed(p.seed));
  TrainResult r;
  double t = 0;
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    double max_pg = 0;
    for (auto i : shuffled(n, rng)) {
      t += 1;
      if (qii[i] > 0) {
        double g = dot(w, pairs[i].z) - 1.0;
        double pg = g;
        if (alpha[i] <= 0) pg = std::min(g, 0.0);
        else if (alpha[i] >= p.c) pg = std::max(g, 0.0);
        max_pg = std::max(max_pg, std::abs(pg));
        if (pg != 0.0) {
          double old = alpha[i];
          alpha[i] = std::clamp(old - g / qii[i], 0.0, p.c);
          double step = alpha[i] - old;
          for (std::size_t d = 0; d < dim; ++d) w[d] += step * pairs[i].z[d];
        }
      }
      double rho = 2.0 / (t + 1.0);
      for (std::size_t d = 0; d < dim; ++d) avg[d] += rho * (w[d] - avg[d]);
    }
    r.objective_history.push_back(svm_objective(avg, pairs, p.c));
    ++r.epochs_run;
    if (epoch > 0) {
      double prev = r.objective_history[r.objective_history.size() - 2];
      if (std::abs(prev - r.objective_history.back()) <= p.tolerance * std::max(1.0, std::abs(prev)) &&
          max_pg < 1e-3) {
        break;
      }
    }
  }
  r.weights = avg;
  return r;
}

}  // namespace detail

/// Trains stacked weights on pair constraints. Deterministic for a given
/// seed and pair order.
inline TrainResult train(std::vector<PairConstraint>& pairs, const TrainParams& params) {
  if (pairs.empty()) throw Error("train: no preference pairs");
  if (!(params.c > 0)) throw Error("train: c must be positive");
  if (params.epochs < 1) throw Error("train: epochs must be >= 1");
  auto dim = pairs.front().z.size();
  for (const auto& p : pairs) {
    if (p.z.size() != dim) throw Error("train: pair dimension mismatch");
  }
  TrainResult r = params.solver == Solver::kPegasos ? detail::train_pegasos(pairs, params)
                                                    : detail::train_dual_cd(pairs, params);
  r.objective = svm_objective(r.weights, pairs, params.c);
  for (auto& p : pairs) {
    double m = dot(r.weights, p.z);
    p.slack = std::max(0.0, 1.0 - m);
    if (m <= 0) ++r.violations;
  }
  return r;
}

struct JointModel {
  RankMode mode = RankMode::kAdaptER;
  std::vector<std::string> salience_names;
  std::vector<std::string> informativeness_names;
  std::vector<double> omega_s;
  std::vector<double> omega_i;
  AdaptationModel adaptation;
  DecayParams decay;
  TrainParams train;
  double pair_margin = 0.5;
  std::size_t pair_count = 0;
  double objective = 0.0;
  std::size_t violations = 0;
};

/// y = S * <w_s, x_s> + gamma * I * <w_i, x_i>.
inline double score(const JointModel& m, const FeatureVector& f, double s, double i, double gamma) {
  if (f.salience.size() != m.omega_s.size() || f.informativeness.size() != m.omega_i.size()) {
    throw Error("score: feature dimensions do not match the model");
  }
  return s * dot(m.omega_s, f.salience) + gamma * i * dot(m.omega_i, f.informativeness);
}

/// Scores with the coefficients of the model's mode.
inline double score(const JointModel& m, const FeatureVector& f, BlockScale scale) {
  return score(m, f, scale.salience, scale.informativeness, 1.0);
}

/// One (event, day) worth of training entities with their soft labels and
/// the adaptive coefficients of that query.
struct TrainingGroup {
  std::string event_id;
  Day day;
  double s_score = 1.0;
  double i_score = 1.0;
  double gamma = 1.0;
  std::vector<FeatureVector> entities;
  std::vector<double> labels;
};

inline std::vector<PairConstraint> build_constraints(const std::vector<TrainingGroup>& groups, RankMode mode,
                                                     double margin) {
  std::vector<PairConstraint> pairs;
  for (const auto& g : groups) {
    if (g.entities.size() != g.labels.size()) throw Error("training group needs one label per entity");
    auto scale = block_scale(mode, g.s_score, g.i_score, g.gamma);
    for (const auto& pr : build_pairs(g.labels, margin)) {
      pairs.push_back(transform_pair(g.entities[pr.preferred], g.entities[pr.other], scale));
    }
  }
  return pairs;
}

/// Builds pairs from the groups and trains a model. The caller supplies the
/// adaptation model already fitted on the training queries and the groups'
/// adaptive scores computed from it.
inline JointModel fit_joint_model(const std::vector<TrainingGroup>& groups, RankMode mode,
                                  const AdaptationModel& adaptation, const DecayParams& decay_params,
                                  const TrainParams& params, double margin) {
  auto pairs = build_constraints(groups, mode, margin);
  auto result = train(pairs, params);
  JointModel m;
  m.mode = mode;
  m.salience_names = salience_feature_names();
  m.informativeness_names = informativeness_feature_names();
  std::size_t ms = pairs.front().salience_dim;
  if (ms != m.salience_names.size() || result.weights.size() - ms != m.informativeness_names.size()) {
    // Synthetic feature sets (tests, experiments) carry generic names.
    m.salience_names.clear();
    m.informativeness_names.clear();
    for (std::size_t d = 0; d < ms; ++d) m.salience_names.push_back("s" + std::to_string(d));
    for (std::size_t d = ms; d < result.weights.size(); ++d) m.informativeness_names.push_back("i" + std::to_string(d - ms));
  }
  m.omega_s.assign(result.weights.begin(), result.weights.begin() + static_cast<std::ptrdiff_t>(ms));
  m.omega_i.assign(result.weights.begin() + static_cast<std::ptrdiff_t>(ms), result.weights.end());
  m.adaptation = adaptation;
  m.decay = decay_params;
  m.train = params;
  m.pair_margin = margin;
  m.pair_count = pairs.size();
  m.objective = result.objective;
  m.violations = result.violations;
  return m;
}

inline nlohmann::json model_to_json(const JointModel& m) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["mode"] = to_string(m.mode);
  j["feature_names"] = {{"salience", m.salience_names}, {"informativeness", m.informativeness_names}};
  j["normalization"] = "quantile";
  j["omega_s"] = m.omega_s;
  j["omega_i"] = m.omega_i;
  j["adaptation"] = adaptation_to_json(m.adaptation);
  j["decay"] = {{"alpha", m.decay.alpha}, {"lambda", m.decay.lambda}, {"mu_days", m.decay.mu_days}};
  j["hyperparams"] = {{"c", m.train.c},
                      {"epochs", m.train.epochs},
                      {"seed", m.train.seed},
                      {"tolerance", m.train.tolerance},
                      {"solver", to_string(m.train.solver)},
                      {"pair_margin", m.pair_margin}};
  j["training"] = {{"pairs", m.pair_count}, {"objective", m.objective}, {"violations", m.violations}};
  return j;
}

inline JointModel model_from_json(const nlohmann::json& j) {
  if (j.value("format_version", 0) != kModelFormatVersion) throw Error("unsupported model format version");
  JointModel m;
  m.mode = parse_rank_mode(j.at("mode").get<std::string>());
  m.salience_names = j.at("feature_names").at("salience").get<std::vector<std::string>>();
  m.informativeness_names = j.at("feature_names").at("informativeness").get<std::vector<std::string>>();
  m.omega_s = j.at("omega_s").get<std::vector<double>>();
  m.omega_i = j.at("omega_i").get<std::vector<double>>();
  if (m.omega_s.size() != m.salience_names.size() || m.omega_i.size() != m.informativeness_names.size()) {
    throw Error("model weights do not match feature names");
  }
  m.adaptation = adaptation_from_json(j.at("adaptation"));
  m.decay.alpha = j.at("decay").at("alpha").get<double>();
  m.decay.lambda = j.at("decay").at("lambda").get<double>();
  m.decay.mu_days = j.at("decay").at("mu_days").get<double>();
  const auto& h = j.at("hyperparams");
  m.train.c = h.at("c").get<double>();
  m.train.epochs = h.at("epochs").get<int>();
  m.train.seed = h.at("seed").get<std::uint64_t>();
  m.train.tolerance = h.at("tolerance").get<double>();
  m.train.solver = parse_solver(h.at("solver").get<std::string>());
  m.pair_margin = h.at("pair_margin").get<double>();
  m.pair_count = j.at("training").at("pairs").get<std::size_t>();
  m.objective = j.at("training").at("objective").get<double>();
  m.violations = j.at("training").at("violations").get<std::size_t>();
  return m;
}

}  // namespace entl
