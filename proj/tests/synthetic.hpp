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


// Synthetic learning problems and reference solvers shared by the learner
// tests and the acceptance checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entl/learner.hpp"
#include "entl/timeline.hpp"

namespace entl::testing {

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t dim, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> w(dim);
  for (auto& x : w) x = u(rng);
  return w;
}

/// Groups of entities with uniform features and labels w_true . [x_s; x_i]
/// plus Gaussian noise.
inline std::vector<TrainingGroup> random_groups(std::mt19937_64& rng, int n_groups, std::size_t ms, std::size_t ni,
                                                const std::vector<double>& w_true, double noise,
                                                int min_entities = 6, int max_entities = 10) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<TrainingGroup> out;
  for (int k = 0; k < n_groups; ++k) {
    TrainingGroup grp;
    grp.event_id = "g" + std::to_string(k);
    grp.day = Day::from_ymd(2013, 4, 1) + k;
    int n = std::uniform_int_distribution<int>(min_entities, max_entities)(rng);
    for (int e = 0; e < n; ++e) {
      FeatureVector f;
      f.entity_key = "e" + std::to_string(e);
      f.event_id = grp.event_id;
      f.day = grp.day;
      double label = 0;
      for (std::size_t d = 0; d < ms; ++d) {
        f.salience.push_back(u(rng));
        label += w_true[d] * f.salience.back();
      }
      for (std::size_t d = 0; d < ni; ++d) {
        f.informativeness.push_back(u(rng));
        label += w_true[ms + d] * f.informativeness.back();
      }
      grp.entities.push_back(std::move(f));
      grp.labels.push_back(label + noise * g(rng));
    }
    out.push_back(std::move(grp));
  }
  return out;
}

/// Plain pairwise SVM without bias on raw concatenated features. Pairs are
/// enumerated here from the labels; the dual box QP
///   min 1/2 a'ZZ'a - 1'a,  0 <= a <= c
/// is solved by accelerated projected gradient and w = Z'a.
inline Eigen::VectorXd oracle_pairwise_svm(const std::vector<TrainingGroup>& groups, double margin, double c,
                                           int iterations = 20000) {
  std::vector<Eigen::VectorXd> rows;
  for (const auto& g : groups) {
    for (std::size_t a = 0; a < g.entities.size(); ++a) {
      for (std::size_t b = 0; b < g.entities.size(); ++b) {
        if (a == b || g.labels[a] - g.labels[b] < margin) continue;
        const auto& x = g.entities[a];
        const auto& y = g.entities[b];
        Eigen::VectorXd z(static_cast<Eigen::Index>(x.salience.size() + x.informativeness.size()));
        Eigen::Index k = 0;
        for (std::size_t d = 0; d < x.salience.size(); ++d) z(k++) = x.salience[d] - y.salience[d];
        for (std::size_t d = 0; d < x.informativeness.size(); ++d) z(k++) = x.informativeness[d] - y.informativeness[d];
        rows.push_back(std::move(z));
      }
    }
  }
  Eigen::MatrixXd z(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) z.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(z);
  double lipschitz = svd.singularValues()(0) * svd.singularValues()(0);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(z.rows()), y = a, prev = a;
  double t = 1;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd grad = z * (z.transpose() * y) - Eigen::VectorXd::Ones(z.rows());
    a = (y - grad / lipschitz).cwiseMax(0.0).cwiseMin(c);
    double t_next = (1 + std::sqrt(1 + 4 * t * t)) / 2;
    y = a + ((t - 1) / t_next) * (a - prev);
    prev = a;
    t = t_next;
  }
  return z.transpose() * a;
}

/// Kendall tau-a over the within-group entity pairs of two score functions.
template <typename ScoreA, typename ScoreB>
double kendall_tau(const std::vector<TrainingGroup>& groups, ScoreA fa, ScoreB fb) {
  double concordant = 0, discordant = 0, total = 0;
  for (const auto& g : groups) {
    for (std::size_t a = 0; a < g.entities.size(); ++a) {
      for (std::size_t b = a + 1; b < g.entities.size(); ++b) {
        double da = fa(g.entities[a]) - fa(g.entities[b]);
        double db = fb(g.entities[a]) - fb(g.entities[b]);
        total += 1;
        if (da * db > 0) concordant += 1;
        if (da * db < 0) discordant += 1;
      }
    }
  }
  return total == 0 ? 1.0 : (concordant - discordant) / total;
}

inline double linear_score(const std::vector<double>& w, const FeatureVector& f) {
  double s = 0;
  std::size_t k = 0;
  for (double x : f.salience) s += w[k++] * x;
  for (double x : f.informativeness) s += w[k++] * x;
  return s;
}

// Two event families. Family "S" has labels driven by salience features,
// family "I" by informativeness features. Per day, the entity features
// scatter around a base vector; a family's base sits on the common centre in
// its own aspect space and on a shell of radius `shell` per dimension
// (random signs) in the other one, so only the relevant aspect looks typical.

struct WorldDay {
  std::string event_id;
  char family = 'S';
  Day day;
  std::optional<long> gap;
  std::vector<FeatureVector> entities;
  std::vector<double> labels;
};

struct WorldParams {
  int events_per_family = 8;
  int days = 4;
  int entities = 15;
  std::size_t ms = 26;
  std::size_t ni = 11;
  double spread = 0.1;  // entity scatter around the day base
  double shell = 0.25;  // per-dimension offset of the atypical aspect
  double jitter = 0.02;
  double label_noise = 0.05;
};

inline std::vector<WorldDay> two_family_world(std::uint64_t seed, const WorldParams& p = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  auto w_s = random_weights(rng, p.ms), w_i = random_weights(rng, p.ni);
  auto base = [&](std::size_t dim, bool typical) {
    std::vector<double> b(dim);
    for (auto& x : b) x = 0.5 + (typical ? p.jitter * u(rng) : (rng() % 2 ? p.shell : -p.shell));
    return b;
  };
  std::vector<WorldDay> out;
  for (char fam : {'S', 'I'}) {
    for (int e = 0; e < p.events_per_family; ++e) {
      for (int d = 0; d < p.days; ++d) {
        WorldDay wd;
        wd.family = fam;
        wd.event_id = std::string(1, fam) + std::to_string(e);
        wd.day = Day::from_ymd(2013, 4, 1) + d;
        if (d > 0) wd.gap = 1;
        auto bs = base(p.ms, fam == 'S'), bi = base(p.ni, fam == 'I');
        std::vector<double> raw;
        for (int k = 0; k < p.entities; ++k) {
          FeatureVector f;
          f.entity_key = "ent" + std::to_string(k);
          f.event_id = wd.event_id;
          f.day = wd.day;
          for (double b : bs) f.salience.push_back(std::clamp(b + p.spread * u(rng), 0.0, 1.0));
          for (double b : bi) f.informativeness.push_back(std::clamp(b + p.spread * u(rng), 0.0, 1.0));
          double r = 0;
          if (fam == 'S') {
            for (std::size_t k2 = 0; k2 < p.ms; ++k2) r += w_s[k2] * f.salience[k2];
          } else {
            for (std::size_t k2 = 0; k2 < p.ni; ++k2) r += w_i[k2] * f.informativeness[k2];
          }
          raw.push_back(r);
          wd.entities.push_back(std::move(f));
        }
        // Standardize per day so every day yields a similar number of pairs.
        double mean = 0, var = 0;
        for (double r : raw) mean += r;
        mean /= static_cast<double>(raw.size());
        for (double r : raw) var += (r - mean) * (r - mean);
        double sd = std::sqrt(var / static_cast<double>(raw.size()));
        for (double r : raw) wd.labels.push_back(2.0 * (r - mean) / sd + p.label_noise * g(rng));
        out.push_back(std::move(wd));
      }
    }
  }
  return out;
}

/// First half of each family's events trains, the second half tests.
inline bool is_training_day(const WorldDay& d, const WorldParams& p = {}) {
  return std::stoi(d.event_id.substr(1)) < p.events_per_family / 2;
}

/// Top `fraction` of each day's entities by label get grade 4, the rest 1.
inline Judgments world_judgments(const std::vector<WorldDay>& days, double fraction = 0.3) {
  Judgments j;
  for (const auto& d : days) {
    std::vector<std::size_t> order(d.labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d.labels[a] > d.labels[b]; });
    auto top = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(order.size())));
    for (std::size_t r = 0; r < order.size(); ++r) j.add(d.event_id, d.day, d.entities[order[r]].entity_key, r < top ? 4 : 1);
  }
  return j;
}

/// Trains each mode on the training half and returns test MAP per mode.
inline std::map<RankMode, double> world_map(const std::vector<WorldDay>& days, const WorldParams& p = {},
                                            const TrainParams& train = {}, double margin = 0.5) {
  std::vector<QueryFeature> queries;
  for (const auto& d : days) {
    if (is_training_day(d, p)) queries.push_back(query_features(d.entities));
  }
  auto adaptation = fit_adaptation(queries);
  DecayParams decay_params;
  auto judgments = world_judgments(days);
  std::map<RankMode, double> out;
  for (auto mode : {RankMode::kAdaptER, RankMode::kNoAdapt, RankMode::kSalienceOnly, RankMode::kInformativenessOnly}) {
    std::vector<TrainingGroup> groups;
    for (const auto& d : days) {
      if (!is_training_day(d, p)) continue;
      auto q = query_features(d.entities);
      TrainingGroup g;
      g.event_id = d.event_id;
      g.day = d.day;
      g.s_score = adaptive_score(q, adaptation, Aspect::kSalience);
      g.i_score = adaptive_score(q, adaptation, Aspect::kInformativeness);
      g.gamma = d.gap ? decay(*d.gap, decay_params) : 1.0;
      g.entities = d.entities;
      g.labels = d.labels;
      groups.push_back(std::move(g));
    }
    auto model = fit_joint_model(groups, mode, adaptation, decay_params, train, margin);
    std::map<std::string, EntityTimeline> timelines;
    for (const auto& d : days) {
      if (is_training_day(d, p)) continue;
      auto& tl = timelines[d.event_id];
      tl.event_id = d.event_id;
      tl.days.push_back(rank_day(d.event_id, d.day, model, d.entities, d.gap));
    }
    std::vector<EntityTimeline> list;
    for (auto& [_, tl] : timelines) list.push_back(std::move(tl));
    out[mode] = evaluate(to_string(mode), list, judgments).map;
  }
  return out;
}

}  // namespace entl::testing
