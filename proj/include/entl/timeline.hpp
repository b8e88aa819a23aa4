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

// Per-day entity ranking, timeline assembly and ranking metrics.

#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "entl/adapt.hpp"
#include "entl/common.hpp"
#include "entl/coref.hpp"
#include "entl/features.hpp"
#include "entl/learner.hpp"

namespace entl {

struct RankedEntity {
  std::string key;
  double score = 0.0;
  std::string sentence;
  std::string doc_id;
};

struct RankedDay {
  std::string event_id;
  Day day;
  double s_score = 1.0;
  double i_score = 1.0;
  double gamma = 1.0;
  std::vector<RankedEntity> entities;

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& e : entities) out.push_back(e.key);
    return out;
  }
};

struct Support {
  std::string sentence;
  std::string doc_id;
};

/// For each cluster, the longest context sentence from its highest-scoring
/// source document (first such context in cluster order on ties).
inline std::map<std::string, Support> supporting_contexts(const std::vector<EntityCluster>& clusters) {
  std::map<std::string, Support> out;
  for (const auto& c : clusters) {
    const ContextRef* best = nullptr;
    for (const auto& x : c.contexts) {
      if (!best || x.doc_score > best->doc_score ||
          (x.doc_score == best->doc_score && x.text.size() > best->text.size())) {
        best = &x;
      }
    }
    if (best) out[c.entity_key] = {best->text, best->doc_id};
  }
  return out;
}

/// Adaptive coefficients for one (event, day). `gap_days` is empty on the
/// first day of the reporting timeline, where gamma is 1.
inline BlockScale day_scale(const JointModel& model, const std::vector<FeatureVector>& features,
                            std::optional<long> gap_days, double* s_out = nullptr, double* i_out = nullptr,
                            double* gamma_out = nullptr) {
  double s = 1, i = 1, gamma = 1;
  if (model.mode == RankMode::kAdaptER && !features.empty()) {
    auto q = query_features(features);
    s = adaptive_score(q, model.adaptation, Aspect::kSalience);
    i = adaptive_score(q, model.adaptation, Aspect::kInformativeness);
    if (gap_days) gamma = decay(*gap_days, model.decay);
  }
  if (s_out) *s_out = s;
  if (i_out) *i_out = i;
  if (gamma_out) *gamma_out = gamma;
  return block_scale(model.mode, s, i, gamma);
}

/// Scores every entity of the day, sorts by descending score with ties
/// broken by ascending key, and keeps the top k (k = 0 keeps all).
inline RankedDay rank_day(const std::string& event_id, Day day, const JointModel& model,
                          const std::vector<FeatureVector>& features, std::optional<long> gap_days,
                          const std::map<std::string, Support>& supports = {}, std::size_t k = 0) {
  RankedDay out;
  out.event_id = event_id;
  out.day = day;
  if (features.empty()) return out;
  auto scale = day_scale(model, features, gap_days, &out.s_score, &out.i_score, &out.gamma);
  std::set<std::string> seen;
  for (const auto& f : features) {
    if (!seen.insert(f.entity_key).second) throw Error("rank_day: duplicate entity key " + f.entity_key);
    RankedEntity e;
    e.key = f.entity_key;
    e.score = score(model, f, scale);
    if (auto it = supports.find(f.entity_key); it != supports.end()) {
      e.sentence = it->second.sentence;
      e.doc_id = it->second.doc_id;
    }
    out.entities.push_back(std::move(e));
  }
  std::sort(out.entities.begin(), out.entities.end(), [](const RankedEntity& a, const RankedEntity& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.key < b.key;
  });
  if (k > 0 && out.entities.size() > k) out.entities.resize(k);
  return out;
}

// ---------------------------------------------------------------------------
// Judgments and metrics

/// Grades of one (event, day) by entity key. Missing keys are unjudged.
using Grades = std::map<std::string, int>;

class Judgments {
 public:
  void add(const std::string& event_id, Day day, const std::string& key, int grade) {
    if (grade < 1 || grade > 4) throw Error("judgment grade must be in 1..4");
    by_query_[{event_id, day}][key] = grade;
  }

  const Grades& grades(const std::string& event_id, Day day) const {
    static const Grades kEmpty;
    auto it = by_query_.find({event_id, day});
    return it == by_query_.end() ? kEmpty : it->second;
  }

  bool empty() const { return by_query_.empty(); }

 private:
  std::map<std::pair<std::string, Day>, Grades> by_query_;
};

/// entity_key<TAB>event_id<TAB>day<TAB>grade
inline Judgments load_judgments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open judgments file: " + path);
  Judgments j;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string key, ev, day, grade;
    if (!std::getline(ss, key, '\t') || !std::getline(ss, ev, '\t') || !std::getline(ss, day, '\t') ||
        !std::getline(ss, grade)) {
      throw Error(path + ":" + std::to_string(lineno) + ": expected entity_key<TAB>event_id<TAB>day<TAB>grade");
    }
    try {
      j.add(ev, Day::parse(day), key, std::stoi(grade));
    } catch (const std::exception& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return j;
}

namespace detail {

inline int grade_of(const Grades& g, const std::string& key) {
  auto it = g.find(key);
  return it == g.end() ? 0 : it->second;
}

inline void check_k(std::size_t k) {
  if (k < 1) throw Error("metric cutoff k must be >= 1");
}

}  // namespace detail

inline constexpr int kDefaultRelevanceThreshold = 3;

/// Relevant items among the first k, divided by k.
inline double precision_at_k(const std::vector<std::string>& ranked, const Grades& grades, std::size_t k,
                             int threshold = kDefaultRelevanceThreshold) {
  detail::check_k(k);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    if (detail::grade_of(grades, ranked[i]) >= threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

/// Mean of the precision at each relevant position, over all relevant
/// judged items. No relevant judgments gives 0.
inline double average_precision(const std::vector<std::string>& ranked, const Grades& grades,
                                int threshold = kDefaultRelevanceThreshold) {
  std::size_t total = 0;
  for (const auto& [_, g] : grades) {
    if (g >= threshold) ++total;
  }
  if (total == 0) return 0.0;
  double sum = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (detail::grade_of(grades, ranked[i]) >= threshold) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total);
}

inline double ndcg_gain(int grade) { return grade <= 0 ? 0.0 : std::pow(2.0, grade - 1) - 1.0; }

/// DCG@k over the ideal DCG@k of the judged grades. Zero ideal gives 0.
inline double ndcg(const std::vector<std::string>& ranked, const Grades& grades, std::size_t k) {
  detail::check_k(k);
  double dcg = 0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    dcg += ndcg_gain(detail::grade_of(grades, ranked[i])) / std::log2(static_cast<double>(i) + 2.0);
  }
  std::vector<int> ideal;
  for (const auto& [_, g] : grades) ideal.push_back(g);
  std::sort(ideal.rbegin(), ideal.rend());
  double idcg = 0;
  for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
    idcg += ndcg_gain(ideal[i]) / std::log2(static_cast<double>(i) + 2.0);
  }
  return idcg > 0 ? dcg / idcg : 0.0;
}

/// Fraction of relevant entities among the top-k entities that were absent
/// from the previous reporting day. No such entity gives 0.
inline double srdp(const std::vector<std::string>& ranked, const Grades& grades,
                   const std::set<std::string>& previous, std::size_t k,
                   int threshold = kDefaultRelevanceThreshold) {
  detail::check_k(k);
  std::size_t unexpected = 0, hits = 0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    if (previous.count(ranked[i])) continue;
    ++unexpected;
    if (detail::grade_of(grades, ranked[i]) >= threshold) ++hits;
  }
  return unexpected == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(unexpected);
}

struct MetricRow {
  std::string system;
  double p1 = 0, p3 = 0, p10 = 0, map = 0, ndcg10 = 0, srdp1 = 0, srdp3 = 0, srdp10 = 0;
  std::size_t queries = 0;
};

struct EntityTimeline {
  std::string event_id;
  std::vector<RankedDay> days;  // in reporting order
};

/// Averages every metric over the (event, day) queries of the timelines.
/// The previous-day set for SRDP is the full ranked list of the preceding
/// timeline entry.
inline MetricRow evaluate(const std::string& system, const std::vector<EntityTimeline>& timelines,
                          const Judgments& judgments, int threshold = kDefaultRelevanceThreshold) {
  MetricRow r;
  r.system = system;
  for (const auto& tl : timelines) {
    std::set<std::string> previous;
    for (const auto& day : tl.days) {
      const auto& g = judgments.grades(tl.event_id, day.day);
      auto keys = day.keys();
      r.p1 += precision_at_k(keys, g, 1, threshold);
      r.p3 += precision_at_k(keys, g, 3, threshold);
      r.p10 += precision_at_k(keys, g, 10, threshold);
      r.map += average_precision(keys, g, threshold);
      r.ndcg10 += ndcg(keys, g, 10);
      r.srdp1 += srdp(keys, g, previous, 1, threshold);
      r.srdp3 += srdp(keys, g, previous, 3, threshold);
      r.srdp10 += srdp(keys, g, previous, 10, threshold);
      ++r.queries;
      previous = std::set<std::string>(keys.begin(), keys.end());
    }
  }
  if (r.queries > 0) {
    double n = static_cast<double>(r.queries);
    for (double* v : {&r.p1, &r.p3, &r.p10, &r.map, &r.ndcg10, &r.srdp1, &r.srdp3, &r.srdp10}) *v /= n;
  }
  return r;
}

inline void write_metric_table(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << "system\tP@1\tP@3\tP@10\tMAP\tNDCG@10\tSRDP@1\tSRDP@3\tSRDP@10\n";
  char buf[32];
  for (const auto& r : rows) {
    out << r.system;
    for (double v : {r.p1, r.p3, r.p10, r.map, r.ndcg10, r.srdp1, r.srdp3, r.srdp10}) {
      std::snprintf(buf, sizeof buf, "\t%.4f", v);
      out << buf;
    }
    out << '\n';
  }
}

inline nlohmann::json timeline_to_json(const EntityTimeline& tl) {
  nlohmann::json days = nlohmann::json::array();
  for (const auto& d : tl.days) {
    nlohmann::json ents = nlohmann::json::array();
    for (const auto& e : d.entities) {
      ents.push_back({{"key", e.key}, {"score", e.score}, {"sentence", e.sentence}, {"doc_id", e.doc_id}});
    }
    days.push_back({{"day", d.day.str()}, {"entities", ents}});
  }
  return {{"event_id", tl.event_id}, {"days", days}};
}

inline EntityTimeline timeline_from_json(const nlohmann::json& j) {
  EntityTimeline tl;
  tl.event_id = j.at("event_id").get<std::string>();
  for (const auto& d : j.at("days")) {
    RankedDay rd;
    rd.event_id = tl.event_id;
    rd.day = Day::parse(d.at("day").get<std::string>());
    for (const auto& e : d.at("entities")) {
      rd.entities.push_back({e.at("key").get<std::string>(), e.at("score").get<double>(),
                             e.at("sentence").get<std::string>(), e.at("doc_id").get<std::string>()});
    }
    tl.days.push_back(std::move(rd));
  }
  return tl;
}

/// Structural check of a timeline JSON document. Returns a list of problems
/// (empty when valid).
inline std::vector<std::string> validate_timeline_json(const nlohmann::json& j) {
  std::vector<std::string> errs;
  auto need = [&](const nlohmann::json& o, const char* field, auto pred, const std::string& where) {
    if (!o.is_object() || !o.contains(field)) {
      errs.push_back(where + ": missing '" + field + "'");
      return false;
    }
    if (!pred(o.at(field))) {
      errs.push_back(where + ": bad type for '" + field + "'");
      return false;
    }
    return true;
  };
  auto is_str = [](const nlohmann::json& v) { return v.is_string(); };
  auto is_arr = [](const nlohmann::json& v) { return v.is_array(); };
  auto is_num = [](const nlohmann::json& v) { return v.is_number(); };
  if (!j.is_object()) return {"timeline must be an object"};
  need(j, "event_id", is_str, "timeline");
  if (!need(j, "days", is_arr, "timeline")) return errs;
  for (std::size_t d = 0; d < j["days"].size(); ++d) {
    const auto& day = j["days"][d];
    std::string where = "days[" + std::to_string(d) + "]";
    if (need(day, "day", is_str, where)) {
      try {
        Day::parse(day["day"].get<std::string>());
      } catch (const std::exception&) {
        errs.push_back(where + ": unparseable day");
      }
    }
    if (!need(day, "entities", is_arr, where)) continue;
    std::set<std::string> keys;
    double last = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < day["entities"].size(); ++e) {
      const auto& ent = day["entities"][e];
      std::string ew = where + ".entities[" + std::to_string(e) + "]";
      need(ent, "sentence", is_str, ew);
      need(ent, "doc_id", is_str, ew);
      if (need(ent, "key", is_str, ew) && !keys.insert(ent["key"].get<std::string>()).second) {
        errs.push_back(ew + ": duplicate key");
      }
      if (need(ent, "score", is_num, ew)) {
        double s = ent["score"].get<double>();
        if (s > last) errs.push_back(ew + ": scores not non-increasing");
        last = s;
      }
    }
  }
  return errs;
}

}  // namespace entl
