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

// Pipeline stages. Every stage reads the artifacts of earlier stages from
// the work directory and writes its own:
//
//   ingest    corpus.jsonl, events.json, ingest_report.json
//   index     index/<day>.json, docsets.json, reporting.json
//   coref     clusters.jsonl
//   features  features.tsv
//   label     labels.tsv
//   train     model.json
//   rank      timelines.json
//   eval      metrics.tsv

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entl/adapt.hpp"
#include "entl/common.hpp"
#include "entl/coref.hpp"
#include "entl/corpus.hpp"
#include "entl/dayindex.hpp"
#include "entl/features.hpp"
#include "entl/learner.hpp"
#include "entl/softlabel.hpp"
#include "entl/timeline.hpp"
#include "entl/topics.hpp"

namespace entl {

inline constexpr int kArtifactFormatVersion = 1;

/// Failure of one stage. The CLI reports the stage name with the message.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what) : Error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineConfig {
  // Inputs.
  std::string corpus;
  std::string events;
  std::string pageviews;
  std::string links;
  std::string judgments;
  std::string stopwords;
  std::string news_terms;
  std::string attitude_terms;
  std::string sentiment_terms;
  // Outputs.
  std::string work_dir = "entl-work";
  std::string model;   // default <work_dir>/model.json
  std::string output;  // default <work_dir>/timelines.json

  // Retrieval.
  int docs_per_day = 10;
  int expand_terms = 30;
  double expand_max_weight = 0.5;
  double bm25_k1 = 1.2;
  double bm25_b = 0.75;
  // Coreference.
  int lsh_hashes = 64;
  int lsh_bands = 16;
  int lsh_rows = 4;
  double lsh_threshold = 0.6;
  // Features.
  int topics = 20;
  int lda_iterations = 200;
  double dirichlet_mu = 100.0;
  // Soft labels.
  int vor_window = 10;
  double vor_min_median = 12.0;
  // Adaptation and learning.
  int components = 1;
  double decay_alpha = 0.5;
  double decay_lambda = 2.0;
  double decay_mu = 1.0;
  double c = 20.0;
  int epochs = 2000;
  double tolerance = 1e-5;
  std::string solver = "dual-cd";
  double pair_margin = 0.5;
  // Ranking and evaluation.
  int topk = 10;
  int relevance_threshold = 3;
  std::string mode = "AdaptER";
  std::string train_events;  // comma separated; empty = every event with labels
  std::string test_events;   // comma separated; empty = every event

  std::uint64_t seed = 42;
  int jobs = 1;

  std::filesystem::path work() const { return work_dir; }
  std::filesystem::path model_path() const { return model.empty() ? work() / "model.json" : std::filesystem::path(model); }
  std::filesystem::path output_path() const { return output.empty() ? work() / "timelines.json" : std::filesystem::path(output); }

  /// Every violated constraint, one message per field.
  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    auto check = [&](bool ok, const char* field, const char* rule) {
      if (!ok) v.push_back(std::string(field) + ": " + rule);
    };
    check(docs_per_day >= 1, "docs_per_day", "must be >= 1");
    check(expand_terms >= 0, "expand_terms", "must be >= 0");
    check(expand_max_weight > 0, "expand_max_weight", "must be positive");
    check(bm25_k1 >= 0, "bm25_k1", "must be >= 0");
    check(bm25_b >= 0 && bm25_b <= 1, "bm25_b", "must be in [0, 1]");
    check(lsh_hashes >= 1, "lsh_hashes", "must be >= 1");
    check(lsh_bands >= 1 && lsh_rows >= 1 && lsh_bands * lsh_rows <= lsh_hashes, "lsh_bands",
          "bands * rows must be positive and at most lsh_hashes");
    check(lsh_threshold > 0 && lsh_threshold <= 1, "lsh_threshold", "must be in (0, 1]");
    check(topics >= 1, "topics", "must be >= 1");
    check(lda_iterations >= 1, "lda_iterations", "must be >= 1");
    check(dirichlet_mu > 0, "dirichlet_mu", "must be positive");
    check(vor_window >= 1, "vor_window", "must be >= 1");
    check(vor_min_median > 0, "vor_min_median", "must be positive");
    check(components >= 1, "components", "must be >= 1");
    check(decay_alpha > 0 && decay_alpha < 1, "decay_alpha", "must be in (0, 1)");
    check(decay_lambda > 0, "decay_lambda", "must be positive");
    check(decay_mu > 0, "decay_mu", "must be positive");
    check(c > 0, "c", "must be positive");
    check(epochs >= 1, "epochs", "must be >= 1");
    check(tolerance >= 0, "tolerance", "must be >= 0");
    check(solver == "pegasos" || solver == "dual-cd", "solver", "must be pegasos or dual-cd");
    check(pair_margin > 0, "pair_margin", "must be positive");
    check(topk >= 1, "topk", "must be >= 1");
    check(relevance_threshold >= 1 && relevance_threshold <= 4, "relevance_threshold", "must be in 1..4");
    check(jobs >= 1, "jobs", "must be >= 1");
    try {
      parse_rank_mode(mode);
    } catch (const Error&) {
      v.push_back("mode: must be AdaptER, No-Adapt, SAL or INF");
    }
    return v;
  }

  void validate() const {
    auto v = violations();
    if (v.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& s : v) msg += "\n  " + s;
    throw Error(msg);
  }

  LshParams lsh() const { return {lsh_hashes, lsh_bands, lsh_rows, lsh_threshold, seed}; }
  DecayParams decay_params() const { return {decay_alpha, decay_lambda, decay_mu}; }
  TrainParams train_params() const { return {c, epochs, seed, tolerance, parse_solver(solver)}; }
  Bm25Params bm25() const { return {bm25_k1, bm25_b}; }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = std::string(trim(item));
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

inline std::filesystem::path need_artifact(const PipelineConfig& cfg, const std::string& stage,
                                           const std::filesystem::path& file, const std::string& producer) {
  auto p = file.is_absolute() ? file : cfg.work() / file;
  if (!std::filesystem::exists(p)) {
    throw StageError(stage, "missing artifact " + p.string() + " (run '" + producer + "' first)");
  }
  return p;
}

inline std::filesystem::path need_input(const std::string& stage, const std::string& path, const char* key) {
  if (path.empty()) throw StageError(stage, std::string("no input configured for '") + key + "'");
  if (!std::filesystem::exists(path)) throw StageError(stage, "input file not found: " + path);
  return path;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

inline std::string dump(const nlohmann::json& j) { return j.dump(1) + "\n"; }

inline nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(p.string() + ": malformed JSON: " + e.what());
  }
}

inline void check_version(const nlohmann::json& j, const std::filesystem::path& p) {
  if (j.value("format_version", 0) != kArtifactFormatVersion) {
    throw Error(p.string() + ": unsupported artifact format version");
  }
}

}  // namespace detail

/// Artifacts loaded back from the work directory.
struct Workspace {
  std::vector<Document> documents;
  DocLookup lookup;
  std::vector<Event> events;
  std::vector<ReportingTimeline> reporting;
  /// (event_id, day) -> docset and expanded query.
  std::map<std::pair<std::string, Day>, EventDocSet> docsets;
  std::map<std::pair<std::string, Day>, WeightedQuery> expanded;
  std::map<std::pair<std::string, Day>, std::vector<EntityCluster>> clusters;
  std::map<std::pair<std::string, Day>, std::vector<FeatureVector>> features;

  const Event& event(const std::string& id) const {
    for (const auto& e : events) {
      if (e.event_id == id) return e;
    }
    throw Error("unknown event " + id);
  }
};

inline TermSet load_terms_or(const std::string& path, const TermSet& fallback) {
  return path.empty() ? fallback : TermSet::load(path);
}

inline TermSet config_stopwords(const PipelineConfig& cfg) {
  return load_terms_or(cfg.stopwords, default_stopwords());
}

namespace detail {

inline void load_documents(const PipelineConfig& cfg, const std::string& stage, Workspace& ws) {
  auto p = need_artifact(cfg, stage, "corpus.jsonl", "ingest");
  ws.documents = load_corpus(p.string(), nullptr, config_stopwords(cfg));
  ws.lookup.clear();
  for (const auto& d : ws.documents) ws.lookup[d.doc_id] = &d;
  auto ep = need_artifact(cfg, stage, "events.json", "ingest");
  ws.events = load_events(ep.string());
}

inline void load_docsets(const PipelineConfig& cfg, const std::string& stage, Workspace& ws) {
  auto p = need_artifact(cfg, stage, "docsets.json", "index");
  auto j = read_json(p);
  check_version(j, p);
  for (const auto& e : j.at("docsets")) {
    auto ds = docset_from_json(e.at("docset"));
    WeightedQuery q;
    for (const auto& t : e.at("expanded_query")) q.emplace_back(t.at(0).get<std::string>(), t.at(1).get<double>());
    ws.expanded[{ds.event_id, ds.day}] = std::move(q);
    ws.docsets[{ds.event_id, ds.day}] = std::move(ds);
  }
  auto rp = need_artifact(cfg, stage, "reporting.json", "index");
  auto r = read_json(rp);
  check_version(r, rp);
  ws.reporting.clear();
  for (const auto& t : r.at("timelines")) {
    ReportingTimeline tl;
    tl.event_id = t.at("event_id").get<std::string>();
    for (const auto& d : t.at("days")) tl.days.push_back(Day::parse(d.get<std::string>()));
    ws.reporting.push_back(std::move(tl));
  }
}

inline void load_clusters(const PipelineConfig& cfg, const std::string& stage, Workspace& ws) {
  auto p = need_artifact(cfg, stage, "clusters.jsonl", "coref");
  std::ifstream in(p);
  std::string line;
  ws.clusters.clear();
  for (const auto& [key, _] : ws.docsets) ws.clusters[key];
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line);
    auto c = cluster_from_json(j, ws.lookup);
    ws.clusters[{j.at("event_id").get<std::string>(), c.day}].push_back(std::move(c));
  }
}

inline void load_features(const PipelineConfig& cfg, const std::string& stage, Workspace& ws) {
  auto p = need_artifact(cfg, stage, "features.tsv", "features");
  std::ifstream in(p);
  ws.features.clear();
  for (auto& fv : read_feature_tsv(in)) ws.features[{fv.event_id, fv.day}].push_back(std::move(fv));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stages

/// Validates and normalizes the corpus and events into the work directory.
inline LoadReport run_ingest(const PipelineConfig& cfg, std::ostream& log) {
  const std::string stage = "ingest";
  auto corpus = detail::need_input(stage, cfg.corpus, "corpus");
  auto events_path = detail::need_input(stage, cfg.events, "events");
  LoadReport report;
  std::vector<Document> docs;
  std::vector<Event> events;
  try {
    docs = load_corpus(corpus.string(), &report, config_stopwords(cfg));
    events = load_events(events_path.string());
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
  std::set<std::string> ids;
  for (const auto& d : docs) {
    if (!ids.insert(d.doc_id).second) throw StageError(stage, "duplicate doc_id " + d.doc_id);
  }
  std::string out;
  for (const auto& d : docs) out += document_to_json(d).dump() + "\n";
  detail::write_text(cfg.work() / "corpus.jsonl", out);
  detail::write_text(cfg.work() / "events.json", detail::dump(detail::read_json(events_path)));
  nlohmann::json rep = {{"format_version", kArtifactFormatVersion},
                        {"documents", report.documents},
                        {"dropped_mentions", report.dropped_mentions},
                        {"rejected_records", report.rejected_records},
                        {"warnings", report.warnings}};
  detail::write_text(cfg.work() / "ingest_report.json", detail::dump(rep));
  for (const auto& w : report.warnings) log << "warning: " << w << "\n";
  log << "ingest: " << report.documents << " documents, " << events.size() << " events, "
      << report.dropped_mentions << " mentions dropped, " << report.rejected_records << " records rejected\n";
  return report;
}

/// Builds per-day indexes, retrieves each event's documents per day with
/// one round of pseudo-relevance feedback, and derives reporting timelines.
inline void run_index(const PipelineConfig& cfg, std::ostream& log) {
  const std::string stage = "index";
  Workspace ws;
  detail::load_documents(cfg, stage, ws);
  auto stop = config_stopwords(cfg);
  std::map<Day, std::vector<const Document*>> by_day;
  for (const auto& d : ws.documents) by_day[d.date].push_back(&d);
  std::vector<Day> days;
  for (const auto& [d, _] : by_day) days.push_back(d);
  std::vector<DayIndex> indexes(days.size());
  parallel_for(days.size(), static_cast<unsigned>(cfg.jobs), [&](std::size_t i) {
    const auto& docs = by_day.at(days[i]);
    indexes[i] = build_day_index(std::span<const Document* const>(docs.data(), docs.size()), stop);
  });
  for (std::size_t i = 0; i < days.size(); ++i) {
    detail::write_text(cfg.work() / "index" / (days[i].str() + ".json"), detail::dump(day_index_to_json(indexes[i])));
  }

  struct Job {
    const Event* event;
    std::size_t day;
  };
  std::vector<Job> jobs;
  for (const auto& e : ws.events) {
    for (std::size_t i = 0; i < days.size(); ++i) {
      if (days[i] >= e.first_day && days[i] <= e.last_day) jobs.push_back({&e, i});
    }
  }
  std::vector<EventDocSet> sets(jobs.size());
  std::vector<WeightedQuery> queries(jobs.size());
  parallel_for(jobs.size(), static_cast<unsigned>(cfg.jobs), [&](std::size_t j) {
    const auto& idx = indexes[jobs[j].day];
    WeightedQuery q;
    for (const auto& t : jobs[j].event->query_terms) q.emplace_back(t, 1.0);
    auto first = bm25_retrieve(idx, q, static_cast<std::size_t>(cfg.docs_per_day), cfg.bm25());
    if (!first.documents.empty() && cfg.expand_terms > 0) {
      std::vector<const Document*> fb;
      for (const auto& [id, _] : first.documents) fb.push_back(ws.lookup.at(id));
      q = kl_expand_query(jobs[j].event->query_terms, idx, std::span<const Document* const>(fb.data(), fb.size()),
                          static_cast<std::size_t>(cfg.expand_terms), cfg.expand_max_weight, stop);
      first = bm25_retrieve(idx, q, static_cast<std::size_t>(cfg.docs_per_day), cfg.bm25());
    }
    first.event_id = jobs[j].event->event_id;
    sets[j] = std::move(first);
    queries[j] = std::move(q);
  });

  nlohmann::json out = {{"format_version", kArtifactFormatVersion}, {"docsets", nlohmann::json::array()}};
  std::map<std::string, std::map<Day, std::size_t>> per_day;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    per_day[sets[j].event_id][sets[j].day] = sets[j].documents.size();
    if (sets[j].documents.empty()) continue;
    nlohmann::json q = nlohmann::json::array();
    for (const auto& [t, w] : queries[j]) q.push_back({t, w});
    out["docsets"].push_back({{"docset", docset_to_json(sets[j])}, {"expanded_query", q}});
  }
  detail::write_text(cfg.work() / "docsets.json", detail::dump(out));

  nlohmann::json rep = {{"format_version", kArtifactFormatVersion}, {"timelines", nlohmann::json::array()}};
  for (const auto& e : ws.events) {
    auto tl = build_reporting_timeline(e, per_day[e.event_id], relevance_flags(e));
    nlohmann::json ds = nlohmann::json::array();
    for (Day d : tl.days) ds.push_back(d.str());
    rep["timelines"].push_back({{"event_id", e.event_id}, {"days", ds}});
    log << "index: event " << e.event_id << " reported on " << tl.days.size() << " days\n";
    if (tl.days.empty()) log << "warning: event " << e.event_id << " has an empty reporting timeline\n";
  }
  detail::write_text(cfg.work() / "reporting.json", detail::dump(rep));
}

/// Entity clusters for every (event, timeline day).
inline void run_coref(const PipelineConfig& cfg, std::ostream& log, std::ostream* dump_clusters = nullptr) {
  const std::string stage = "coref";
  Workspace ws;
  detail::load_documents(cfg, stage, ws);
  detail::load_docsets(cfg, stage, ws);
  std::vector<std::pair<std::string, Day>> keys;
  for (const auto& tl : ws.reporting) {
    for (Day d : tl.days) keys.emplace_back(tl.event_id, d);
  }
  std::vector<std::vector<EntityCluster>> out(keys.size());
  auto params = cfg.lsh();
  parallel_for(keys.size(), static_cast<unsigned>(cfg.jobs), [&](std::size_t i) {
    out[i] = build_entity_clusters(ws.docsets.at(keys[i]), ws.lookup, params);
  });
  std::string text;
  std::size_t n = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (const auto& c : out[i]) {
      text += cluster_to_json(c, keys[i].first).dump() + "\n";
      ++n;
      if (dump_clusters) {
        *dump_clusters << keys[i].first << '\t' << c.day.str() << '\t' << c.entity_key << '\t' << to_string(c.etype)
                       << '\t' << c.mentions.size() << " mentions\t";
        bool first = true;
        for (const auto& l : c.labels) {
          *dump_clusters << (first ? "" : " | ") << l;
          first = false;
        }
        *dump_clusters << '\n';
      }
    }
  }
  detail::write_text(cfg.work() / "clusters.jsonl", text);
  log << "coref: " << n << " clusters over " << keys.size() << " event-days\n";
}

/// Feature vectors for every entity of every (event, timeline day).
inline void run_features(const PipelineConfig& cfg, std::ostream& log) {
  const std::string stage = "features";
  Workspace ws;
  detail::load_documents(cfg, stage, ws);
  detail::load_docsets(cfg, stage, ws);
  detail::load_clusters(cfg, stage, ws);

  FeatureResources res;
  res.stopwords = config_stopwords(cfg);
  res.news_terms = load_terms_or(cfg.news_terms, default_news_terms());
  res.attitude_terms = load_terms_or(cfg.attitude_terms, default_attitude_terms());
  res.sentiment_terms = load_terms_or(cfg.sentiment_terms, default_sentiment_terms());
  res.params.dirichlet_mu = cfg.dirichlet_mu;

  std::set<std::string> used;
  for (const auto& [_, ds] : ws.docsets) {
    for (const auto& [id, s] : ds.documents) used.insert(id);
  }
  std::vector<TokenList> texts;
  for (const auto& id : used) texts.push_back(index_terms(*ws.lookup.at(id), res.stopwords));
  LdaParams lda;
  lda.topics = cfg.topics;
  lda.iterations = cfg.lda_iterations;
  lda.seed = cfg.seed;
  TopicModel topics(lda);
  topics.fit(texts);
  res.topics = &topics;

  struct Job {
    std::string event_id;
    Day day;
    std::optional<Day> prev;
  };
  std::vector<Job> jobs;
  for (const auto& tl : ws.reporting) {
    for (std::size_t i = 0; i < tl.days.size(); ++i) {
      jobs.push_back({tl.event_id, tl.days[i], i == 0 ? std::nullopt : std::optional<Day>(tl.days[i - 1])});
    }
  }
  std::vector<std::vector<FeatureVector>> rows(jobs.size());
  parallel_for(jobs.size(), static_cast<unsigned>(cfg.jobs), [&](std::size_t j) {
    const auto& job = jobs[j];
    std::pair<std::string, Day> key{job.event_id, job.day};
    DayFeatureInput in;
    in.event_id = job.event_id;
    in.day = job.day;
    in.docset = &ws.docsets.at(key);
    in.clusters = &ws.clusters.at(key);
    in.query = ws.event(job.event_id).query_terms;
    in.expanded_query = ws.expanded.at(key);
    in.docs = &ws.lookup;
    if (job.prev) {
      std::pair<std::string, Day> pk{job.event_id, *job.prev};
      in.prev_docset = &ws.docsets.at(pk);
      in.prev_clusters = &ws.clusters.at(pk);
    }
    rows[j] = extract_day_features(in, res);
  });
  std::vector<FeatureVector> all;
  for (auto& r : rows) {
    for (auto& fv : r) all.push_back(std::move(fv));
  }
  std::ostringstream out;
  write_feature_tsv(out, all);
  detail::write_text(cfg.work() / "features.tsv", out.str());
  log << "features: " << all.size() << " entity-day vectors\n";
}

/// Soft labels for every linked entity on every timeline day.
inline void run_label(const PipelineConfig& cfg, std::ostream& log) {
  const std::string stage = "label";
  Workspace ws;
  detail::load_docsets(cfg, stage, ws);
  auto pv = detail::need_input(stage, cfg.pageviews, "pageviews");
  auto links = detail::need_input(stage, cfg.links, "links");
  std::vector<std::string> warnings;
  std::vector<SoftLabel> labels;
  try {
    labels = build_training_tuples(ws.reporting, load_links(links.string()), load_pageviews(pv.string()),
                                   VorParams{cfg.vor_window, cfg.vor_min_median}, &warnings);
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
  for (const auto& w : warnings) log << "warning: " << w << "\n";
  std::ostringstream out;
  write_labels_tsv(out, labels);
  detail::write_text(cfg.work() / "labels.tsv", out.str());
  log << "label: " << labels.size() << " soft labels\n";
}

/// Events used for training: configured list, else every event with labels.
inline std::vector<std::string> training_events(const PipelineConfig& cfg, const Workspace& ws,
                                                const std::vector<SoftLabel>& labels) {
  auto list = detail::split_list(cfg.train_events);
  if (!list.empty()) return list;
  std::set<std::string> with;
  for (const auto& l : labels) with.insert(l.event_id);
  for (const auto& tl : ws.reporting) {
    if (with.count(tl.event_id)) list.push_back(tl.event_id);
  }
  return list;
}

inline std::vector<std::string> testing_events(const PipelineConfig& cfg, const Workspace& ws) {
  auto list = detail::split_list(cfg.test_events);
  if (!list.empty()) return list;
  for (const auto& tl : ws.reporting) list.push_back(tl.event_id);
  return list;
}

inline const ReportingTimeline& reporting_of(const Workspace& ws, const std::string& event_id) {
  for (const auto& tl : ws.reporting) {
    if (tl.event_id == event_id) return tl;
  }
  throw Error("event " + event_id + " has no reporting timeline");
}

/// Fits adaptation on the training queries, then trains the joint model of
/// the given mode.
inline JointModel train_mode(const PipelineConfig& cfg, const Workspace& ws, const std::vector<SoftLabel>& labels,
                             RankMode mode) {
  std::map<std::tuple<std::string, Day, std::string>, double> vor;
  for (const auto& l : labels) vor[{l.event_id, l.day, l.entity_key}] = l.vor;

  struct Query {
    const std::vector<FeatureVector>* entities;
    std::optional<long> gap;
  };
  std::vector<Query> queries;
  std::vector<QueryFeature> qf;
  for (const auto& ev : training_events(cfg, ws, labels)) {
    const auto& tl = reporting_of(ws, ev);
    for (std::size_t i = 0; i < tl.days.size(); ++i) {
      auto it = ws.features.find({ev, tl.days[i]});
      if (it == ws.features.end() || it->second.empty()) continue;
      std::optional<long> gap;
      if (i > 0) gap = tl.days[i].days_since(tl.days[i - 1]);
      queries.push_back({&it->second, gap});
      qf.push_back(query_features(it->second));
    }
  }
  if (qf.size() < 2) throw Error("need at least two training (event, day) queries with entities");
  auto adaptation = fit_adaptation(qf, cfg.components, cfg.seed);
  auto decay_params = cfg.decay_params();
  std::vector<TrainingGroup> groups;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    TrainingGroup g;
    g.event_id = qf[q].event_id;
    g.day = qf[q].day;
    g.s_score = adaptive_score(qf[q], adaptation, Aspect::kSalience);
    g.i_score = adaptive_score(qf[q], adaptation, Aspect::kInformativeness);
    g.gamma = queries[q].gap ? decay(*queries[q].gap, decay_params) : 1.0;
    for (const auto& fv : *queries[q].entities) {
      auto it = vor.find({fv.event_id, fv.day, fv.entity_key});
      if (it == vor.end()) continue;
      g.entities.push_back(fv);
      g.labels.push_back(it->second);
    }
    if (!g.entities.empty()) groups.push_back(std::move(g));
  }
  return fit_joint_model(groups, mode, adaptation, decay_params, cfg.train_params(), cfg.pair_margin);
}

inline std::vector<SoftLabel> load_stage_labels(const PipelineConfig& cfg, const std::string& stage) {
  auto p = detail::need_artifact(cfg, stage, "labels.tsv", "label");
  std::ifstream in(p);
  return read_labels_tsv(in);
}

inline void run_train(const PipelineConfig& cfg, std::ostream& log) {
  const std::string stage = "train";
  Workspace ws;
  detail::load_docsets(cfg, stage, ws);
  detail::load_features(cfg, stage, ws);
  auto labels = load_stage_labels(cfg, stage);
  JointModel m;
  try {
    m = train_mode(cfg, ws, labels, parse_rank_mode(cfg.mode));
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
  detail::write_text(cfg.model_path(), detail::dump(model_to_json(m)));
  log << "train: " << to_string(m.mode) << " on " << m.pair_count << " pairs, objective " << m.objective << ", "
      << m.violations << " violated pairs\n";
}

inline std::vector<EntityTimeline> rank_events(const PipelineConfig& cfg, const Workspace& ws,
                                               const JointModel& model) {
  struct Job {
    std::string event_id;
    Day day;
    std::optional<long> gap;
    std::size_t slot;
  };
  std::vector<EntityTimeline> out;
  std::vector<Job> jobs;
  for (const auto& ev : testing_events(cfg, ws)) {
    const auto& tl = reporting_of(ws, ev);
    out.push_back({ev, std::vector<RankedDay>(tl.days.size())});
    for (std::size_t i = 0; i < tl.days.size(); ++i) {
      std::optional<long> gap;
      if (i > 0) gap = tl.days[i].days_since(tl.days[i - 1]);
      jobs.push_back({ev, tl.days[i], gap, out.size() - 1});
    }
  }
  std::vector<std::size_t> pos(jobs.size());
  for (std::size_t j = 0, last = 0, k = 0; j < jobs.size(); ++j) {
    if (j == 0 || jobs[j].slot != last) k = 0;
    pos[j] = k++;
    last = jobs[j].slot;
  }
  static const std::vector<FeatureVector> kNone;
  static const std::vector<EntityCluster> kNoClusters;
  parallel_for(jobs.size(), static_cast<unsigned>(cfg.jobs), [&](std::size_t j) {
    const auto& job = jobs[j];
    auto fit = ws.features.find({job.event_id, job.day});
    auto cit = ws.clusters.find({job.event_id, job.day});
    const auto& feats = fit == ws.features.end() ? kNone : fit->second;
    auto supports = supporting_contexts(cit == ws.clusters.end() ? kNoClusters : cit->second);
    out[job.slot].days[pos[j]] =
        rank_day(job.event_id, job.day, model, feats, job.gap, supports, static_cast<std::size_t>(cfg.topk));
  });
  return out;
}

inline nlohmann::json timelines_to_json(const std::vector<EntityTimeline>& tls) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& tl : tls) arr.push_back(timeline_to_json(tl));
  return arr;
}

inline void run_rank(const PipelineConfig& cfg, std::ostream& log) {
  const std::string stage = "rank";
  Workspace ws;
  detail::load_documents(cfg, stage, ws);
  detail::load_docsets(cfg, stage, ws);
  detail::load_clusters(cfg, stage, ws);
  detail::load_features(cfg, stage, ws);
  if (!std::filesystem::exists(cfg.model_path())) {
    throw StageError(stage, "missing artifact " + cfg.model_path().string() + " (run 'train' first)");
  }
  std::vector<EntityTimeline> tls;
  try {
    auto model = model_from_json(detail::read_json(cfg.model_path()));
    tls = rank_events(cfg, ws, model);
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
  detail::write_text(cfg.output_path(), detail::dump(timelines_to_json(tls)));
  log << "rank: wrote " << tls.size() << " timelines to " << cfg.output_path().string() << "\n";
}

/// Trains and ranks with every mode and writes the metric table.
inline std::vector<MetricRow> run_eval(const PipelineConfig& cfg, std::ostream& log, std::ostream* table = nullptr) {
  const std::string stage = "eval";
  Workspace ws;
  detail::load_documents(cfg, stage, ws);
  detail::load_docsets(cfg, stage, ws);
  detail::load_clusters(cfg, stage, ws);
  detail::load_features(cfg, stage, ws);
  auto labels = load_stage_labels(cfg, stage);
  auto jpath = detail::need_input(stage, cfg.judgments, "judgments");
  Judgments judgments;
  try {
    judgments = load_judgments(jpath.string());
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
  if (judgments.empty()) log << "warning: judgments file " << jpath.string() << " is empty; all metrics are 0\n";
  std::vector<MetricRow> rows;
  for (auto mode : {RankMode::kAdaptER, RankMode::kNoAdapt, RankMode::kSalienceOnly,
                    RankMode::kInformativenessOnly}) {
    try {
      auto model = train_mode(cfg, ws, labels, mode);
      rows.push_back(evaluate(to_string(mode), rank_events(cfg, ws, model), judgments, cfg.relevance_threshold));
    } catch (const Error& e) {
      throw StageError(stage, to_string(mode) + ": " + e.what());
    }
  }
  std::ostringstream out;
  write_metric_table(out, rows);
  detail::write_text(cfg.work() / "metrics.tsv", out.str());
  if (table) *table << out.str();
  return rows;
}

/// Human-readable view of one event's timeline from the rank output.
inline void dump_timeline(const PipelineConfig& cfg, const std::string& event_id, std::ostream& out) {
  const std::string stage = "dump-timeline";
  if (!std::filesystem::exists(cfg.output_path())) {
    throw StageError(stage, "missing artifact " + cfg.output_path().string() + " (run 'rank' first)");
  }
  auto arr = detail::read_json(cfg.output_path());
  bool found = false;
  for (const auto& j : arr) {
    auto tl = timeline_from_json(j);
    if (!event_id.empty() && tl.event_id != event_id) continue;
    found = true;
    out << "event " << tl.event_id << "\n";
    for (const auto& d : tl.days) {
      out << "  " << d.day.str() << "\n";
      for (std::size_t r = 0; r < d.entities.size(); ++r) {
        const auto& e = d.entities[r];
        char buf[32];
        std::snprintf(buf, sizeof buf, "%8.4f", e.score);
        out << "    " << r + 1 << ". " << e.key << "  " << buf << "  [" << e.doc_id << "] " << e.sentence << "\n";
      }
    }
  }
  if (!found) throw StageError(stage, "no timeline for event '" + event_id + "'");
}

/// Every stage from ingest through rank.
inline void run_all(const PipelineConfig& cfg, std::ostream& log) {
  run_ingest(cfg, log);
  run_index(cfg, log);
  run_coref(cfg, log);
  run_features(cfg, log);
  run_label(cfg, log);
  run_train(cfg, log);
  run_rank(cfg, log);
}

}  // namespace entl
