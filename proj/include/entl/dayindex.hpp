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

// Per-day inverted index with Okapi BM25 retrieval and one round of
// KL-divergence pseudo-relevance-feedback query expansion.

#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "entl/common.hpp"
#include "entl/corpus.hpp"
#include "entl/text.hpp"

namespace entl {

inline constexpr int kIndexFormatVersion = 1;

using WeightedQuery = std::vector<std::pair<std::string, double>>;

struct Posting {
  std::string doc_id;
  int tf = 0;
  bool operator==(const Posting&) const = default;
};

struct DayIndex {
  Day day;
  std::map<std::string, std::vector<Posting>> postings;  // doc_id ascending
  std::map<std::string, int> doc_lengths;
  std::size_t doc_count = 0;
  double avg_doc_length = 0.0;

  long collection_length() const {
    long n = 0;
    for (const auto& [_, len] : doc_lengths) n += len;
    return n;
  }
  long collection_frequency(const std::string& term) const {
    auto it = postings.find(term);
    if (it == postings.end()) return 0;
    long n = 0;
    for (const auto& p : it->second) n += p.tf;
    return n;
  }
};

struct EventDocSet {
  std::string event_id;
  Day day;
  std::vector<std::pair<std::string, double>> documents;  // (doc_id, bm25), best first
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Index terms of a document: lowercased lemmas with at least one letter or
/// digit, stopwords removed.
inline std::vector<std::string> index_terms(const Document& doc,
                                            const TermSet& stopwords = default_stopwords()) {
  std::vector<std::string> out;
  for (const auto& s : doc.sentences) {
    for (const auto& t : s.tokens) {
      const auto& lemma = t.lemma.empty() ? t.surface : t.lemma;
      bool alnum = std::any_of(lemma.begin(), lemma.end(),
                               [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
      if (!alnum) continue;
      auto term = to_lower(lemma);
      if (stopwords.contains(term)) continue;
      out.push_back(std::move(term));
    }
  }
  return out;
}

inline DayIndex build_day_index(std::span<const Document* const> docs,
                                const TermSet& stopwords = default_stopwords()) {
  DayIndex idx;
  if (docs.empty()) return idx;
  idx.day = docs.front()->date;
  std::map<std::string, std::map<std::string, int>> tf;  // term -> doc -> tf
  for (const Document* d : docs) {
    if (d->date != idx.day) {
      throw Error("build_day_index: document " + d->doc_id + " dated " + d->date.str() +
                  " in index for " + idx.day.str());
    }
    if (idx.doc_lengths.count(d->doc_id)) throw Error("duplicate doc_id " + d->doc_id);
    auto terms = index_terms(*d, stopwords);
    idx.doc_lengths[d->doc_id] = static_cast<int>(terms.size());
    for (auto& t : terms) ++tf[t][d->doc_id];
  }
  for (auto& [term, per_doc] : tf) {
    auto& list = idx.postings[term];
    for (auto& [doc_id, n] : per_doc) list.push_back({doc_id, n});
  }
  idx.doc_count = idx.doc_lengths.size();
  idx.avg_doc_length =
      static_cast<double>(idx.collection_length()) / static_cast<double>(idx.doc_count);
  return idx;
}

inline DayIndex build_day_index(const std::vector<Document>& docs,
                                const TermSet& stopwords = default_stopwords()) {
  std::vector<const Document*> ptrs;
  for (const auto& d : docs) ptrs.push_back(&d);
  return build_day_index(std::span<const Document* const>(ptrs), stopwords);
}

/// Non-negative BM25 idf: log(1 + (N - df + 0.5) / (df + 0.5)).
inline double bm25_idf(std::size_t doc_count, std::size_t df) {
  double n = static_cast<double>(doc_count), f = static_cast<double>(df);
  return std::log(1.0 + (n - f + 0.5) / (f + 0.5));
}

inline double bm25_term_weight(int tf, int doc_len, double avg_len, const Bm25Params& p) {
  double norm = avg_len > 0 ? static_cast<double>(doc_len) / avg_len : 1.0;
  double f = static_cast<double>(tf);
  return f * (p.k1 + 1.0) / (f + p.k1 * (1.0 - p.b + p.b * norm));
}

/// Scores every document containing at least one query term. Query weights
/// multiply per-term contributions.
inline std::map<std::string, double> bm25_scores(const DayIndex& index, const WeightedQuery& query,
                                                 const Bm25Params& params = {}) {
  std::map<std::string, double> scores;
  for (const auto& [term, weight] : query) {
    auto it = index.postings.find(term);
    if (it == index.postings.end()) continue;
    double idf = bm25_idf(index.doc_count, it->second.size());
    for (const auto& p : it->second) {
      scores[p.doc_id] += weight * idf *
                          bm25_term_weight(p.tf, index.doc_lengths.at(p.doc_id),
                                           index.avg_doc_length, params);
    }
  }
  return scores;
}

/// Top-k documents by BM25; ties broken by doc_id ascending. Documents that
/// match no query term are not returned.
inline EventDocSet bm25_retrieve(const DayIndex& index, const WeightedQuery& query, std::size_t k,
                                 const Bm25Params& params = {}) {
  if (k < 1) throw Error("bm25_retrieve: k must be >= 1");
  EventDocSet out;
  out.day = index.day;
  for (auto& [doc, s] : bm25_scores(index, query, params)) {
    if (s > 0.0) out.documents.emplace_back(doc, s);
  }
  std::sort(out.documents.begin(), out.documents.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (out.documents.size() > k) out.documents.resize(k);
  return out;
}

/// KL term scores p_fb(t) * log(p_fb(t) / p_coll(t)) for every term of the
/// feedback documents. p_coll is the Laplace-smoothed unigram model of the
/// day's collection; terms unseen in the index get the smoothing floor.
inline std::map<std::string, double> kl_term_scores(const DayIndex& collection,
                                                    std::span<const Document* const> feedback,
                                                    const TermSet& stopwords = default_stopwords()) {
  std::map<std::string, long> fb_tf;
  long fb_len = 0;
  for (const Document* d : feedback) {
    for (auto& t : index_terms(*d, stopwords)) {
      ++fb_tf[t];
      ++fb_len;
    }
  }
  std::map<std::string, double> scores;
  if (fb_len == 0) return scores;
  std::size_t vocab = collection.postings.size();
  for (const auto& [t, _] : fb_tf) {
    if (!collection.postings.count(t)) ++vocab;
  }
  double denom = static_cast<double>(collection.collection_length()) + static_cast<double>(vocab);
  for (const auto& [t, n] : fb_tf) {
    double p_fb = static_cast<double>(n) / static_cast<double>(fb_len);
    double p_coll = (static_cast<double>(collection.collection_frequency(t)) + 1.0) / denom;
    scores[t] = p_fb * std::log(p_fb / p_coll);
  }
  return scores;
}

/// Original terms at weight 1.0 followed by up to `n_terms` expansion terms
/// with positive KL score, weighted score / max_score * max_weight.
inline WeightedQuery kl_expand_query(const std::vector<std::string>& query,
                                     const DayIndex& collection,
                                     std::span<const Document* const> feedback, std::size_t n_terms,
                                     double max_weight = 0.5,
                                     const TermSet& stopwords = default_stopwords()) {
  if (feedback.empty()) throw Error("kl_expand_query: no feedback documents");
  WeightedQuery out;
  for (const auto& q : query) out.emplace_back(q, 1.0);
  std::vector<std::pair<std::string, double>> ranked;
  for (auto& [t, s] : kl_term_scores(collection, feedback, stopwords)) {
    if (s <= 0.0 || stopwords.contains(t)) continue;
    if (std::find(query.begin(), query.end(), t) != query.end()) continue;
    ranked.emplace_back(t, s);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > n_terms) ranked.resize(n_terms);
  if (ranked.empty()) return out;
  double top = ranked.front().second;
  for (auto& [t, s] : ranked) out.emplace_back(t, max_weight * s / top);
  return out;
}

inline nlohmann::json day_index_to_json(const DayIndex& idx) {
  nlohmann::json j;
  j["format_version"] = kIndexFormatVersion;
  j["day"] = idx.day.str();
  j["doc_count"] = idx.doc_count;
  j["avg_doc_length"] = idx.avg_doc_length;
  j["doc_lengths"] = idx.doc_lengths;
  auto& post = j["postings"] = nlohmann::json::object();
  for (const auto& [term, list] : idx.postings) {
    auto arr = nlohmann::json::array();
    for (const auto& p : list) arr.push_back({p.doc_id, p.tf});
    post[term] = std::move(arr);
  }
  return j;
}

inline DayIndex day_index_from_json(const nlohmann::json& j) {
  if (j.value("format_version", 0) != kIndexFormatVersion) {
    throw Error("unsupported day index format version");
  }
  DayIndex idx;
  idx.day = Day::parse(j.at("day").get<std::string>());
  idx.doc_count = j.at("doc_count").get<std::size_t>();
  idx.avg_doc_length = j.at("avg_doc_length").get<double>();
  idx.doc_lengths = j.at("doc_lengths").get<std::map<std::string, int>>();
  for (const auto& [term, arr] : j.at("postings").items()) {
    auto& list = idx.postings[term];
    for (const auto& p : arr) list.push_back({p[0].get<std::string>(), p[1].get<int>()});
  }
  return idx;
}

inline nlohmann::json docset_to_json(const EventDocSet& ds) {
  auto docs = nlohmann::json::array();
  for (const auto& [id, s] : ds.documents) docs.push_back({id, s});
  return {{"event_id", ds.event_id}, {"day", ds.day.str()}, {"documents", std::move(docs)}};
}

inline EventDocSet docset_from_json(const nlohmann::json& j) {
  EventDocSet ds;
  ds.event_id = j.at("event_id").get<std::string>();
  ds.day = Day::parse(j.at("day").get<std::string>());
  for (const auto& d : j.at("documents")) {
    ds.documents.emplace_back(d[0].get<std::string>(), d[1].get<double>());
  }
  return ds;
}

}  // namespace entl
