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

// Entity features for one (event, day).
//
// Salience features describe how central an entity is in the day's
// documents; informativeness features compare the entity's contexts with its
// contexts on the previous reporting day. Individual features are computed
// either per label (averaged uniformly over the entity's labels) or per
// context (averaged with the normalized retrieval score of the context's
// document as weight), then rank-normalized across the day's entities.

#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "entl/common.hpp"
#include "entl/coref.hpp"
#include "entl/corpus.hpp"
#include "entl/dayindex.hpp"
#include "entl/langmodel.hpp"
#include "entl/summarize.hpp"
#include "entl/text.hpp"
#include "entl/topics.hpp"

namespace entl {

inline const std::vector<std::string>& salience_feature_names() {
  static const std::vector<std::string> kNames = {
      "Tf",      "Df",       "WO",    "SO",    "SentLen", "SentLenNoStop", "Sent5",
      "Sent10",  "1Sent",    "2Sent", "3Sent", "TITLE",   "CoEntM",        "SumB",
      "SumF",    "Uni",      "Bi",    "Bi4",   "Att",     "Sent",          "Read1",
      "Read2",   "Read3",    "PR",    "POS",   "NewsFrac"};
  return kNames;
}

inline const std::vector<std::string>& informativeness_feature_names() {
  static const std::vector<std::string> kNames = {"PTf",    "PDf",    "CoEntE", "CTI",
                                                  "TDivC",  "TDivM",  "CosSim", "DisSim",
                                                  "EntDif", "TITLEP", "NewsFracP"};
  return kNames;
}

struct FeatureVector {
  std::string entity_key;
  std::string event_id;
  Day day;
  std::vector<double> salience;
  std::vector<double> informativeness;
};

enum class Dissimilarity { kLexical, kTopic, kDistributional };

inline Dissimilarity parse_dissimilarity(std::string_view s) {
  if (s == "CTI" || s == "lexical") return Dissimilarity::kLexical;
  if (s == "TDiv" || s == "topic") return Dissimilarity::kTopic;
  if (s == "DisSim" || s == "distributional") return Dissimilarity::kDistributional;
  throw Error("unknown dissimilarity kind '" + std::string(s) + "'");
}

/// Rank transform to [0, 1]: rank / (n - 1) with average ranks for ties;
/// a single value maps to 0.5.
inline std::vector<double> quantile_normalize(std::span<const double> values) {
  std::size_t n = values.size();
  if (n == 0) throw Error("quantile_normalize: no values");
  if (n == 1) return {0.5};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = avg_rank / static_cast<double>(n - 1);
    i = j + 1;
  }
  return out;
}

inline double aggregate_label_level(std::span<const double> values) {
  if (values.empty()) throw Error("aggregate_label_level: no values");
  double s = 0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

/// Confidence-weighted mean; all-zero confidences fall back to the plain mean.
inline double aggregate_context_level(std::span<const double> values,
                                      std::span<const double> confidences) {
  if (values.empty() || values.size() != confidences.size()) {
    throw Error("aggregate_context_level: need one confidence per value");
  }
  double z = 0;
  for (double c : confidences) z += c;
  if (z <= 0) return aggregate_label_level(values);
  double s = 0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * confidences[i] / z;
  return s;
}

/// Context-aware informativeness before normalization: 1 when the entity has
/// no contexts on the previous reporting day, else
/// sum(kappa(c', c) * s(d_c')) / |U|.
inline double informativeness_raw(std::span<const double> kappas, std::span<const double> scores) {
  if (kappas.size() != scores.size()) throw Error("informativeness_raw: size mismatch");
  if (kappas.empty()) return 1.0;
  double s = 0;
  for (std::size_t i = 0; i < kappas.size(); ++i) s += kappas[i] * scores[i];
  return s / static_cast<double>(kappas.size());
}

inline int entity_difference(const std::set<std::string>& current, const std::set<std::string>& previous) {
  int n = 0;
  for (const auto& e : current) {
    if (!previous.count(e)) ++n;
  }
  return n;
}

/// A context reduced to what the dissimilarity kernels need.
struct ContextText {
  TokenList lemmas;                    // content lemmas
  std::set<std::string> other_labels;  // lowercased labels of other entities in the sentence
};

struct HistoryContext {
  ContextText text;
  std::string doc_id;
  double doc_score = 0.0;  // retrieval score on the previous day
};

struct ContextHistory {
  std::string entity_key;
  std::vector<HistoryContext> contexts;
  std::set<std::string> co_entities;
};

struct FeatureParams {
  double dirichlet_mu = 100.0;
  double sumfocus_mix = 0.5;
  double lexical_entity_bonus = 0.2;
  LexRankParams lexrank;
};

/// Lexicons and models shared read-only by all extraction jobs.
struct FeatureResources {
  const TopicModel* topics = nullptr;
  TermSet stopwords = default_stopwords();
  TermSet news_terms = default_news_terms();
  TermSet attitude_terms = default_attitude_terms();
  TermSet sentiment_terms = default_sentiment_terms();
  FeatureParams params;
};

/// Lexical sentence dissimilarity: 1 - min(1, Jaccard(lemma sets) + bonus),
/// with the bonus applied when both sentences mention a common other entity.
inline double lexical_dissimilarity(const ContextText& a, const ContextText& b, double bonus) {
  std::set<std::string> sa(a.lemmas.begin(), a.lemmas.end()), sb(b.lemmas.begin(), b.lemmas.end());
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  std::size_t uni = sa.size() + sb.size() - inter;
  double sim = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  bool shared = std::any_of(a.other_labels.begin(), a.other_labels.end(),
                            [&](const std::string& l) { return b.other_labels.count(l) > 0; });
  if (shared) sim = std::min(1.0, sim + bonus);
  return 1.0 - sim;
}

/// kappa(c', c) for the three informativeness strategies.
class DissimilarityKernel {
 public:
  DissimilarityKernel(const FeatureResources& res, const CollectionModel& coll)
      : res_(res), coll_(coll) {}

  double operator()(Dissimilarity kind, const ContextText& previous, const ContextText& current) const {
    switch (kind) {
      case Dissimilarity::kLexical:
        return lexical_dissimilarity(previous, current, res_.params.lexical_entity_bonus);
      case Dissimilarity::kTopic:
        if (!res_.topics) throw Error("topic dissimilarity needs a topic model");
        return res_.topics->diversity(current.lemmas, previous.lemmas);
      case Dissimilarity::kDistributional: {
        ContextModel cur(current.lemmas, coll_, res_.params.dirichlet_mu);
        ContextModel prev(previous.lemmas, coll_, res_.params.dirichlet_mu);
        return kl_divergence(cur, prev);
      }
    }
    throw Error("unknown dissimilarity kind");
  }

 private:
  const FeatureResources& res_;
  const CollectionModel& coll_;
};

inline double informativeness_score(const ContextText& context, const ContextHistory& history,
                                    Dissimilarity kind, const DissimilarityKernel& kernel) {
  std::vector<double> kappas, scores;
  for (const auto& h : history.contexts) {
    kappas.push_back(kernel(kind, h.text, context));
    scores.push_back(h.doc_score);
  }
  return informativeness_raw(kappas, scores);
}

/// POS encoding of a mention head: proper noun 1.0, common noun 0.66,
/// other 0.33, no tag 0.
inline double pos_code(std::string_view tag) {
  if (tag.empty()) return 0.0;
  if (tag == "NNP" || tag == "NNPS" || tag == "PROPN") return 1.0;
  if (tag == "NN" || tag == "NNS" || tag == "NOUN") return 0.66;
  return 0.33;
}

/// Fraction of query bigrams (consecutive original query terms) that occur in
/// order in `lemmas` with at most `max_gap` words between them.
inline double bigram_overlap(const TokenList& lemmas, const std::vector<std::string>& query,
                             std::size_t max_gap) {
  if (query.size() < 2) return 0.0;
  std::size_t hits = 0;
  for (std::size_t q = 0; q + 1 < query.size(); ++q) {
    bool found = false;
    for (std::size_t i = 0; i < lemmas.size() && !found; ++i) {
      if (lemmas[i] != query[q]) continue;
      for (std::size_t j = i + 1; j < lemmas.size() && j <= i + 1 + max_gap; ++j) {
        if (lemmas[j] == query[q + 1]) {
          found = true;
          break;
        }
      }
    }
    hits += found;
  }
  return static_cast<double>(hits) / static_cast<double>(query.size() - 1);
}

struct DayFeatureInput {
  std::string event_id;
  Day day;
  const EventDocSet* docset = nullptr;
  const std::vector<EntityCluster>* clusters = nullptr;
  std::vector<std::string> query;  // original query terms
  WeightedQuery expanded_query;
  /// Previous reporting-timeline entry; null on the first timeline day.
  const EventDocSet* prev_docset = nullptr;
  const std::vector<EntityCluster>* prev_clusters = nullptr;
  const DocLookup* docs = nullptr;
};

struct RawEntityFeatures {
  std::string entity_key;
  std::map<std::string, double> salience;
  std::map<std::string, double> informativeness;
  bool first_appearance = true;
};

/// Precomputed sentence-level state for one (event, day) and its previous
/// reporting day. Building it runs SumBasic, SumFocus and LexRank over the
/// day's retrieved sentences and the informativeness kernels over every
/// (context, history context) pair.
class DayState {
 public:
  DayState(const DayFeatureInput& in, const FeatureResources& res) : in_(in), res_(res) {
    if (!in.docset || !in.clusters || !in.docs) throw Error("DayState: incomplete input");
    add_sentences(*in.docset, cur_);
    if (in.prev_docset) add_sentences(*in.prev_docset, prev_);

    std::vector<TokenList> all;
    for (const auto& s : cur_.list) all.push_back(s.content);
    for (const auto& s : prev_.list) all.push_back(s.content);
    coll_ = CollectionModel(all);
    tfidf_ = std::make_unique<TfIdf>(all);

    std::vector<TokenList> cur_sents;
    for (const auto& s : cur_.list) cur_sents.push_back(s.content);
    if (!cur_sents.empty()) {
      auto sumb = sumbasic_scores(cur_sents);
      std::map<std::string, double> focus;
      for (const auto& [t, w] : in.expanded_query) focus[t] += w;
      auto sumf = sumbasic_scores(cur_sents, focus, res.params.sumfocus_mix);
      auto pr = lexrank_centrality(cur_sents, res.params.lexrank);
      for (std::size_t i = 0; i < cur_.list.size(); ++i) {
        cur_.list[i].sumb = sumb[i];
        cur_.list[i].sumf = sumf[i];
        cur_.list[i].pr = pr[i];
      }
    }
    label_stats(*in.docset, cur_labels_);
    if (in.prev_docset) label_stats(*in.prev_docset, prev_labels_);
    cur_coent_ = co_entities(*in.clusters, cur_);
    if (in.prev_clusters) {
      prev_coent_ = co_entities(*in.prev_clusters, prev_);
      for (std::size_t i = 0; i < in.prev_clusters->size(); ++i) {
        const auto& c = (*in.prev_clusters)[i];
        prev_index_[{c.entity_key, c.etype}] = i;
      }
    }
    compute_informativeness();
  }

  const std::vector<EntityCluster>& clusters() const { return *in_.clusters; }

  ContextHistory history_of(std::size_t cluster) const {
    const auto& c = (*in_.clusters)[cluster];
    ContextHistory h;
    h.entity_key = c.entity_key;
    auto idx = previous_cluster(cluster);
    if (!idx) return h;
    const auto& pc = (*in_.prev_clusters)[*idx];
    for (const auto& ctx : pc.contexts) {
      h.contexts.push_back({context_text(prev_, ctx, pc), ctx.doc_id, ctx.doc_score});
    }
    h.co_entities = prev_coent_[*idx];
    return h;
  }

  std::map<std::string, double> salience_features(std::size_t cluster) const {
    const auto& c = (*in_.clusters)[cluster];
    std::map<std::string, double> f;
    // Label level.
    std::vector<double> tf, df, title;
    for (const auto& label : lower_labels(c)) {
      auto it = cur_labels_.find(label);
      tf.push_back(it == cur_labels_.end() ? 0.0 : it->second.tf);
      df.push_back(it == cur_labels_.end() ? 0.0 : static_cast<double>(it->second.docs.size()));
      title.push_back(in_title(label, *in_.docset, cur_labels_));
    }
    f["Tf"] = aggregate_label_level(tf);
    f["Df"] = aggregate_label_level(df);
    f["TITLE"] = aggregate_label_level(title);
    f["CoEntM"] = static_cast<double>(cur_coent_[cluster].size());
    f["NewsFrac"] = term_fraction(cur_, c, res_.news_terms);

    // Context level.
    std::map<std::string, std::vector<double>> per_ctx;
    std::vector<double> conf;
    std::map<std::string, double> focus;
    for (const auto& ctx : c.contexts) {
      const auto& s = cur_.at(ctx.doc_id, ctx.sentence_index);
      const Sentence& sent = *s.sentence;
      conf.push_back(ctx.doc_score);
      auto& v = per_ctx;
      double wo = 0;
      for (auto off : sent.token_offsets) wo += off < ctx.anchor.start ? 1.0 : 0.0;
      v["WO"].push_back(wo);
      v["SO"].push_back(ctx.sentence_index);
      v["SentLen"].push_back(s.words);
      v["SentLenNoStop"].push_back(static_cast<double>(s.content.size()));
      v["Sent5"].push_back(s.words > 5 ? 1.0 : 0.0);
      v["Sent10"].push_back(s.words > 10 ? 1.0 : 0.0);
      v["1Sent"].push_back(ctx.sentence_index < 1 ? 1.0 : 0.0);
      v["2Sent"].push_back(ctx.sentence_index < 3 ? 1.0 : 0.0);
      v["3Sent"].push_back(ctx.sentence_index < 5 ? 1.0 : 0.0);
      v["SumB"].push_back(s.sumb);
      v["SumF"].push_back(s.sumf);
      v["PR"].push_back(s.pr);
      v["Uni"].push_back(unigram_overlap(s.content));
      v["Bi"].push_back(bigram_overlap(s.content, in_.query, 0));
      v["Bi4"].push_back(bigram_overlap(s.content, in_.query, 4));
      double words = std::max(1.0, s.words), att = 0, sen = 0;
      std::vector<std::string> surfaces;
      for (const auto& t : sent.tokens) {
        surfaces.push_back(t.surface);
        if (res_.attitude_terms.contains(t.lemma) || res_.attitude_terms.contains(t.surface)) att += 1;
        if (res_.sentiment_terms.contains(t.lemma) || res_.sentiment_terms.contains(t.surface)) sen += 1;
      }
      v["Att"].push_back(att / words);
      v["Sent"].push_back(sen / words);
      auto r = readability(surfaces);
      v["Read1"].push_back(r.flesch_reading_ease);
      v["Read2"].push_back(r.gunning_fog);
      v["Read3"].push_back(r.flesch_kincaid_grade);
      v["POS"].push_back(pos_code(head_pos(sent, ctx.anchor)));
    }
    for (auto& [name, vals] : per_ctx) f[name] = aggregate_context_level(vals, conf);
    return f;
  }

  std::map<std::string, double> informativeness_features(std::size_t cluster) const {
    const auto& c = (*in_.clusters)[cluster];
    std::map<std::string, double> f;
    auto prev = previous_cluster(cluster);
    std::vector<double> ptf, pdf, titlep;
    for (const auto& label : lower_labels(c)) {
      auto it = prev_labels_.find(label);
      ptf.push_back(it == prev_labels_.end() ? 0.0 : it->second.tf);
      pdf.push_back(it == prev_labels_.end() ? 0.0 : static_cast<double>(it->second.docs.size()));
      titlep.push_back(in_.prev_docset ? in_title(label, *in_.prev_docset, prev_labels_) : 0.0);
    }
    f["PTf"] = aggregate_label_level(ptf);
    f["PDf"] = aggregate_label_level(pdf);
    f["TITLEP"] = aggregate_label_level(titlep);
    static const std::set<std::string> kEmpty;
    const auto& prev_co = prev ? prev_coent_[*prev] : kEmpty;
    f["CoEntE"] = static_cast<double>(prev_co.size());
    f["EntDif"] = entity_difference(cur_coent_[cluster], prev_co);
    f["NewsFracP"] = prev ? term_fraction(prev_, (*in_.prev_clusters)[*prev], res_.news_terms) : 0.0;
    f["TDivM"] = label_topic_diversity(cluster);

    std::vector<double> conf, cti, tdiv, dis, cos;
    for (std::size_t k = 0; k < c.contexts.size(); ++k) {
      conf.push_back(c.contexts[k].doc_score);
      cti.push_back(inf_[cluster][k][0]);
      tdiv.push_back(inf_[cluster][k][1]);
      dis.push_back(inf_[cluster][k][2]);
      cos.push_back(cos_[cluster][k]);
    }
    f["CTI"] = aggregate_context_level(cti, conf);
    f["TDivC"] = aggregate_context_level(tdiv, conf);
    f["DisSim"] = aggregate_context_level(dis, conf);
    f["CosSim"] = aggregate_context_level(cos, conf);
    return f;
  }

  bool first_appearance(std::size_t cluster) const { return !previous_cluster(cluster).has_value(); }

  /// Raw (pre-normalization) informativeness score of one context under
  /// one kernel, as used by the context-level CTI/TDivC/DisSim features.
  double context_informativeness(std::size_t cluster, std::size_t context, Dissimilarity kind) const {
    return inf_[cluster][context][static_cast<std::size_t>(kind)];
  }

 private:
  struct SentInfo {
    const Document* doc = nullptr;
    const Sentence* sentence = nullptr;
    TokenList content;
    double words = 0;
    double sumb = 0, sumf = 0, pr = 0;
    std::set<std::string> labels;  // lowercased mention surfaces
  };
  struct SentTable {
    std::vector<SentInfo> list;
    std::map<std::pair<std::string, int>, std::size_t> index;
    const SentInfo& at(const std::string& doc, int sent) const {
      auto it = index.find({doc, sent});
      if (it == index.end()) throw Error("context sentence not in retrieved documents: " + doc);
      return list[it->second];
    }
  };
  struct LabelStat {
    double tf = 0;
    std::set<std::string> docs;
    bool in_title = false;
  };

  void add_sentences(const EventDocSet& ds, SentTable& table) const {
    for (const auto& [doc_id, _] : ds.documents) {
      const Document* d = in_.docs->at(doc_id);
      for (const auto& s : d->sentences) {
        SentInfo info;
        info.doc = d;
        info.sentence = &s;
        for (const auto& t : s.tokens) {
          const auto& lemma = t.lemma.empty() ? t.surface : t.lemma;
          bool alnum = std::any_of(lemma.begin(), lemma.end(),
                                   [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)); });
          if (!alnum) continue;
          info.words += 1;
          auto low = to_lower(lemma);
          if (!res_.stopwords.contains(low)) info.content.push_back(std::move(low));
        }
        for (const auto& m : d->mentions) {
          if (m.sentence_index == s.index) info.labels.insert(to_lower(trim(m.surface)));
        }
        table.index[{d->doc_id, s.index}] = table.list.size();
        table.list.push_back(std::move(info));
      }
    }
  }

  void label_stats(const EventDocSet& ds, std::map<std::string, LabelStat>& stats) const {
    for (const auto& [doc_id, _] : ds.documents) {
      const Document* d = in_.docs->at(doc_id);
      for (const auto& m : d->mentions) {
        auto& st = stats[to_lower(trim(m.surface))];
        st.tf += 1;
        st.docs.insert(d->doc_id);
        st.in_title = st.in_title || m.in_title;
      }
    }
  }

  double in_title(const std::string& label, const EventDocSet& ds,
                  const std::map<std::string, LabelStat>& stats) const {
    auto it = stats.find(label);
    if (it != stats.end() && it->second.in_title) return 1.0;
    for (const auto& [doc_id, _] : ds.documents) {
      if (to_lower(in_.docs->at(doc_id)->title).find(label) != std::string::npos) return 1.0;
    }
    return 0.0;
  }

  static std::vector<std::string> lower_labels(const EntityCluster& c) {
    std::set<std::string> out;
    for (const auto& l : c.labels) out.insert(to_lower(trim(l)));
    return {out.begin(), out.end()};
  }

  std::vector<std::set<std::string>> co_entities(const std::vector<EntityCluster>& clusters,
                                                 const SentTable& table) const {
    std::map<std::pair<std::string, int>, std::set<std::size_t>> by_sentence;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (const auto& ctx : clusters[i].contexts) by_sentence[{ctx.doc_id, ctx.sentence_index}].insert(i);
    }
    (void)table;
    std::vector<std::set<std::string>> out(clusters.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (const auto& ctx : clusters[i].contexts) {
        for (auto j : by_sentence[{ctx.doc_id, ctx.sentence_index}]) {
          if (j != i) out[i].insert(clusters[j].entity_key);
        }
      }
    }
    return out;
  }

  std::optional<std::size_t> previous_cluster(std::size_t cluster) const {
    if (!in_.prev_clusters) return std::nullopt;
    const auto& c = (*in_.clusters)[cluster];
    auto it = prev_index_.find({c.entity_key, c.etype});
    if (it == prev_index_.end()) return std::nullopt;
    return it->second;
  }

  ContextText context_text(const SentTable& table, const ContextRef& ctx, const EntityCluster& owner) const {
    const auto& s = table.at(ctx.doc_id, ctx.sentence_index);
    ContextText t;
    t.lemmas = s.content;
    auto own = lower_labels(owner);
    for (const auto& l : s.labels) {
      if (std::find(own.begin(), own.end(), l) == own.end()) t.other_labels.insert(l);
    }
    return t;
  }

  double term_fraction(const SentTable& table, const EntityCluster& c, const TermSet& terms) const {
    double hit = 0, total = 0;
    for (const auto& ctx : c.contexts) {
      const auto& s = table.at(ctx.doc_id, ctx.sentence_index);
      for (const auto& t : s.sentence->tokens) {
        if (!has_alpha(t.surface)) continue;
        total += 1;
        if (terms.contains(t.lemma) || terms.contains(t.surface)) hit += 1;
      }
    }
    return total == 0 ? 0.0 : hit / total;
  }

  double unigram_overlap(const TokenList& lemmas) const {
    double total = 0, hit = 0;
    std::set<std::string> present(lemmas.begin(), lemmas.end());
    for (const auto& [t, w] : in_.expanded_query) {
      total += w;
      if (present.count(t)) hit += w;
    }
    return total == 0 ? 0.0 : hit / total;
  }

  static std::string head_pos(const Sentence& sent, const Mention& m) {
    std::string tag;
    for (std::size_t i = 0; i < sent.tokens.size() && i < sent.token_offsets.size(); ++i) {
      auto off = sent.token_offsets[i];
      if (off >= m.start && off < m.end) tag = sent.tokens[i].pos;
    }
    return tag;
  }

  double label_topic_diversity(std::size_t cluster) const {
    auto prev = previous_cluster(cluster);
    if (!prev) return 1.0;
    if (!res_.topics) throw Error("topic diversity needs a topic model");
    TokenList cur, old;
    for (const auto& ctx : (*in_.clusters)[cluster].contexts) {
      const auto& s = cur_.at(ctx.doc_id, ctx.sentence_index).content;
      cur.insert(cur.end(), s.begin(), s.end());
    }
    for (const auto& ctx : (*in_.prev_clusters)[*prev].contexts) {
      const auto& s = prev_.at(ctx.doc_id, ctx.sentence_index).content;
      old.insert(old.end(), s.begin(), s.end());
    }
    return res_.topics->diversity(cur, old) / std::sqrt(2.0);
  }

  void compute_informativeness() {
    const auto& clusters = *in_.clusters;
    DissimilarityKernel kernel(res_, coll_);
    inf_.resize(clusters.size());
    cos_.resize(clusters.size());
    std::array<double, 3> lo{}, hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    std::vector<std::vector<bool>> has_history(clusters.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      auto history = history_of(i);
      std::vector<std::map<std::string, double>> prev_vecs;
      for (const auto& h : history.contexts) prev_vecs.push_back(tfidf_->vectorize(h.text.lemmas));
      for (const auto& ctx : clusters[i].contexts) {
        auto text = context_text(cur_, ctx, clusters[i]);
        std::array<double, 3> v{};
        for (int k = 0; k < 3; ++k) {
          v[static_cast<std::size_t>(k)] =
              informativeness_score(text, history, static_cast<Dissimilarity>(k), kernel);
        }
        double cs = 0;
        auto vec = tfidf_->vectorize(text.lemmas);
        for (const auto& pv : prev_vecs) cs += TfIdf::cosine(vec, pv);
        cos_[i].push_back(prev_vecs.empty() ? 0.0 : cs / static_cast<double>(prev_vecs.size()));
        bool hist = !history.contexts.empty();
        has_history[i].push_back(hist);
        if (hist) {
          for (std::size_t k = 0; k < 3; ++k) {
            lo[k] = std::min(lo[k], v[k]);
            hi[k] = std::max(hi[k], v[k]);
          }
        }
        inf_[i].push_back(v);
      }
    }
    // Min-max normalize contexts with history; first appearances stay at 1.
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t c = 0; c < inf_[i].size(); ++c) {
        if (!has_history[i][c]) continue;
        for (std::size_t k = 0; k < 3; ++k) {
          double span = hi[k] - lo[k];
          inf_[i][c][k] = span > 0 ? (inf_[i][c][k] - lo[k]) / span : 0.5;
        }
      }
    }
  }

  const DayFeatureInput& in_;
  const FeatureResources& res_;
  SentTable cur_, prev_;
  CollectionModel coll_;
  std::unique_ptr<TfIdf> tfidf_;
  std::map<std::string, LabelStat> cur_labels_, prev_labels_;
  std::vector<std::set<std::string>> cur_coent_, prev_coent_;
  std::map<std::pair<std::string, EntityType>, std::size_t> prev_index_;
  std::vector<std::vector<std::array<double, 3>>> inf_;
  std::vector<std::vector<double>> cos_;
};

inline std::vector<RawEntityFeatures> extract_raw_day_features(const DayFeatureInput& in,
                                                               const FeatureResources& res) {
  DayState state(in, res);
  std::vector<RawEntityFeatures> out;
  for (std::size_t i = 0; i < in.clusters->size(); ++i) {
    const auto& c = (*in.clusters)[i];
    if (c.contexts.empty()) continue;
    RawEntityFeatures r;
    r.entity_key = c.entity_key;
    r.salience = state.salience_features(i);
    r.informativeness = state.informativeness_features(i);
    r.first_appearance = state.first_appearance(i);
    out.push_back(std::move(r));
  }
  return out;
}

/// Rank-normalizes every dimension across the day's entities. On the first
/// reporting day there is no history, so every informativeness feature takes
/// its first-appearance value 1.
inline std::vector<FeatureVector> normalize_day_features(const std::vector<RawEntityFeatures>& raw,
                                                         const std::string& event_id, Day day,
                                                         bool first_timeline_day) {
  const auto& sn = salience_feature_names();
  const auto& in = informativeness_feature_names();
  std::vector<FeatureVector> out(raw.size());
  for (std::size_t e = 0; e < raw.size(); ++e) {
    out[e].entity_key = raw[e].entity_key;
    out[e].event_id = event_id;
    out[e].day = day;
    out[e].salience.resize(sn.size());
    out[e].informativeness.resize(in.size());
  }
  if (raw.empty()) return out;
  auto column = [&](auto getter, const std::string& name) {
    std::vector<double> col;
    for (const auto& r : raw) {
      auto& m = getter(r);
      auto it = m.find(name);
      if (it == m.end()) throw Error("missing raw feature " + name);
      if (!std::isfinite(it->second)) throw Error("non-finite raw feature " + name);
      col.push_back(it->second);
    }
    return quantile_normalize(col);
  };
  for (std::size_t d = 0; d < sn.size(); ++d) {
    auto col = column([](const RawEntityFeatures& r) -> const auto& { return r.salience; }, sn[d]);
    for (std::size_t e = 0; e < raw.size(); ++e) out[e].salience[d] = col[e];
  }
  for (std::size_t d = 0; d < in.size(); ++d) {
    if (first_timeline_day) {
      for (auto& fv : out) fv.informativeness[d] = 1.0;
      continue;
    }
    auto col = column([](const RawEntityFeatures& r) -> const auto& { return r.informativeness; }, in[d]);
    for (std::size_t e = 0; e < raw.size(); ++e) out[e].informativeness[d] = col[e];
  }
  return out;
}

inline std::vector<FeatureVector> extract_day_features(const DayFeatureInput& in,
                                                       const FeatureResources& res) {
  return normalize_day_features(extract_raw_day_features(in, res), in.event_id, in.day,
                                in.prev_docset == nullptr);
}

/// Feature dump: entity_key, event_id, day, then one column per feature.
inline void write_feature_tsv(std::ostream& out, const std::vector<FeatureVector>& rows) {
  out << "entity_key\tevent_id\tday";
  for (const auto& n : salience_feature_names()) out << "\ts:" << n;
  for (const auto& n : informativeness_feature_names()) out << "\ti:" << n;
  out << '\n';
  char buf[32];
  for (const auto& r : rows) {
    out << r.entity_key << '\t' << r.event_id << '\t' << r.day.str();
    for (double v : r.salience) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << '\t' << buf;
    }
    for (double v : r.informativeness) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << '\t' << buf;
    }
    out << '\n';
  }
}

inline std::vector<FeatureVector> read_feature_tsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) header.push_back(col);
  }
  std::size_t m = 0, n = 0;
  for (std::size_t i = 3; i < header.size(); ++i) (header[i].rfind("s:", 0) == 0 ? m : n)++;
  if (m != salience_feature_names().size() || n != informativeness_feature_names().size()) {
    throw Error("feature file columns do not match this build's feature set");
  }
  std::vector<FeatureVector> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> cols;
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() != header.size()) throw Error("feature file line " + std::to_string(lineno) + ": wrong column count");
    FeatureVector fv;
    fv.entity_key = cols[0];
    fv.event_id = cols[1];
    fv.day = Day::parse(cols[2]);
    for (std::size_t i = 0; i < m; ++i) fv.salience.push_back(std::stod(cols[3 + i]));
    for (std::size_t i = 0; i < n; ++i) fv.informativeness.push_back(std::stod(cols[3 + m + i]));
    rows.push_back(std::move(fv));
  }
  return rows;
}

}  // namespace entl
