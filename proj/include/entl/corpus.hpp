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

// Data model for events, annotated documents, entity mentions and reporting
// timelines, plus the JSONL/JSON readers for corpus and events files.

#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entl/common.hpp"
#include "entl/text.hpp"

namespace entl {

enum class EntityType { kPerson, kLocation, kOrganization };

inline std::string to_string(EntityType t) {
  switch (t) {
    case EntityType::kPerson: return "PERSON";
    case EntityType::kLocation: return "LOCATION";
    case EntityType::kOrganization: return "ORGANIZATION";
  }
  return "?";
}

inline std::optional<EntityType> parse_entity_type(std::string_view s) {
  if (s == "PERSON") return EntityType::kPerson;
  if (s == "LOCATION") return EntityType::kLocation;
  if (s == "ORGANIZATION") return EntityType::kOrganization;
  return std::nullopt;
}

struct Token {
  std::string surface;
  std::string lemma;  // lowercased at ingest
  std::string pos;    // empty when the annotator gave none
  bool operator==(const Token&) const = default;
};

struct Sentence {
  int index = 0;
  std::string text;
  std::vector<Token> tokens;
  /// Byte offset of each token's surface in `text`, recovered at ingest by
  /// left-to-right alignment. Tokens that cannot be aligned inherit the
  /// previous offset.
  std::vector<std::size_t> token_offsets;
  bool operator==(const Sentence&) const = default;
};

struct Mention {
  std::string mention_id;
  std::string doc_id;
  int sentence_index = 0;
  std::size_t start = 0;  // byte span within the sentence text
  std::size_t end = 0;
  std::string surface;
  EntityType etype = EntityType::kPerson;
  std::optional<std::string> chain_id;
  bool in_title = false;
  bool operator==(const Mention&) const = default;
};

struct Document {
  std::string doc_id;
  Day date;
  std::string title;
  std::vector<Sentence> sentences;
  std::vector<Mention> mentions;
  double retrieval_score = 0.0;
  bool operator==(const Document&) const = default;
};

struct Event {
  std::string event_id;
  std::vector<std::string> query_terms;
  std::vector<std::pair<std::string, double>> expanded_terms;
  Day first_day;
  Day last_day;
  std::string category;
  /// Days judged as actually reporting on the event. Empty means "all".
  std::vector<Day> relevant_days;
};

struct ReportingTimeline {
  std::string event_id;
  std::vector<Day> days;
};

/// A record that is well-formed but cannot be accepted (e.g. unknown etype).
class RejectedRecord : public Error {
 public:
  using Error::Error;
};

struct LoadReport {
  std::size_t documents = 0;
  std::size_t dropped_mentions = 0;
  std::size_t rejected_records = 0;
  std::vector<std::string> warnings;
};

/// Mention filter: the surface must contain a letter and must not consist
/// solely of stopwords.
inline bool keep_mention_surface(std::string_view surface,
                                 const TermSet& stopwords = default_stopwords()) {
  if (!has_alpha(surface)) return false;
  auto words = split_words(surface);
  return std::any_of(words.begin(), words.end(),
                     [&](const std::string& w) { return !stopwords.contains(w); });
}

namespace detail {

inline std::vector<std::size_t> align_tokens(const std::string& text,
                                             const std::vector<Token>& tokens) {
  std::vector<std::size_t> offsets;
  offsets.reserve(tokens.size());
  std::size_t cursor = 0;
  for (const auto& tok : tokens) {
    auto pos = tok.surface.empty() ? std::string::npos : text.find(tok.surface, cursor);
    if (pos == std::string::npos) {
      offsets.push_back(cursor);
    } else {
      offsets.push_back(pos);
      cursor = pos + tok.surface.size();
    }
  }
  return offsets;
}

}  // namespace detail

/// Parses one corpus record. Throws Error on schema violations. Mentions
/// failing keep_mention_surface are dropped and counted in `dropped`.
inline Document parse_document(const nlohmann::json& j, std::size_t& dropped,
                               const TermSet& stopwords = default_stopwords()) {
  Document doc;
  doc.doc_id = j.at("doc_id").get<std::string>();
  doc.date = Day::parse(j.at("date").get<std::string>());
  doc.title = j.value("title", std::string());
  if (j.contains("retrieval_score")) doc.retrieval_score = j["retrieval_score"].get<double>();
  for (const auto& js : j.at("sentences")) {
    Sentence s;
    s.index = js.at("index").get<int>();
    s.text = js.at("text").get<std::string>();
    for (const auto& jt : js.value("tokens", nlohmann::json::array())) {
      if (!jt.is_array() || jt.size() < 2) throw Error("token must be [surface, lemma, pos?]");
      Token t{jt[0].get<std::string>(), to_lower(jt[1].get<std::string>()), ""};
      if (jt.size() > 2 && !jt[2].is_null()) t.pos = jt[2].get<std::string>();
      s.tokens.push_back(std::move(t));
    }
    if (s.index != static_cast<int>(doc.sentences.size())) {
      throw Error("sentence indices must be contiguous from 0 in " + doc.doc_id);
    }
    if (s.tokens.empty() && !trim(s.text).empty()) {
      throw Error("sentence " + std::to_string(s.index) + " of " + doc.doc_id +
                  " has text but no tokens");
    }
    s.token_offsets = detail::align_tokens(s.text, s.tokens);
    doc.sentences.push_back(std::move(s));
  }
  for (const auto& jm : j.value("mentions", nlohmann::json::array())) {
    Mention m;
    m.mention_id = jm.at("mention_id").get<std::string>();
    m.doc_id = doc.doc_id;
    m.sentence_index = jm.at("sentence_index").get<int>();
    m.start = jm.at("start").get<std::size_t>();
    m.end = jm.at("end").get<std::size_t>();
    m.surface = jm.at("surface").get<std::string>();
    auto et = parse_entity_type(jm.at("etype").get<std::string>());
    if (!et) throw RejectedRecord("unknown etype '" + jm.at("etype").get<std::string>() + "'");
    m.etype = *et;
    if (jm.contains("chain_id") && !jm["chain_id"].is_null()) {
      m.chain_id = jm["chain_id"].get<std::string>();
    }
    m.in_title = jm.value("in_title", false);
    if (m.sentence_index < 0 || m.sentence_index >= static_cast<int>(doc.sentences.size())) {
      throw Error("mention " + m.mention_id + " references missing sentence");
    }
    const auto& text = doc.sentences[static_cast<std::size_t>(m.sentence_index)].text;
    if (m.start > m.end || m.end > text.size()) {
      throw Error("mention " + m.mention_id + " span outside sentence text");
    }
    if (!keep_mention_surface(m.surface, stopwords)) {
      ++dropped;
      continue;
    }
    doc.mentions.push_back(std::move(m));
  }
  return doc;
}

inline nlohmann::json document_to_json(const Document& doc) {
  nlohmann::json j;
  j["doc_id"] = doc.doc_id;
  j["date"] = doc.date.str();
  j["title"] = doc.title;
  auto& sents = j["sentences"] = nlohmann::json::array();
  for (const auto& s : doc.sentences) {
    nlohmann::json toks = nlohmann::json::array();
    for (const auto& t : s.tokens) {
      if (t.pos.empty()) {
        toks.push_back({t.surface, t.lemma});
      } else {
        toks.push_back({t.surface, t.lemma, t.pos});
      }
    }
    sents.push_back({{"index", s.index}, {"text", s.text}, {"tokens", std::move(toks)}});
  }
  auto& ments = j["mentions"] = nlohmann::json::array();
  for (const auto& m : doc.mentions) {
    nlohmann::json jm = {{"mention_id", m.mention_id},   {"sentence_index", m.sentence_index},
                         {"start", m.start},             {"end", m.end},
                         {"surface", m.surface},         {"etype", to_string(m.etype)},
                         {"in_title", m.in_title}};
    if (m.chain_id) jm["chain_id"] = *m.chain_id;
    ments.push_back(std::move(jm));
  }
  return j;
}

/// Reads a corpus JSONL file. A line that is not valid JSON, or that violates
/// the record schema, fails the load with its line number. A record with an
/// unknown entity type is rejected (skipped and counted).
inline std::vector<Document> load_corpus(const std::string& path, LoadReport* report = nullptr,
                                         const TermSet& stopwords = default_stopwords()) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus: " + path);
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  std::vector<Document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
    std::size_t dropped = 0;
    try {
      docs.push_back(parse_document(j, dropped, stopwords));
      rep.dropped_mentions += dropped;
    } catch (const RejectedRecord& e) {
      ++rep.rejected_records;
      rep.warnings.push_back(path + ":" + std::to_string(lineno) + ": rejected: " + e.what());
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  rep.documents = docs.size();
  std::stable_sort(docs.begin(), docs.end(),
                   [](const Document& a, const Document& b) { return a.date < b.date; });
  return docs;
}

/// Query terms: lowercased words of the query minus stopwords.
inline std::vector<std::string> query_terms_of(std::string_view query,
                                               const TermSet& stopwords = default_stopwords()) {
  std::vector<std::string> out;
  for (auto& w : split_words(query)) {
    auto lw = to_lower(w);
    if (stopwords.contains(lw)) continue;
    if (std::find(out.begin(), out.end(), lw) == out.end()) out.push_back(lw);
  }
  return out;
}

inline std::vector<Event> parse_events(const nlohmann::json& arr) {
  if (!arr.is_array()) throw Error("events file must hold a JSON array");
  std::vector<Event> events;
  for (const auto& j : arr) {
    Event e;
    e.event_id = j.at("event_id").get<std::string>();
    e.query_terms = query_terms_of(j.at("query").get<std::string>());
    if (e.query_terms.empty()) throw Error("event " + e.event_id + " has no query terms");
    e.first_day = Day::parse(j.at("first_day").get<std::string>());
    e.last_day = Day::parse(j.at("last_day").get<std::string>());
    if (e.last_day < e.first_day) throw Error("event " + e.event_id + " has empty date range");
    e.category = j.value("category", std::string());
    for (const auto& d : j.value("relevant_days", nlohmann::json::array())) {
      e.relevant_days.push_back(Day::parse(d.get<std::string>()));
    }
    events.push_back(std::move(e));
  }
  return events;
}

inline std::vector<Event> load_events(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open events file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": malformed JSON: " + e.what());
  }
  return parse_events(j);
}

/// Relevance flags for every day of the event range, taken from the event's
/// relevant_days (all true when the list is empty).
inline std::map<Day, bool> relevance_flags(const Event& event) {
  std::map<Day, bool> flags;
  for (Day d = event.first_day; d <= event.last_day; d = d + 1) {
    flags[d] = event.relevant_days.empty() ||
               std::find(event.relevant_days.begin(), event.relevant_days.end(), d) !=
                   event.relevant_days.end();
  }
  return flags;
}

/// Days within the event range that have at least one document and are
/// flagged relevant, ascending. A day without a flag counts as not relevant.
inline ReportingTimeline build_reporting_timeline(const Event& event,
                                                  const std::map<Day, std::size_t>& docs_per_day,
                                                  const std::map<Day, bool>& flags) {
  ReportingTimeline tl{event.event_id, {}};
  for (const auto& [day, count] : docs_per_day) {
    if (count == 0 || day < event.first_day || day > event.last_day) continue;
    auto it = flags.find(day);
    if (it != flags.end() && it->second) tl.days.push_back(day);
  }
  return tl;
}

}  // namespace entl
