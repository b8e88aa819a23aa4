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

// Same-day cross-document coreference. Mention labels become character
// bigram multisets; candidate pairs come from MinHash banding and are kept
// when their exact (multiset) Jaccard clears a threshold. Intra-document
// coreference chains are merged on top, and every cluster pools the
// sentences of its mentions and chain references as its contexts.

#pragma once

#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "entl/common.hpp"
#include "entl/corpus.hpp"
#include "entl/dayindex.hpp"

namespace entl {

/// Multiset of character bigrams (UTF-8 code points) of a lowercased label.
struct BigramVector {
  std::map<std::string, int> grams;

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [_, c] : grams) n += static_cast<std::size_t>(c);
    return n;
  }
  bool operator==(const BigramVector&) const = default;
};

namespace detail {

inline std::vector<std::string> code_points(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
    n = std::min(n, s.size() - i);
    out.emplace_back(s.substr(i, n));
    i += n;
  }
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

inline BigramVector bigram_vectorize(std::string_view label) {
  auto trimmed = trim(label);
  if (trimmed.empty()) throw Error("bigram_vectorize: empty label");
  auto cps = detail::code_points(to_lower(trimmed));
  BigramVector v;
  if (cps.size() == 1) {
    v.grams[cps[0]] = 1;
    return v;
  }
  for (std::size_t i = 0; i + 1 < cps.size(); ++i) ++v.grams[cps[i] + cps[i + 1]];
  return v;
}

/// Multiset Jaccard: sum of min counts over sum of max counts.
inline double jaccard(const BigramVector& a, const BigramVector& b) {
  std::size_t inter = 0, uni = 0;
  auto ia = a.grams.begin(), ib = b.grams.begin();
  while (ia != a.grams.end() || ib != b.grams.end()) {
    if (ib == b.grams.end() || (ia != a.grams.end() && ia->first < ib->first)) {
      uni += static_cast<std::size_t>(ia->second);
      ++ia;
    } else if (ia == a.grams.end() || ib->first < ia->first) {
      uni += static_cast<std::size_t>(ib->second);
      ++ib;
    } else {
      inter += static_cast<std::size_t>(std::min(ia->second, ib->second));
      uni += static_cast<std::size_t>(std::max(ia->second, ib->second));
      ++ia;
      ++ib;
    }
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct LshParams {
  int num_hashes = 64;
  int bands = 16;
  int rows = 4;
  double jaccard_threshold = 0.6;
  std::uint64_t seed = 42;
};

/// MinHash signature. Each multiset element is expanded to (gram, k) for its
/// k-th occurrence so that set MinHash estimates the multiset Jaccard.
inline std::vector<std::uint64_t> minhash_signature(const BigramVector& v, const LshParams& p) {
  std::vector<std::uint64_t> sig(static_cast<std::size_t>(p.num_hashes),
                                 std::numeric_limits<std::uint64_t>::max());
  for (const auto& [gram, count] : v.grams) {
    for (int k = 0; k < count; ++k) {
      std::uint64_t base = stable_hash(gram) ^ mix_seed(static_cast<std::uint64_t>(k) + 1);
      for (int h = 0; h < p.num_hashes; ++h) {
        std::uint64_t x = mix_seed(base ^ mix_seed(p.seed * 1000003ULL + static_cast<std::uint64_t>(h)));
        auto& slot = sig[static_cast<std::size_t>(h)];
        slot = std::min(slot, x);
      }
    }
  }
  return sig;
}

struct LshItem {
  std::string label;
  EntityType etype = EntityType::kPerson;
  Day day;
};

/// Groups of item indices, each group ascending, groups ordered by their
/// smallest index.
using Partition = std::vector<std::vector<std::size_t>>;

inline Partition partition_from(detail::UnionFind& uf, std::size_t n) {
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[uf.find(i)].push_back(i);
  Partition out;
  for (auto& [_, g] : groups) out.push_back(std::move(g));
  std::sort(out.begin(), out.end());
  return out;
}

/// LSH clustering of mention labels. Items only ever merge with items of the
/// same day and entity type.
inline Partition lsh_cluster(const std::vector<LshItem>& items, const LshParams& p = {}) {
  if (p.bands * p.rows > p.num_hashes) throw Error("lsh_cluster: bands * rows > num_hashes");
  std::vector<BigramVector> vecs;
  vecs.reserve(items.size());
  for (const auto& it : items) vecs.push_back(bigram_vectorize(it.label));

  detail::UnionFind uf(items.size());
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto sig = minhash_signature(vecs[i], p);
    for (int b = 0; b < p.bands; ++b) {
      std::uint64_t key = mix_seed(static_cast<std::uint64_t>(b) + 0x51ed27ULL);
      key = mix_seed(key ^ static_cast<std::uint64_t>(items[i].etype));
      key = mix_seed(key ^ static_cast<std::uint64_t>(items[i].day.value().time_since_epoch().count()));
      for (int r = 0; r < p.rows; ++r) key = mix_seed(key ^ sig[static_cast<std::size_t>(b * p.rows + r)]);
      buckets[key].push_back(i);
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> checked;
  for (const auto& [_, members] : buckets) {
    for (std::size_t x = 0; x < members.size(); ++x) {
      for (std::size_t y = x + 1; y < members.size(); ++y) {
        std::size_t a = members[x], b = members[y];
        if (items[a].etype != items[b].etype || items[a].day != items[b].day) continue;
        if (uf.find(a) == uf.find(b)) continue;
        if (!checked.emplace(std::min(a, b), std::max(a, b)).second) continue;
        if (jaccard(vecs[a], vecs[b]) >= p.jaccard_threshold) uf.unite(a, b);
      }
    }
  }
  return partition_from(uf, items.size());
}

struct ContextRef {
  std::string doc_id;
  int sentence_index = 0;
  std::string text;
  Day day;
  double doc_score = 0.0;
  /// The mention anchoring this context (a cluster mention when one lies in
  /// the sentence, else the chain reference that pulled the sentence in).
  Mention anchor;
};

struct EntityCluster {
  std::string entity_key;
  EntityType etype = EntityType::kPerson;
  Day day;
  std::set<std::string> labels;
  std::vector<Mention> mentions;
  std::vector<ContextRef> contexts;
};

/// Canonical key: the most frequent lowercased surface, ties to the
/// lexicographically smallest.
inline std::string canonical_key(const std::vector<Mention>& mentions) {
  std::map<std::string, int> freq;
  for (const auto& m : mentions) ++freq[to_lower(trim(m.surface))];
  std::string best;
  int best_n = -1;
  for (const auto& [s, n] : freq) {
    if (n > best_n) {
      best = s;
      best_n = n;
    }
  }
  return best;
}

using DocLookup = std::unordered_map<std::string, const Document*>;

/// Entity clusters for one (event, day): LSH groups over the mentions of the
/// retrieved documents, closed under intra-document chains. Contexts follow
/// docset rank, then sentence order within a document.
inline std::vector<EntityCluster> build_entity_clusters(const EventDocSet& docset,
                                                        const DocLookup& docs,
                                                        const LshParams& params = {}) {
  struct Slot {
    const Document* doc;
    std::size_t doc_rank;
    const Mention* mention;
  };
  std::vector<Slot> slots;
  std::map<std::string, std::size_t> rank;
  for (std::size_t r = 0; r < docset.documents.size(); ++r) {
    auto it = docs.find(docset.documents[r].first);
    if (it == docs.end()) throw Error("docset references unknown document " + docset.documents[r].first);
    const Document* d = it->second;
    if (d->date != docset.day) continue;
    rank[d->doc_id] = r;
    for (const auto& m : d->mentions) slots.push_back({d, r, &m});
  }
  std::vector<LshItem> items;
  for (const auto& s : slots) items.push_back({s.mention->surface, s.mention->etype, s.doc->date});
  auto groups = lsh_cluster(items, params);

  detail::UnionFind uf(slots.size());
  for (const auto& g : groups) {
    for (std::size_t i = 1; i < g.size(); ++i) uf.unite(g[0], g[i]);
  }
  std::map<std::tuple<std::string, std::string, EntityType>, std::size_t> chain_head;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto& m = *slots[i].mention;
    if (!m.chain_id) continue;
    auto [it, fresh] = chain_head.emplace(std::make_tuple(m.doc_id, *m.chain_id, m.etype), i);
    if (!fresh) uf.unite(it->second, i);
  }
  auto merged = partition_from(uf, slots.size());

  std::map<std::pair<std::string, std::string>, std::vector<const Mention*>> chain_members;
  for (const auto& s : slots) {
    if (s.mention->chain_id) chain_members[{s.doc->doc_id, *s.mention->chain_id}].push_back(s.mention);
  }

  std::vector<EntityCluster> clusters;
  for (const auto& g : merged) {
    EntityCluster c;
    c.day = docset.day;
    c.etype = slots[g.front()].mention->etype;
    std::map<std::tuple<std::size_t, int>, const Mention*> ctx;  // (doc rank, sentence) -> anchor
    std::set<std::pair<std::string, int>> own;
    for (auto i : g) {
      const Mention& m = *slots[i].mention;
      c.mentions.push_back(m);
      c.labels.insert(m.surface);
      own.emplace(m.doc_id, m.sentence_index);
      ctx[{slots[i].doc_rank, m.sentence_index}] = &m;
    }
    for (auto i : g) {
      const Mention& m = *slots[i].mention;
      if (!m.chain_id) continue;
      for (const Mention* ref : chain_members[{m.doc_id, *m.chain_id}]) {
        ctx.emplace(std::make_tuple(rank.at(ref->doc_id), ref->sentence_index), ref);
      }
    }
    for (const auto& [key, anchor] : ctx) {
      const auto& [r, sent] = key;
      const Document* d = docs.at(docset.documents[r].first);
      c.contexts.push_back({d->doc_id, sent, d->sentences[static_cast<std::size_t>(sent)].text,
                            d->date, docset.documents[r].second, *anchor});
    }
    c.entity_key = canonical_key(c.mentions);
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(), [](const EntityCluster& a, const EntityCluster& b) {
    if (a.entity_key != b.entity_key) return a.entity_key < b.entity_key;
    if (a.etype != b.etype) return a.etype < b.etype;
    return a.mentions.front().mention_id < b.mentions.front().mention_id;
  });
  // Keys must be unique within a day; later duplicates get a suffix.
  std::map<std::string, int> seen;
  for (auto& c : clusters) {
    int n = seen[c.entity_key]++;
    if (n > 0) c.entity_key += "#" + std::to_string(n + 1);
  }
  return clusters;
}

inline nlohmann::json cluster_to_json(const EntityCluster& c, const std::string& event_id) {
  nlohmann::json j;
  j["event_id"] = event_id;
  j["day"] = c.day.str();
  j["entity_key"] = c.entity_key;
  j["etype"] = to_string(c.etype);
  j["labels"] = c.labels;
  auto& ms = j["mentions"] = nlohmann::json::array();
  for (const auto& m : c.mentions) ms.push_back({{"mention_id", m.mention_id}, {"doc_id", m.doc_id}});
  auto& cs = j["contexts"] = nlohmann::json::array();
  for (const auto& x : c.contexts) {
    cs.push_back({{"doc_id", x.doc_id},
                  {"sentence_index", x.sentence_index},
                  {"text", x.text},
                  {"doc_score", x.doc_score},
                  {"anchor", x.anchor.mention_id}});
  }
  return j;
}

/// Rebuilds a cluster from its dump; mentions and anchors are resolved
/// against the loaded documents.
inline EntityCluster cluster_from_json(const nlohmann::json& j, const DocLookup& docs) {
  auto find_mention = [&](const std::string& doc_id, const std::string& mid) -> const Mention& {
    const Document* d = docs.at(doc_id);
    for (const auto& m : d->mentions) {
      if (m.mention_id == mid) return m;
    }
    throw Error("cluster references unknown mention " + mid);
  };
  EntityCluster c;
  c.entity_key = j.at("entity_key").get<std::string>();
  c.etype = *parse_entity_type(j.at("etype").get<std::string>());
  c.day = Day::parse(j.at("day").get<std::string>());
  c.labels = j.at("labels").get<std::set<std::string>>();
  for (const auto& m : j.at("mentions")) {
    c.mentions.push_back(find_mention(m.at("doc_id").get<std::string>(), m.at("mention_id").get<std::string>()));
  }
  for (const auto& x : j.at("contexts")) {
    ContextRef r;
    r.doc_id = x.at("doc_id").get<std::string>();
    r.sentence_index = x.at("sentence_index").get<int>();
    r.text = x.at("text").get<std::string>();
    r.day = c.day;
    r.doc_score = x.at("doc_score").get<double>();
    r.anchor = find_mention(r.doc_id, x.at("anchor").get<std::string>());
    c.contexts.push_back(std::move(r));
  }
  return c;
}

}  // namespace entl
