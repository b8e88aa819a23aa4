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

#include <random>
#include <string>
#include <vector>

#include "entl/coref.hpp"
#include "entl/features.hpp"
#include "test_util.hpp"

namespace entl::testing {

/// Two reporting days of random documents drawn from a small cast.
struct Fixture {
  std::vector<Document> docs[2];
  DocLookup lookup;
  EventDocSet sets[2];
  std::vector<EntityCluster> clusters[2];
  TopicModel topics{[] {
    LdaParams p;
    p.topics = 3;
    p.iterations = 30;
    return p;
  }()};

  explicit Fixture(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::vector<std::string> cast = {"Rick Perry", "Waco", "West Fertilizer", "Tommy Muska", "Hillcrest"};
    const std::vector<std::string> words = {"fire", "plant", "blast", "rescue", "crews", "town", "said"};
    std::vector<TokenList> all;
    for (int d = 0; d < 2; ++d) {
      for (int n = 0; n < 4; ++n) {
        std::vector<std::string> sents;
        std::vector<testing::MentionSpec> ms;
        int ns = testing::uniform_int(rng, 1, 4);
        for (int s = 0; s < ns; ++s) {
          std::string who = cast[rng() % (d == 0 ? 3 : cast.size())];
          std::string text = who;
          for (int w = 0; w < 5; ++w) text += " " + words[rng() % words.size()];
          sents.push_back(text + ".");
          ms.push_back({s, who, who == "Waco" ? EntityType::kLocation : EntityType::kPerson});
        }
        docs[d].push_back(testing::make_doc("d" + std::to_string(d) + std::to_string(n), day(4, 17 + d), sents, ms,
                                            n == 0 ? cast[0] + " visits" : ""));
      }
    }
    for (int d = 0; d < 2; ++d) {
      for (const auto& doc : docs[d]) {
        lookup[doc.doc_id] = &doc;
        all.push_back(index_terms(doc));
      }
    }
    topics.fit(all);
    for (int d = 0; d < 2; ++d) {
      sets[d].event_id = "e";
      sets[d].day = day(4, 17 + d);
      double score = 5;
      for (const auto& doc : docs[d]) sets[d].documents.emplace_back(doc.doc_id, score -= 0.5);
      clusters[d] = build_entity_clusters(sets[d], lookup);
    }
  }

  DayFeatureInput input(int d) const {
    DayFeatureInput in;
    in.event_id = "e";
    in.day = sets[d].day;
    in.docset = &sets[d];
    in.clusters = &clusters[d];
    in.query = {"fertilizer", "plant", "explosion"};
    in.expanded_query = {{"fertilizer", 1.0}, {"plant", 1.0}, {"fire", 0.5}};
    in.docs = &lookup;
    if (d == 1) {
      in.prev_docset = &sets[0];
      in.prev_clusters = &clusters[0];
    }
    return in;
  }
};

}  // namespace entl::testing
