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


#include <random>

#include <gtest/gtest.h>

#include "entl/timeline.hpp"
#include "metric_oracle.hpp"
#include "test_util.hpp"

namespace entl {
namespace {

using testing::day;

TEST(Metrics, HandExamples) {
  Grades g = {{"a", 4}, {"b", 1}, {"c", 3}, {"d", 2}};
  std::vector<std::string> r = {"a", "b", "c"};
  EXPECT_DOUBLE_EQ(precision_at_k(r, g, 2), 0.5);
  EXPECT_DOUBLE_EQ(precision_at_k(r, g, 10), 0.2);
  // Relevant at ranks 1 and 3: (1 + 2/3) / 2.
  EXPECT_DOUBLE_EQ(average_precision(r, g), (1.0 + 2.0 / 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(average_precision(r, Grades{{"x", 4}}), 0.0);
  EXPECT_DOUBLE_EQ(average_precision(r, Grades{}), 0.0);
  EXPECT_DOUBLE_EQ(ndcg({"a", "c", "d", "b"}, g, 10), 1.0);
  EXPECT_DOUBLE_EQ(ndcg(r, Grades{{"a", 1}}, 10), 0.0);
  // Top 2 are {a, b}; b was shown yesterday, a is new and relevant.
  EXPECT_DOUBLE_EQ(srdp(r, g, {"b"}, 2), 1.0);
  EXPECT_DOUBLE_EQ(srdp({"b", "d"}, g, {}, 2), 0.0);
  EXPECT_DOUBLE_EQ(srdp({"a", "d"}, g, {}, 2), 0.5);
  EXPECT_DOUBLE_EQ(srdp(r, g, {"a", "b"}, 2), 0.0);
  EXPECT_THROW(precision_at_k(r, g, 0), Error);
  EXPECT_THROW(ndcg(r, g, 0), Error);
  EXPECT_THROW(srdp(r, g, {}, 0), Error);
  EXPECT_EQ(ndcg_gain(0), 0.0);
  EXPECT_EQ(ndcg_gain(4), 7.0);
}

TEST(Metrics, MatchBruteForceReference) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    auto rc = testing::random_ranking_case(rng);
    EXPECT_NEAR(precision_at_k(rc.ranked, rc.grades, rc.k, rc.threshold), testing::oracle_precision(rc), 1e-12);
    EXPECT_NEAR(average_precision(rc.ranked, rc.grades, rc.threshold), testing::oracle_average_precision(rc), 1e-12);
    EXPECT_NEAR(ndcg(rc.ranked, rc.grades, rc.k), testing::oracle_ndcg(rc), 1e-12);
    EXPECT_NEAR(srdp(rc.ranked, rc.grades, rc.previous, rc.k, rc.threshold), testing::oracle_srdp(rc), 1e-12);
  }
}

TEST(Metrics, BoundedAndMonotoneUnderPromotion) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    auto rc = testing::random_ranking_case(rng);
    double p = precision_at_k(rc.ranked, rc.grades, rc.k, rc.threshold);
    double ap = average_precision(rc.ranked, rc.grades, rc.threshold);
    for (double v : {p, ap, ndcg(rc.ranked, rc.grades, rc.k), srdp(rc.ranked, rc.grades, rc.previous, rc.k)}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    for (std::size_t i = 1; i < rc.ranked.size(); ++i) {
      if (!testing::oracle_relevant(rc, rc.ranked[i])) continue;
      auto up = rc.ranked;
      std::swap(up[i - 1], up[i]);
      EXPECT_GE(precision_at_k(up, rc.grades, rc.k, rc.threshold), p - 1e-15);
      EXPECT_GE(average_precision(up, rc.grades, rc.threshold), ap - 1e-15);
    }
  }
}

JointModel linear_model(RankMode mode = RankMode::kNoAdapt) {
  JointModel m;
  m.mode = mode;
  m.omega_s = {1.0};
  m.omega_i = {0.5};
  return m;
}

FeatureVector fv(const std::string& key, double s, double i) {
  FeatureVector f;
  f.entity_key = key;
  f.salience = {s};
  f.informativeness = {i};
  return f;
}

TEST(RankDay, SortsByScoreThenKey) {
  std::vector<FeatureVector> fs = {fv("b", 0.5, 0), fv("a", 0.5, 0), fv("c", 0.9, 0), fv("d", 0.1, 0.2)};
  auto r = rank_day("e", day(4, 15), linear_model(), fs, std::nullopt, {{"c", {"C did it.", "doc1"}}});
  EXPECT_EQ(r.keys(), (std::vector<std::string>{"c", "a", "b", "d"}));
  EXPECT_EQ(r.entities[0].sentence, "C did it.");
  EXPECT_EQ(r.entities[0].doc_id, "doc1");
  EXPECT_DOUBLE_EQ(r.entities[3].score, 0.2);
  EXPECT_EQ(rank_day("e", day(4, 15), linear_model(), fs, std::nullopt, {}, 2).entities.size(), 2u);
  EXPECT_TRUE(rank_day("e", day(4, 15), linear_model(), {}, 1).entities.empty());
  fs.push_back(fv("a", 0, 0));
  EXPECT_THROW(rank_day("e", day(4, 15), linear_model(), fs, std::nullopt), Error);
}

TEST(RankDay, MatchesBruteForceOrder) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<FeatureVector> fs;
    for (int e = 0; e < 5; ++e) {
      fs.push_back(fv(std::string(1, static_cast<char>('a' + e)), testing::uniform_int(rng, 0, 3) * 0.25,
                      testing::uniform_int(rng, 0, 3) * 0.25));
    }
    auto got = rank_day("e", day(4, 15), linear_model(), fs, std::nullopt).keys();
    // Reference: a permutation is correct iff no adjacent pair is out of
    // order; scan all 120 permutations for the unique such one.
    std::vector<std::size_t> perm = {0, 1, 2, 3, 4};
    std::vector<std::string> want;
    do {
      bool ok = true;
      for (std::size_t i = 0; i + 1 < perm.size() && ok; ++i) {
        const auto& x = fs[perm[i]];
        const auto& y = fs[perm[i + 1]];
        double sx = x.salience[0] + 0.5 * x.informativeness[0], sy = y.salience[0] + 0.5 * y.informativeness[0];
        ok = sx > sy || (sx == sy && x.entity_key < y.entity_key);
      }
      if (ok) {
        for (auto p : perm) want.push_back(fs[p].entity_key);
        break;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_EQ(got, want);
  }
}

TEST(RankDay, AdaptiveCoefficients) {
  JointModel m = linear_model(RankMode::kAdaptER);
  m.adaptation.salience = {{0.5, 0.0}, 1.0};
  m.adaptation.informativeness = {{0.0, 0.0}, 1.0};
  std::vector<FeatureVector> fs = {fv("a", 0.5, 0.5), fv("b", 0.5, 0.5)};
  auto r = rank_day("e", day(4, 16), m, fs, 1);
  EXPECT_DOUBLE_EQ(r.s_score, 1.0);
  EXPECT_DOUBLE_EQ(r.i_score, 0.75);
  EXPECT_DOUBLE_EQ(r.gamma, 0.25);
  EXPECT_DOUBLE_EQ(r.entities[0].score, 0.5 + 0.25 * 0.75 * 0.25);
  auto first = rank_day("e", day(4, 15), m, fs, std::nullopt);
  EXPECT_DOUBLE_EQ(first.gamma, 1.0);
}

TEST(Judgments, LoadAndValidate) {
  testing::TempDir tmp;
  auto j = load_judgments(tmp.file("j.tsv", "obama\te\t2013-04-15\t4\n\nbiden\te\t2013-04-15\t1\n"));
  EXPECT_EQ(j.grades("e", day(4, 15)).size(), 2u);
  EXPECT_EQ(j.grades("e", day(4, 15)).at("obama"), 4);
  EXPECT_TRUE(j.grades("e", day(4, 16)).empty());
  EXPECT_THROW(load_judgments(tmp.file("bad.tsv", "obama\te\t2013-04-15\t7\n")), Error);
  EXPECT_THROW(load_judgments(tmp.file("short.tsv", "obama\te\n")), Error);
  EXPECT_TRUE(load_judgments(tmp.file("empty.tsv", "")).empty());
}

TEST(Evaluate, PreviousDayFeedsSerendipity) {
  EntityTimeline tl;
  tl.event_id = "e";
  RankedDay d1, d2;
  d1.day = day(4, 15);
  d1.entities = {{"a", 2, "", ""}, {"b", 1, "", ""}};
  d2.day = day(4, 17);
  d2.entities = {{"a", 2, "", ""}, {"c", 1, "", ""}};
  tl.days = {d1, d2};
  Judgments j;
  j.add("e", d1.day, "a", 4);
  j.add("e", d2.day, "a", 4);
  j.add("e", d2.day, "c", 3);
  auto row = evaluate("sys", {tl}, j);
  EXPECT_EQ(row.queries, 2u);
  EXPECT_DOUBLE_EQ(row.p1, 1.0);
  EXPECT_DOUBLE_EQ(row.map, 1.0);
  // SRDP@1: a is new on day 1, seen again on day 2.
  EXPECT_DOUBLE_EQ(row.srdp1, (1.0 + 0.0) / 2.0);
  // SRDP@3: day 1 has a, b new with one relevant; day 2 only c, relevant.
  EXPECT_DOUBLE_EQ(row.srdp3, (0.5 + 1.0) / 2.0);
  std::stringstream ss;
  write_metric_table(ss, {row});
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "system\tP@1\tP@3\tP@10\tMAP\tNDCG@10\tSRDP@1\tSRDP@3\tSRDP@10");
  EXPECT_NE(ss.str().find("sys\t1.0000"), std::string::npos);
}

TEST(TimelineJson, RoundTripAndValidation) {
  EntityTimeline tl;
  tl.event_id = "e";
  RankedDay d;
  d.day = day(4, 15);
  d.entities = {{"a", 0.9, "A.", "d1"}, {"b", 0.4, "B.", "d2"}};
  tl.days = {d};
  auto j = timeline_to_json(tl);
  EXPECT_TRUE(validate_timeline_json(j).empty());
  auto back = timeline_from_json(j);
  EXPECT_EQ(timeline_to_json(back), j);

  auto bad = j;
  bad["days"][0]["entities"][1]["score"] = 1.5;
  EXPECT_EQ(validate_timeline_json(bad).size(), 1u);
  bad = j;
  bad["days"][0]["entities"][1]["key"] = "a";
  EXPECT_EQ(validate_timeline_json(bad).size(), 1u);
  bad = j;
  bad["days"][0]["day"] = "April";
  EXPECT_EQ(validate_timeline_json(bad).size(), 1u);
  bad = j;
  bad["days"][0]["entities"][0].erase("sentence");
  EXPECT_EQ(validate_timeline_json(bad).size(), 1u);
  EXPECT_FALSE(validate_timeline_json(nlohmann::json::array()).empty());
}

TEST(Support, HighestScoringDocumentWins) {
  EntityCluster c;
  c.entity_key = "x";
  ContextRef lo, hi, tie;
  lo.text = "low";
  lo.doc_id = "d1";
  lo.doc_score = 1.0;
  hi.text = "high";
  hi.doc_id = "d2";
  hi.doc_score = 3.0;
  tie = hi;
  tie.text = "same";
  lo.text = "a much longer sentence";
  c.contexts = {lo, hi, tie};
  auto s = supporting_contexts({c});
  EXPECT_EQ(s.at("x").sentence, "high");
  EXPECT_EQ(s.at("x").doc_id, "d2");
  // Longest sentence of the best document.
  ContextRef longer = hi;
  longer.text = "higher still";
  c.contexts.push_back(longer);
  EXPECT_EQ(supporting_contexts({c}).at("x").sentence, "higher still");
}

}  // namespace
}  // namespace entl
