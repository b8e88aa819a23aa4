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


#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "entl/topics.hpp"
#include "test_util.hpp"

namespace entl {
namespace {

std::vector<TokenList> two_theme_corpus() {
  std::vector<TokenList> docs;
  std::mt19937_64 rng(3);
  const TokenList fire = {"fire", "blaze", "smoke", "flame", "burn"};
  const TokenList vote = {"vote", "ballot", "poll", "voter", "count"};
  for (int d = 0; d < 40; ++d) {
    const auto& theme = d % 2 ? fire : vote;
    TokenList doc;
    for (int i = 0; i < 20; ++i) doc.push_back(theme[rng() % theme.size()]);
    docs.push_back(doc);
  }
  return docs;
}

LdaParams small() {
  LdaParams p;
  p.topics = 2;
  p.iterations = 100;
  p.seed = 11;
  return p;
}

TEST(Lda, DistributionsSumToOne) {
  TopicModel m(small());
  m.fit(two_theme_corpus());
  std::mt19937_64 rng(1);
  const TokenList words = {"fire", "vote", "smoke", "poll", "unknown"};
  for (int trial = 0; trial < 30; ++trial) {
    TokenList t;
    int n = testing::uniform_int(rng, 0, 8);
    for (int i = 0; i < n; ++i) t.push_back(words[rng() % words.size()]);
    auto theta = m.infer(t);
    ASSERT_EQ(theta.size(), 2u);
    EXPECT_NEAR(std::accumulate(theta.begin(), theta.end(), 0.0), 1.0, 1e-12);
    for (double x : theta) EXPECT_GT(x, 0.0);
  }
  auto u = m.infer({"unknown"});
  EXPECT_DOUBLE_EQ(u[0], 0.5);
}

TEST(Lda, SeparatesThemes) {
  TopicModel m(small());
  m.fit(two_theme_corpus());
  double d = m.diversity({"fire", "smoke", "blaze"}, {"vote", "ballot", "poll"});
  EXPECT_GT(d, 1.0);
  EXPECT_LE(d, std::sqrt(2.0) + 1e-12);
  EXPECT_LT(m.diversity({"fire", "smoke"}, {"blaze", "flame"}), 0.3);
}

TEST(Lda, DeterministicForSeed) {
  TopicModel a(small()), b(small());
  a.fit(two_theme_corpus());
  b.fit(two_theme_corpus());
  TokenList t = {"fire", "vote", "burn"};
  EXPECT_EQ(a.infer(t), b.infer(t));
  EXPECT_EQ(a.infer(t), a.infer(t));
}

TEST(Lda, UnfittedOrEmptyModelFails) {
  TopicModel m(small());
  EXPECT_THROW(m.infer({"x"}), Error);
  LdaParams p = small();
  p.topics = 0;
  TopicModel bad(p);
  EXPECT_THROW(bad.fit(two_theme_corpus()), Error);
}

TEST(TopicDistance, Bounds) {
  EXPECT_DOUBLE_EQ(topic_distance({1, 0}, {0, 1}), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(topic_distance({0.5, 0.5}, {0.5, 0.5}), 0.0);
  EXPECT_THROW(topic_distance({1}, {0.5, 0.5}), Error);
}

}  // namespace
}  // namespace entl
