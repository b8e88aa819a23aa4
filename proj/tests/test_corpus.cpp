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

#include "entl/corpus.hpp"
#include "test_util.hpp"

namespace entl {
namespace {

using testing::TempDir;

std::string record(const std::string& id, const std::string& date, const std::string& surface = "Obama",
                   const std::string& etype = "PERSON") {
  nlohmann::json j = {
      {"doc_id", id},
      {"date", date},
      {"title", "t"},
      {"sentences", {{{"index", 0}, {"text", "Obama spoke ..."}, {"tokens", {{"Obama", "obama", "NNP"}, {"spoke", "speak"}}}}}},
      {"mentions", {{{"mention_id", id + "-0"}, {"sentence_index", 0}, {"start", 0}, {"end", 5}, {"surface", surface},
                     {"etype", etype}}}}};
  return j.dump() + "\n";
}

TEST(Day, ParsesAndFormats) {
  auto d = Day::parse("2013-04-15");
  EXPECT_EQ(d.str(), "2013-04-15");
  EXPECT_EQ(Day::parse("2013-04-15T10:22:00Z"), d);
  EXPECT_EQ((d + 17).str(), "2013-05-02");
  EXPECT_EQ((d + 3).days_since(d), 3);
  EXPECT_THROW(Day::parse("2013/04/15"), Error);
  EXPECT_THROW(Day::parse("2013-02-30"), Error);
}

TEST(LoadCorpus, EmptyFileGivesEmptyCollection) {
  TempDir tmp;
  LoadReport rep;
  auto docs = load_corpus(tmp.file("c.jsonl", ""), &rep);
  EXPECT_TRUE(docs.empty());
  EXPECT_EQ(rep.dropped_mentions, 0u);
}

TEST(LoadCorpus, PunctuationOnlyMentionIsDropped) {
  TempDir tmp;
  LoadReport rep;
  auto docs = load_corpus(tmp.file("c.jsonl", record("a", "2013-04-15", "...")), &rep);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_TRUE(docs[0].mentions.empty());
  EXPECT_EQ(rep.dropped_mentions, 1u);
}

TEST(LoadCorpus, TwoDocumentsOrderedByDate) {
  TempDir tmp;
  auto docs = load_corpus(tmp.file("c.jsonl", record("b", "2013-04-16") + record("a", "2013-04-15")));
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].date.str(), "2013-04-15");
  EXPECT_EQ(docs[1].date.str(), "2013-04-16");
  EXPECT_EQ(docs[0].sentences[0].tokens[0].lemma, "obama");
  EXPECT_EQ(docs[0].mentions[0].etype, EntityType::kPerson);
}

TEST(LoadCorpus, MalformedLineReportsLineNumber) {
  TempDir tmp;
  auto path = tmp.file("c.jsonl", record("a", "2013-04-15") + "{not json\n");
  try {
    load_corpus(path);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpus, UnknownEntityTypeRejectsRecord) {
  TempDir tmp;
  LoadReport rep;
  auto docs = load_corpus(tmp.file("c.jsonl", record("a", "2013-04-15", "Obama", "MISC") + record("b", "2013-04-15")),
                          &rep);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].doc_id, "b");
  EXPECT_EQ(rep.rejected_records, 1u);
}

TEST(LoadCorpus, SchemaViolationsFail) {
  TempDir tmp;
  nlohmann::json j = nlohmann::json::parse(record("a", "2013-04-15"));
  j["sentences"][0]["index"] = 1;
  EXPECT_THROW(load_corpus(tmp.file("gap.jsonl", j.dump() + "\n")), Error);
  j = nlohmann::json::parse(record("a", "2013-04-15"));
  j["mentions"][0]["end"] = 99;
  EXPECT_THROW(load_corpus(tmp.file("span.jsonl", j.dump() + "\n")), Error);
  j = nlohmann::json::parse(record("a", "2013-04-15"));
  j["sentences"][0]["tokens"] = nlohmann::json::array();
  EXPECT_THROW(load_corpus(tmp.file("tok.jsonl", j.dump() + "\n")), Error);
  j["sentences"][0]["text"] = "   ";
  j["mentions"] = nlohmann::json::array();
  EXPECT_NO_THROW(load_corpus(tmp.file("ws.jsonl", j.dump() + "\n")));
}

TEST(LoadCorpus, IngestIsIdempotent) {
  TempDir tmp;
  auto path = tmp.file("c.jsonl", record("a", "2013-04-15") + record("b", "2013-04-16"));
  auto first = load_corpus(path);
  EXPECT_EQ(first, load_corpus(path));
  std::string round;
  for (const auto& d : first) round += document_to_json(d).dump() + "\n";
  EXPECT_EQ(first, load_corpus(tmp.file("round.jsonl", round)));
}

TEST(MentionFilter, RandomSurfacesSatisfyPredicate) {
  // Random surfaces mixing letters, digits, punctuation, stopwords and
  // multi-byte characters: every kept mention has a letter and a
  // non-stopword word.
  std::mt19937_64 rng(3);
  const std::vector<std::string> pieces = {"the", "of", "a", "...", "42", "Obama", "é", "日本", "-", " ", "and", "x"};
  TempDir tmp;
  std::string lines;
  for (int i = 0; i < 300; ++i) {
    std::string s;
    int n = testing::uniform_int(rng, 1, 4);
    for (int k = 0; k < n; ++k) s += pieces[rng() % pieces.size()] + (k + 1 < n ? " " : "");
    nlohmann::json j = nlohmann::json::parse(record("d" + std::to_string(i), "2013-04-15"));
    j["sentences"][0]["text"] = s + " said";
    j["mentions"][0]["surface"] = s;
    j["mentions"][0]["end"] = s.size();
    lines += j.dump() + "\n";
  }
  LoadReport rep;
  auto docs = load_corpus(tmp.file("c.jsonl", lines), &rep);
  std::size_t kept = 0;
  for (const auto& d : docs) {
    for (const auto& m : d.mentions) {
      ++kept;
      EXPECT_TRUE(has_alpha(m.surface)) << m.surface;
      auto words = split_words(m.surface);
      EXPECT_TRUE(std::any_of(words.begin(), words.end(),
                              [](const std::string& w) { return !default_stopwords().contains(w); }))
          << m.surface;
    }
  }
  EXPECT_EQ(kept + rep.dropped_mentions, 300u);
  EXPECT_GT(rep.dropped_mentions, 0u);
  EXPECT_GT(kept, 0u);
}

TEST(MentionFilter, Examples) {
  EXPECT_FALSE(keep_mention_surface("..."));
  EXPECT_FALSE(keep_mention_surface("1984"));
  EXPECT_FALSE(keep_mention_surface("The Of"));
  EXPECT_TRUE(keep_mention_surface("The Beatles"));
  EXPECT_FALSE(keep_mention_surface("The Who"));
  EXPECT_TRUE(keep_mention_surface("Obama"));
}

Event event_fixture(int days) {
  Event e;
  e.event_id = "e";
  e.query_terms = {"q"};
  e.first_day = testing::day(4, 1);
  e.last_day = e.first_day + (days - 1);
  return e;
}

TEST(ReportingTimeline, AllFlagsFalseIsEmpty) {
  auto e = event_fixture(3);
  std::map<Day, std::size_t> docs;
  std::map<Day, bool> flags;
  for (int i = 0; i < 3; ++i) {
    docs[e.first_day + i] = 2;
    flags[e.first_day + i] = false;
  }
  EXPECT_TRUE(build_reporting_timeline(e, docs, flags).days.empty());
}

TEST(ReportingTimeline, UnflaggedDayRemoved) {
  auto e = event_fixture(3);
  Day d1 = e.first_day, d2 = d1 + 1, d3 = d1 + 2;
  auto tl = build_reporting_timeline(e, {{d1, 1}, {d2, 1}, {d3, 1}}, {{d1, true}, {d2, false}, {d3, true}});
  EXPECT_EQ(tl.days, (std::vector<Day>{d1, d3}));
}

TEST(ReportingTimeline, EighteenDayRangeTenFlaggedDays) {
  auto e = event_fixture(18);
  std::map<Day, std::size_t> docs;
  std::map<Day, bool> flags;
  std::vector<int> flagged = {0, 1, 3, 4, 6, 9, 10, 12, 15, 17};
  for (int i = 0; i < 18; ++i) {
    docs[e.first_day + i] = (i == 5 ? 0 : 3);
    flags[e.first_day + i] = std::find(flagged.begin(), flagged.end(), i) != flagged.end();
  }
  // A day outside the event range never enters the timeline.
  docs[e.last_day + 1] = 4;
  flags[e.last_day + 1] = true;
  auto tl = build_reporting_timeline(e, docs, flags);
  ASSERT_EQ(tl.days.size(), 10u);
  for (std::size_t i = 0; i < flagged.size(); ++i) EXPECT_EQ(tl.days[i], e.first_day + flagged[i]);
  for (std::size_t i = 1; i < tl.days.size(); ++i) EXPECT_LT(tl.days[i - 1], tl.days[i]);
}

TEST(ReportingTimeline, DaysSubsetOfDaysWithDocuments) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto e = event_fixture(testing::uniform_int(rng, 1, 20));
    std::map<Day, std::size_t> docs;
    std::map<Day, bool> flags;
    for (Day d = e.first_day; d <= e.last_day; d = d + 1) {
      docs[d] = static_cast<std::size_t>(testing::uniform_int(rng, 0, 2));
      flags[d] = rng() % 2 == 0;
    }
    for (Day d : build_reporting_timeline(e, docs, flags).days) {
      EXPECT_GT(docs[d], 0u);
      EXPECT_TRUE(flags[d]);
    }
  }
}

TEST(Events, ParseValidatesFields) {
  auto events = parse_events(nlohmann::json::parse(
      R"([{"event_id":"b","query":"Boston Marathon bombing","first_day":"2013-04-15","last_day":"2013-04-20",
           "category":"accident","relevant_days":["2013-04-15","2013-04-17"]}])"));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].query_terms, (std::vector<std::string>{"boston", "marathon", "bombing"}));
  auto flags = relevance_flags(events[0]);
  EXPECT_EQ(flags.size(), 6u);
  EXPECT_TRUE(flags[Day::parse("2013-04-17")]);
  EXPECT_FALSE(flags[Day::parse("2013-04-16")]);
  EXPECT_THROW(parse_events(nlohmann::json::parse(
                   R"([{"event_id":"b","query":"the of","first_day":"2013-04-15","last_day":"2013-04-20"}])")),
               Error);
  EXPECT_THROW(parse_events(nlohmann::json::parse(
                   R"([{"event_id":"b","query":"x","first_day":"2013-04-15","last_day":"2013-04-10"}])")),
               Error);
}

}  // namespace
}  // namespace entl
