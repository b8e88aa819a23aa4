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

// Text utilities shared by ingestion, indexing and feature extraction:
// case folding, stopword and lexicon lookup, syllable counting.

#pragma once

#include <cctype>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "entl/common.hpp"

namespace entl {

/// ASCII lowercase. Non-ASCII bytes pass through unchanged.
inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string_view trim(std::string_view s) {
  auto ws = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline bool has_alpha(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; });
}

/// Splits on anything that is not an ASCII letter, digit or apostrophe.
/// Bytes >= 0x80 are kept inside words so UTF-8 sequences stay intact.
inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '\'' || c >= 0x80) {
      cur.push_back(ch);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// A set of lowercase terms, one per line when loaded from a file.
class TermSet {
 public:
  TermSet() = default;
  TermSet(std::initializer_list<std::string_view> terms) {
    for (auto t : terms) terms_.insert(to_lower(t));
  }

  static TermSet load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open term list: " + path);
    TermSet set;
    std::string line;
    while (std::getline(in, line)) {
      auto t = trim(line);
      if (!t.empty() && t.front() != '#') set.terms_.insert(to_lower(t));
    }
    return set;
  }

  bool contains(std::string_view term) const { return terms_.count(to_lower(term)) > 0; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

 private:
  std::unordered_set<std::string> terms_;
};

inline const TermSet& default_stopwords() {
  static const TermSet kStopwords = {
      "a", "about", "above", "across", "after", "afterwards", "again", "against", "all",
      "almost", "alone", "along", "already", "also", "although", "always", "am", "among",
      "amongst", "an", "and", "another", "any", "anyhow", "anyone", "anything", "anyway",
      "anywhere", "are", "around", "as", "at", "back", "be", "became", "because", "become",
      "becomes", "becoming", "been", "before", "beforehand", "behind", "being", "below",
      "beside", "besides", "between", "beyond", "both", "but", "by", "can", "cannot",
      "could", "did", "do", "does", "doing", "done", "down", "due", "during", "each", "eg",
      "eight", "either", "else", "elsewhere", "enough", "etc", "even", "ever", "every",
      "everyone", "everything", "everywhere", "except", "few", "first", "for", "former",
      "formerly", "from", "further", "had", "has", "have", "having", "he", "hence", "her",
      "here", "hereafter", "hereby", "herein", "hereupon", "hers", "herself", "him",
      "himself", "his", "how", "however", "i", "ie", "if", "in", "indeed", "into", "is",
      "it", "its", "itself", "just", "last", "latter", "latterly", "least", "less", "many",
      "may", "me", "meanwhile", "might", "mine", "more", "moreover", "most", "mostly",
      "much", "must", "my", "myself", "namely", "neither", "never", "nevertheless", "next",
      "no", "nobody", "none", "noone", "nor", "not", "nothing", "now", "nowhere", "of",
      "off", "often", "on", "once", "one", "only", "onto", "or", "other", "others",
      "otherwise", "our", "ours", "ourselves", "out", "over", "own", "per", "perhaps",
      "please", "put", "rather", "re", "same", "see", "seem", "seemed", "seeming", "seems",
      "several", "she", "should", "since", "so", "some", "somehow", "someone", "something",
      "sometime", "sometimes", "somewhere", "still", "such", "than", "that", "the", "their",
      "theirs", "them", "themselves", "then", "thence", "there", "thereafter", "thereby",
      "therefore", "therein", "thereupon", "these", "they", "this", "those", "though",
      "three", "through", "throughout", "thru", "thus", "to", "together", "too", "toward",
      "towards", "two", "under", "until", "up", "upon", "us", "very", "via", "was", "we",
      "well", "were", "what", "whatever", "when", "whence", "whenever", "where",
      "whereafter", "whereas", "whereby", "wherein", "whereupon", "wherever", "whether",
      "which", "while", "whither", "who", "whoever", "whole", "whom", "whose", "why", "will",
      "with", "within", "without", "would", "yet", "you", "your", "yours", "yourself",
      "yourselves", "'s", "s", "t", "don't", "can't", "won't", "isn't", "aren't", "wasn't",
      "weren't", "hasn't", "haven't", "hadn't", "doesn't", "didn't", "it's", "he's",
      "she's", "they're", "we're", "i'm", "you're", "let", "lets", "via", "mr", "mrs", "ms",
      "said", "says", "say", "get", "got", "go", "goes", "went", "make", "made", "like",
      "new", "also", "would", "could", "upon", "yes", "oh", "ok", "okay", "thing", "things",
      "way", "ways", "lot", "lots", "really", "quite", "ago", "around", "within", "without",
      "among", "amid", "beneath", "despite", "inside", "outside", "till", "unless",
      "whilst", "yeah", "hey", "hi", "le", "la", "de", "del", "los", "las", "el"};
  return kStopwords;
}

/// Reporting verbs and news-specific vocabulary.
inline const TermSet& default_news_terms() {
  static const TermSet kNews = {
      "said", "say", "says", "report", "reported", "reports", "reporter", "according",
      "announce", "announced", "official", "officials", "spokesman", "spokeswoman",
      "statement", "told", "tell", "confirm", "confirmed", "claim", "claimed", "press",
      "news", "conference", "breaking", "update", "updated", "source", "sources", "police",
      "authority", "authorities", "investigation", "investigator", "investigators",
      "witness", "witnesses", "interview", "describe", "described", "declare", "declared",
      "add", "added", "note", "noted", "state", "stated", "deny", "denied", "allege",
      "alleged", "warn", "warned"};
  return kNews;
}

/// Subjectivity cues (attitude).
inline const TermSet& default_attitude_terms() {
  static const TermSet kAttitude = {
      "believe", "think", "feel", "felt", "hope", "fear", "seem", "appear", "suggest",
      "likely", "unlikely", "probably", "possibly", "perhaps", "clearly", "obviously",
      "must", "should", "opinion", "view", "doubt", "certain", "sure", "claim", "argue",
      "insist", "suspect", "wonder", "expect", "want"};
  return kAttitude;
}

/// Polarity cues (sentimentality).
inline const TermSet& default_sentiment_terms() {
  static const TermSet kSentiment = {
      "good", "great", "happy", "hope", "hero", "brave", "safe", "relief", "love", "support",
      "praise", "thank", "bad", "terrible", "horrible", "tragic", "tragedy", "sad", "fear",
      "angry", "anger", "attack", "kill", "killed", "dead", "death", "injured", "victim",
      "victims", "terror", "chaos", "panic", "grief", "mourn", "shock", "shocked",
      "devastating", "horrific", "evil", "cruel"};
  return kSentiment;
}

/// Vowel-group syllable estimate with a silent-e correction; minimum 1.
inline int count_syllables(std::string_view word) {
  std::string w = to_lower(word);
  auto vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  int groups = 0;
  bool prev = false;
  for (char c : w) {
    bool v = vowel(c);
    if (v && !prev) ++groups;
    prev = v;
  }
  if (w.size() > 2 && w.back() == 'e' && !vowel(w[w.size() - 2]) && groups > 1) --groups;
  return std::max(groups, 1);
}

}  // namespace entl
