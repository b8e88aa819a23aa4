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

// Soft labels from page-view time series. The view outlier ratio of an
// entity on a day is the absolute deviation of that day's views from the
// median of a window around it, relative to max(median, m_min).

#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "entl/common.hpp"
#include "entl/corpus.hpp"

namespace entl {

struct PageViewSeries {
  std::string entity_key;
  std::map<Day, long> counts;
  /// Days the series covers. Days inside the coverage without a count are
  /// zero views; days outside it are unavailable and excluded from windows.
  Day first_day;
  Day last_day;

  /// Coverage defaults to the span of the recorded days.
  static PageViewSeries from_counts(std::string key, std::map<Day, long> counts) {
    PageViewSeries s;
    s.entity_key = std::move(key);
    s.counts = std::move(counts);
    if (!s.counts.empty()) {
      s.first_day = s.counts.begin()->first;
      s.last_day = s.counts.rbegin()->first;
    }
    return s;
  }

  bool covers(Day d) const { return !counts.empty() && d >= first_day && d <= last_day; }
  long views(Day d) const {
    auto it = counts.find(d);
    return it == counts.end() ? 0 : it->second;
  }
};

struct SoftLabel {
  std::string entity_key;
  std::string event_id;
  Day day;
  double vor = 0.0;
};

struct VorParams {
  int window = 10;
  double m_min = 12.0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw Error("median of empty window");
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// |v_i - m_i| / max(m_i, m_min) with m_i the median over
/// [day - w, day + w] intersected with the series coverage.
inline double vor(const PageViewSeries& series, Day day, int window, double m_min) {
  if (window < 1) throw Error("vor: window must be >= 1");
  if (m_min <= 0) throw Error("vor: m_min must be positive");
  std::vector<double> win;
  for (long k = -window; k <= window; ++k) {
    Day d = day + k;
    if (series.covers(d)) win.push_back(static_cast<double>(series.views(d)));
  }
  double v = static_cast<double>(series.views(day));
  if (win.empty()) win.push_back(v);
  double m = median(std::move(win));
  return std::abs(v - m) / std::max(m, m_min);
}

inline double vor(const PageViewSeries& series, Day day, const VorParams& p = {}) {
  return vor(series, day, p.window, p.m_min);
}

/// One label per (linked entity, event, timeline day). Linked entities
/// without a page-view series are skipped and reported in `warnings`.
inline std::vector<SoftLabel> build_training_tuples(const std::vector<ReportingTimeline>& timelines,
                                                    const std::vector<std::string>& linked_entities,
                                                    const std::map<std::string, PageViewSeries>& series,
                                                    const VorParams& params = {},
                                                    std::vector<std::string>* warnings = nullptr) {
  std::vector<SoftLabel> out;
  std::vector<const PageViewSeries*> usable;
  for (const auto& e : linked_entities) {
    auto it = series.find(e);
    if (it == series.end()) {
      if (warnings) warnings->push_back("no page-view series for linked entity '" + e + "'");
      continue;
    }
    usable.push_back(&it->second);
  }
  for (const auto& tl : timelines) {
    for (Day d : tl.days) {
      for (const auto* s : usable) out.push_back({s->entity_key, tl.event_id, d, vor(*s, d, params)});
    }
  }
  return out;
}

inline std::map<std::string, PageViewSeries> load_pageviews(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open page-view file: " + path);
  std::map<std::string, std::map<Day, long>> counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string key, date, count;
    if (!std::getline(ss, key, '\t') || !std::getline(ss, date, '\t') || !std::getline(ss, count)) {
      throw Error(path + ":" + std::to_string(lineno) + ": expected entity_key<TAB>day<TAB>count");
    }
    long n = 0;
    try {
      n = std::stol(count);
    } catch (const std::exception&) {
      throw Error(path + ":" + std::to_string(lineno) + ": bad count '" + count + "'");
    }
    if (n < 0) throw Error(path + ":" + std::to_string(lineno) + ": negative count");
    counts[key][Day::parse(date)] += n;
  }
  std::map<std::string, PageViewSeries> out;
  for (auto& [k, c] : counts) out.emplace(k, PageViewSeries::from_counts(k, std::move(c)));
  return out;
}

/// Link file: entity_key<TAB>page_title. Returns the linked entity keys in
/// file order.
inline std::vector<std::string> load_links(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open link file: " + path);
  std::vector<std::string> keys;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    keys.emplace_back(line.substr(0, tab));
  }
  return keys;
}

inline void write_labels_tsv(std::ostream& out, const std::vector<SoftLabel>& labels) {
  char buf[32];
  for (const auto& l : labels) {
    std::snprintf(buf, sizeof buf, "%.17g", l.vor);
    out << l.entity_key << '\t' << l.event_id << '\t' << l.day.str() << '\t' << buf << '\n';
  }
}

inline std::vector<SoftLabel> read_labels_tsv(std::istream& in) {
  std::vector<SoftLabel> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string key, ev, day, v;
    std::getline(ss, key, '\t');
    std::getline(ss, ev, '\t');
    std::getline(ss, day, '\t');
    std::getline(ss, v);
    out.push_back({key, ev, Day::parse(day), std::stod(v)});
  }
  return out;
}

}  // namespace entl
