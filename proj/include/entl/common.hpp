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

#include <algorithm>
#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace entl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A whole calendar day. All event time arithmetic in entl is done in days.
class Day {
 public:
  Day() = default;
  explicit Day(std::chrono::sys_days d) : value_(d) {}

  static Day from_ymd(int y, unsigned m, unsigned d) {
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                    std::chrono::day{d}};
    if (!ymd.ok()) throw Error("invalid calendar date");
    return Day(std::chrono::sys_days(ymd));
  }

  /// Parses "YYYY-MM-DD". A trailing time part ("T..." or " ...") is ignored.
  static Day parse(std::string_view text) {
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
      throw Error("invalid ISO-8601 day: '" + std::string(text) + "'");
    }
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') {
      throw Error("invalid ISO-8601 day: '" + std::string(text) + "'");
    }
    auto digits = [&](std::size_t from, std::size_t n) {
      int v = 0;
      for (std::size_t i = from; i < from + n; ++i) {
        if (text[i] < '0' || text[i] > '9') {
          throw Error("invalid ISO-8601 day: '" + std::string(text) + "'");
        }
        v = v * 10 + (text[i] - '0');
      }
      return v;
    };
    std::chrono::year_month_day ymd{
        std::chrono::year{digits(0, 4)},
        std::chrono::month{static_cast<unsigned>(digits(5, 2))},
        std::chrono::day{static_cast<unsigned>(digits(8, 2))}};
    if (!ymd.ok()) throw Error("invalid ISO-8601 day: '" + std::string(text) + "'");
    return Day(std::chrono::sys_days(ymd));
  }

  std::string str() const {
    std::chrono::year_month_day ymd{value_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }

  std::chrono::sys_days value() const { return value_; }

  /// Signed number of days from `other` to this day.
  long days_since(Day other) const { return (value_ - other.value_).count(); }

  Day operator+(long n) const { return Day(value_ + std::chrono::days{n}); }
  Day operator-(long n) const { return Day(value_ - std::chrono::days{n}); }

  auto operator<=>(const Day&) const = default;

 private:
  std::chrono::sys_days value_{};
};

struct DayHash {
  std::size_t operator()(Day d) const noexcept {
    return std::hash<long>{}(d.value().time_since_epoch().count());
  }
};

/// splitmix64; used to derive independent deterministic seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a; stable across platforms, unlike std::hash.
inline std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is
/// handled by exactly one thread, so writes into pre-sized slots are safe.
inline void parallel_for(std::size_t n, unsigned jobs,
                         const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace entl
