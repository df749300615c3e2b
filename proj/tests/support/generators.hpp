#pragma once

// Hand-rolled random input generators for the property tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rquge/core.hpp"

namespace gen {

using Engine = std::mt19937_64;

inline std::size_t index(Engine& e, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(e);
}

inline double real(Engine& e, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(e);
}

template <typename T>
const T& pick(Engine& e, const std::vector<T>& v) {
  return v[index(e, v.size())];
}

/// Length in [min_len, max_len]. Half the vectors draw from a small integer
/// range so ties are common.
inline std::vector<double> vector(Engine& e, std::size_t min_len, std::size_t max_len) {
  const std::size_t n = min_len + index(e, max_len - min_len + 1);
  const bool ties = index(e, 2) == 0;
  std::vector<double> v(n);
  for (auto& x : v) x = ties ? static_cast<double>(index(e, 5)) : real(e, -10, 10);
  return v;
}

/// Non-constant vector of length n.
inline std::vector<double> companion(Engine& e, std::size_t n) {
  std::vector<double> v;
  do {
    v.clear();
    const bool ties = index(e, 2) == 0;
    for (std::size_t i = 0; i < n; ++i) v.push_back(ties ? static_cast<double>(index(e, 4)) : real(e, -5, 5));
  } while (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); }));
  return v;
}

inline std::vector<double> non_constant(Engine& e, std::size_t min_len, std::size_t max_len) {
  std::vector<double> v;
  do {
    v = vector(e, min_len, max_len);
  } while (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); }));
  return v;
}

/// Labels with both classes present.
inline std::vector<int> labels(Engine& e, std::size_t n) {
  std::vector<int> l(n);
  do {
    for (auto& x : l) x = static_cast<int>(index(e, 2));
  } while (std::count(l.begin(), l.end(), 1) == 0 || std::count(l.begin(), l.end(), 0) == 0);
  return l;
}

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> v = {
      "the",   "river", "city",  "plague", "council", "team",    "won",    "lost",   "race",
      "a",     "of",    "in",    "and",    "to",      "county",  "center", "built",  "north",
      "music", "law",   "army",  "year",   "people",  "known",   "first",  "large",  "old",
      "new",   "small", "water", "trade",  "church",  "school",  "war",    "ship",   "king"};
  return v;
}

inline std::string sentence(Engine& e, std::size_t min_words, std::size_t max_words) {
  const std::size_t n = min_words + index(e, max_words - min_words + 1);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) s += index(e, 12) == 0 ? ", " : " ";
    s += pick(e, vocabulary());
  }
  if (index(e, 3) == 0) s += index(e, 2) == 0 ? "." : "?";
  return s;
}

/// Questions mixing auxiliaries, pronouns, antonym-table verbs, names and
/// plain words, so every corrupter has something to act on some of the time.
inline std::string question(Engine& e) {
  static const std::vector<std::string> wh = {"Who", "What", "When", "Where", "Why", "How", "Which"};
  static const std::vector<std::string> aux = {"is", "was", "did", "can", "has", "will", "should", "were"};
  static const std::vector<std::string> pron = {"he", "she", "his", "her", "him", "hers", "himself"};
  static const std::vector<std::string> verbs = {"won", "lost", "increase", "accepted", "included",
                                                 "allow", "built", "said", "give"};
  static const std::vector<std::string> names = {"Paris", "Joseph Haas", "Italy", "Prussia", "Sweden",
                                                 "Orange County", "Acre"};
  std::vector<std::string> parts{pick(e, wh)};
  if (index(e, 3) != 0) parts.push_back(pick(e, aux));
  const std::size_t body = 2 + index(e, 6);
  for (std::size_t i = 0; i < body; ++i) {
    switch (index(e, 5)) {
      case 0: parts.push_back(pick(e, pron)); break;
      case 1: parts.push_back(pick(e, verbs)); break;
      case 2: parts.push_back(pick(e, names)); break;
      default: parts.push_back(pick(e, vocabulary())); break;
    }
  }
  std::string q;
  for (const auto& p : parts) q += (q.empty() ? "" : " ") + p;
  return q + "?";
}

/// Context of a few sentences plus an answer span taken from it.
inline rquge::QGInstance instance(Engine& e, const std::string& id, std::size_t n_candidates) {
  rquge::QGInstance inst;
  inst.id = id;
  const std::size_t n_sent = 2 + index(e, 3);
  for (std::size_t i = 0; i < n_sent; ++i) {
    std::string s = sentence(e, 5, 12);
    if (s.back() != '.' && s.back() != '?') s += '.';
    inst.context += (i ? " " : "") + s;
  }
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < inst.context.size(); ++i) {
    if (inst.context[i] == ' ' && i + 1 < inst.context.size()) starts.push_back(i + 1);
  }
  const std::size_t b = pick(e, starts);
  std::size_t end = inst.context.find(' ', b);
  if (end == std::string::npos) end = inst.context.size();
  std::string ans = inst.context.substr(b, end - b);
  while (!ans.empty() && (ans.back() == '.' || ans.back() == ',' || ans.back() == '?')) ans.pop_back();
  if (ans.empty()) {
    ans = inst.context.substr(0, inst.context.find(' '));
    inst.gold_answer = {ans, 0};
  } else {
    inst.gold_answer = {ans, b};
  }
  inst.reference_question = sentence(e, 4, 9) + "?";
  for (std::size_t i = 0; i < n_candidates; ++i) {
    inst.candidates.push_back(
        rquge::CandidateQuestion{sentence(e, 3, 10) + "?", real(e, 1.0, 40.0), rquge::CandidateSource::generated});
  }
  return inst;
}

}  // namespace gen
