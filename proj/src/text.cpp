#include "rquge/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace rquge::text {
namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }
bool is_word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c) != 0; }

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) { return join(split_whitespace(s), " "); }

std::vector<std::string> ngram_tokens(std::string_view s) {
  std::string spaced;
  spaced.reserve(s.size() * 2);
  for (char c : to_lower(s)) {
    if (is_ascii_punct(static_cast<unsigned char>(c))) {
      spaced += ' ';
      spaced += c;
      spaced += ' ';
    } else {
      spaced += c;
    }
  }
  return split_whitespace(spaced);
}

std::string normalize_answer(std::string_view s) {
  std::string no_punct;
  for (char c : to_lower(s)) {
    if (!is_ascii_punct(static_cast<unsigned char>(c))) no_punct += c;
  }
  std::vector<std::string> kept;
  for (auto& tok : split_whitespace(no_punct)) {
    if (tok != "a" && tok != "an" && tok != "the") kept.push_back(std::move(tok));
  }
  return join(kept, " ");
}

std::vector<std::string> answer_tokens(std::string_view s) {
  return split_whitespace(normalize_answer(s));
}

double token_f1(std::string_view predicted, std::string_view gold) {
  const auto pred = answer_tokens(predicted);
  const auto ref = answer_tokens(gold);
  if (pred.empty() || ref.empty()) return (pred.empty() && ref.empty()) ? 1.0 : 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : ref) ++counts[t];
  int common = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(common) / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

std::vector<WordToken> word_tokens(std::string_view s) {
  std::vector<WordToken> out;
  std::size_t i = 0;
  const auto at = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  while (i < s.size()) {
    if (is_space(at(i))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_word_byte(at(i))) {
      ++i;
      while (i < s.size()) {
        if (is_word_byte(at(i))) {
          ++i;
        } else if ((s[i] == '\'' || s[i] == '-') && i + 1 < s.size() && is_word_byte(at(i + 1))) {
          i += 2;
        } else {
          break;
        }
      }
    } else {
      ++i;
    }
    out.push_back({std::string(s.substr(start, i - start)), start, i});
  }
  return out;
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::optional<std::size_t> utf8_byte_offset(std::string_view s, std::size_t char_index) {
  std::size_t seen = 0;
  for (std::size_t b = 0; b < s.size(); ++b) {
    if ((static_cast<unsigned char>(s[b]) & 0xC0) == 0x80) continue;
    if (seen == char_index) return b;
    ++seen;
  }
  if (seen == char_index) return s.size();
  return std::nullopt;
}

std::size_t utf8_char_index(std::string_view s, std::size_t byte_offset) {
  return utf8_length(s.substr(0, std::min(byte_offset, s.size())));
}

}  // namespace rquge::text
