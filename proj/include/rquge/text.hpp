#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Text helpers shared by the metric, the baselines and the corrupters.
namespace rquge::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Trims and collapses internal whitespace runs to one space. Used for
/// comparisons only; stored text keeps its original spacing.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Tokenizer for n-gram metrics: lowercase, ASCII punctuation split off
/// into its own tokens, then whitespace split.
std::vector<std::string> ngram_tokens(std::string_view s);

/// SQuAD answer normalization: lowercase, drop punctuation, drop the
/// articles a/an/the, collapse whitespace.
std::string normalize_answer(std::string_view s);
std::vector<std::string> answer_tokens(std::string_view s);

/// Token-overlap F1 over normalized answer tokens. Two empty answers score 1.
double token_f1(std::string_view predicted, std::string_view gold);

/// A word or punctuation token with its byte range in the source string.
struct WordToken {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits into words and single punctuation marks. Apostrophes and hyphens
/// between letters stay inside the word; bytes >= 0x80 count as letters.
std::vector<WordToken> word_tokens(std::string_view s);

// UTF-8 offsets. Character offsets in data files count code points.
std::size_t utf8_length(std::string_view s);
std::optional<std::size_t> utf8_byte_offset(std::string_view s, std::size_t char_index);
std::size_t utf8_char_index(std::string_view s, std::size_t byte_offset);

}  // namespace rquge::text
