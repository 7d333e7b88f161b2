#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace streamst::text {

// Strip leading/trailing ASCII whitespace.
std::string trim(std::string_view s);

// Whitespace-delimited tokens, punctuation left attached ("cats." is one word).
std::vector<std::string> split_words(std::string_view s);

std::size_t word_count(std::string_view s);

std::string join(const std::vector<std::string>& words, std::string_view sep = " ");

// True when `prefix` is a strict prefix of `s` (shorter and matching).
bool is_strict_prefix(std::string_view prefix, std::string_view s);

std::string lower_ascii(std::string_view s);

// BLEU tokenizers. whitespace_punct splits on whitespace and then peels every
// ASCII punctuation character off into its own token; char_tokens yields one
// token per UTF-8 code point, skipping whitespace (for Chinese references).
std::vector<std::string> tokenize_whitespace_punct(std::string_view s);
std::vector<std::string> tokenize_chars(std::string_view s);

}  // namespace streamst::text
