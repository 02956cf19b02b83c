#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Unicode helpers shared by word counting and metric tokenization.
// All strings are UTF-8.

namespace hope::text {

/// NFC-normalizes `s`. Invalid UTF-8 is replaced with U+FFFD by the decoder.
std::string nfc(std::string_view s);

/// Full Unicode lowercase mapping (root locale).
std::string lowercase(std::string_view s);

/// Splits on Unicode White_Space code points; never yields empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

/// Number of Unicode code points in `s`.
std::size_t code_point_length(std::string_view s);

bool is_valid_utf8(std::string_view s);

/// Splits leading and trailing punctuation (general category P*) off `token`,
/// one code point per emitted token. Inner punctuation ("don't", "3.5") stays.
std::vector<std::string> split_edge_punctuation(std::string_view token);

}  // namespace hope::text
