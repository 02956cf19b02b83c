#include "hope/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace hope::text {

namespace {

// Decodes the code point starting at byte `i`, advancing `i`. Malformed
// sequences decode to a negative value and advance by at least one byte.
UChar32 next_code_point(std::string_view s, std::size_t& i) {
  UChar32 c = 0;
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  int32_t pos = static_cast<int32_t>(i);
  U8_NEXT(bytes, pos, static_cast<int32_t>(s.size()), c);
  i = static_cast<std::size_t>(pos);
  return c;
}

}  // namespace

std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  icu::UnicodeString out = norm->normalize(in, status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("NFC normalization failed");
  }
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::string lowercase(std::string_view s) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.toLower(icu::Locale::getRoot());
  std::string result;
  u.toUTF8String(result);
  return result;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  std::size_t start = std::string_view::npos;
  while (i < s.size()) {
    const std::size_t at = i;
    const UChar32 c = next_code_point(s, i);
    const bool space = c >= 0 && u_isUWhiteSpace(c);
    if (space) {
      if (start != std::string_view::npos) {
        tokens.emplace_back(s.substr(start, at - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = at;
    }
  }
  if (start != std::string_view::npos) {
    tokens.emplace_back(s.substr(start));
  }
  return tokens;
}

std::size_t code_point_length(std::string_view s) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    next_code_point(s, i);
    ++n;
  }
  return n;
}

bool is_valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    if (next_code_point(s, i) < 0) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> split_edge_punctuation(std::string_view token) {
  // Code point boundaries, so we can peel from both ends.
  std::vector<std::size_t> bounds;
  std::vector<bool> punct;
  std::size_t i = 0;
  while (i < token.size()) {
    bounds.push_back(i);
    const UChar32 c = next_code_point(token, i);
    punct.push_back(c >= 0 && u_ispunct(c));
  }
  bounds.push_back(token.size());

  const std::size_t n = punct.size();
  std::size_t lead = 0;
  while (lead < n && punct[lead]) {
    ++lead;
  }
  std::size_t trail = n;
  while (trail > lead && punct[trail - 1]) {
    --trail;
  }

  std::vector<std::string> out;
  for (std::size_t k = 0; k < lead; ++k) {
    out.emplace_back(token.substr(bounds[k], bounds[k + 1] - bounds[k]));
  }
  if (trail > lead) {
    out.emplace_back(token.substr(bounds[lead], bounds[trail] - bounds[lead]));
  }
  for (std::size_t k = trail; k < n; ++k) {
    out.emplace_back(token.substr(bounds[k], bounds[k + 1] - bounds[k]));
  }
  return out;
}

}  // namespace hope::text
