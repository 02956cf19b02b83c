#pragma once

#include <boost/rational.hpp>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Edit-distance baselines: WER, PER, TER (with block shifts) and HTER.
//
// Counting convention follows the scoring literature: an *insertion* is a
// hypothesis word absent from the reference, a *deletion* is a reference
// word the hypothesis dropped. Trace operations are phrased as the edits that
// turn the hypothesis into the reference, so an insertion error shows up as a
// kDelete op and a deletion error as a kInsert op.

namespace hope::metrics {

using Rational = boost::rational<std::int64_t>;

/// Fixed-point rendering, rounded half away from zero: to_decimal(1/3, 4) == "0.3333".
std::string to_decimal(Rational r, int places = 4);

struct TokenizerConfig {
  bool lowercase = false;
  bool split_punctuation = false;

  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

struct TokenSequence {
  std::vector<std::string> tokens;
  /// The normalized text the tokens were cut from.
  std::string text;
  TokenizerConfig config;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }

  /// Wraps pre-split tokens (tests, oracles, callers with their own tokenizer).
  static TokenSequence from_tokens(std::vector<std::string> tokens);
};

/// NFC-normalizes, optionally lowercases, splits on Unicode whitespace and,
/// with split_punctuation, peels leading/trailing punctuation into
/// one-code-point tokens.
TokenSequence tokenize(std::string_view text, TokenizerConfig config = {});

struct EditCounts {
  std::uint64_t substitutions = 0;
  std::uint64_t insertions = 0;
  std::uint64_t deletions = 0;
  std::uint64_t shifts = 0;
  std::uint64_t matches = 0;

  std::uint64_t edits() const noexcept { return substitutions + insertions + deletions + shifts; }

  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

struct EditOp {
  enum class Kind : std::uint8_t { kMatch, kSubstitute, kInsert, kDelete, kShift };

  Kind kind = Kind::kMatch;
  std::size_t hyp_index = 0;  // match, substitute, delete; block start for shift
  std::size_t ref_index = 0;  // match, substitute, insert
  std::size_t length = 0;     // shift only
  std::size_t dest = 0;       // shift only: position in the sequence after the block is removed
  std::string token;          // reference token written by substitute and insert

  static EditOp match(std::size_t i, std::size_t j) { return {Kind::kMatch, i, j, 0, 0, {}}; }
  static EditOp substitute(std::size_t i, std::size_t j, std::string tok) {
    return {Kind::kSubstitute, i, j, 0, 0, std::move(tok)};
  }
  static EditOp insert(std::size_t j, std::string tok) { return {Kind::kInsert, 0, j, 0, 0, std::move(tok)}; }
  static EditOp erase(std::size_t i) { return {Kind::kDelete, i, 0, 0, 0, {}}; }
  static EditOp shift(std::size_t start, std::size_t len, std::size_t dest) {
    return {Kind::kShift, start, 0, len, dest, {}};
  }

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

/// Shift ops first (each applied to the sequence left by the previous one),
/// then one positional op per token of the shifted hypothesis / reference.
using EditTrace = std::vector<EditOp>;

/// Applies `trace` to `hyp`. Throws DataError if the trace does not fit the input.
std::vector<std::string> replay(std::span<const std::string> hyp, const EditTrace& trace);

struct EditResult {
  Rational rate;
  EditCounts counts;
  EditTrace trace;
  /// Which reference the counts and trace refer to (TER with several references).
  std::size_t reference_index = 0;
};

/// Levenshtein alignment with unit costs; rate = (S + I + D) / |ref|.
/// Throws UndefinedRateError on an empty reference.
EditResult wer(const TokenSequence& hyp, const TokenSequence& ref);
EditResult wer(std::span<const std::string> hyp, std::span<const std::string> ref);

struct PerResult {
  Rational rate;
  /// Multiset intersection of hypothesis and reference tokens.
  std::uint64_t correct = 0;
  std::uint64_t hyp_length = 0;
  std::uint64_t ref_length = 0;

  /// Numerator of the rate over ref_length.
  std::int64_t errors() const noexcept;
};

/// Position-independent error rate:
/// 1 - (correct - max(0, |hyp| - |ref|)) / |ref|, unclamped.
PerResult per(const TokenSequence& hyp, const TokenSequence& ref);
PerResult per(std::span<const std::string> hyp, std::span<const std::string> ref);

/// Translation edit rate with greedy block shifts, minimised over references;
/// rate = edits / mean reference length. Throws DataError on an empty
/// reference list and UndefinedRateError on any empty reference.
EditResult ter(const TokenSequence& hyp, std::span<const TokenSequence> refs);
EditResult ter(std::span<const std::string> hyp, std::span<const std::vector<std::string>> refs);

/// TER against the human post-edit of this very hypothesis.
EditResult hter(const TokenSequence& hyp, const TokenSequence& post_edited);

}  // namespace hope::metrics
