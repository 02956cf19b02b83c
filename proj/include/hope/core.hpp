#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hope {

// ---------------------------------------------------------------------------
// Error taxonomy
// ---------------------------------------------------------------------------

/// The eight annotation categories. The set is closed.
enum class ErrorType : std::uint8_t {
  kImpact,                   // IMP
  kRequiredAdaptationMissing,  // RAM
  kTerminology,              // TRM
  kUngrammatical,            // UGR
  kMistranslation,           // MIS
  kStyle,                    // STL
  kProofreading,             // PRF
  kProperName,               // PRN
};

inline constexpr std::size_t kErrorTypeCount = 8;

inline constexpr std::array<ErrorType, kErrorTypeCount> kAllErrorTypes = {
    ErrorType::kImpact,         ErrorType::kRequiredAdaptationMissing,
    ErrorType::kTerminology,    ErrorType::kUngrammatical,
    ErrorType::kMistranslation, ErrorType::kStyle,
    ErrorType::kProofreading,   ErrorType::kProperName,
};

/// Three-letter uppercase code, e.g. "TRM".
std::string_view code(ErrorType t) noexcept;
/// Human-readable name, e.g. "Terminology".
std::string_view display_name(ErrorType t) noexcept;
/// One-sentence definition shown to evaluators.
std::string_view definition(ErrorType t) noexcept;
std::optional<ErrorType> parse_error_type(std::string_view code) noexcept;

// ---------------------------------------------------------------------------
// Severity
// ---------------------------------------------------------------------------

/// Severity levels in increasing order; the penalty weight doubles per level.
enum class Severity : std::uint8_t { kMinor, kMedium, kMajor, kSevere, kCritical };

inline constexpr std::size_t kSeverityCount = 5;

inline constexpr std::array<Severity, kSeverityCount> kAllSeverities = {
    Severity::kMinor, Severity::kMedium, Severity::kMajor, Severity::kSevere, Severity::kCritical,
};

constexpr std::uint64_t weight(Severity s) noexcept {
  return std::uint64_t{1} << static_cast<unsigned>(s);
}

std::string_view name(Severity s) noexcept;
std::optional<Severity> parse_severity(std::string_view name) noexcept;

// ---------------------------------------------------------------------------
// Annotations and units
// ---------------------------------------------------------------------------

/// Half-open code point range [start, end) into the annotated target text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

struct ErrorAnnotation {
  ErrorType error_type = ErrorType::kImpact;
  Severity severity = Severity::kMinor;
  std::optional<std::string> note;
  std::optional<Span> span;
  std::optional<std::string> annotator_id;

  friend bool operator==(const ErrorAnnotation&, const ErrorAnnotation&) = default;
};

/// One source segment with per-engine output.
///
/// An engine key present in `annotations` (even with an empty list) means the
/// unit has been reviewed for that engine; an absent key means not yet reviewed.
/// Both score as zero penalty points.
struct TranslationUnit {
  std::string id;
  std::string source;
  std::map<std::string, std::string> targets;
  std::map<std::string, std::string> post_edited;
  std::map<std::string, std::vector<ErrorAnnotation>> annotations;

  /// Annotations for `engine_id`; empty when none were recorded.
  std::span<const ErrorAnnotation> annotations_for(std::string_view engine_id) const;
  bool reviewed_for(std::string_view engine_id) const;

  friend bool operator==(const TranslationUnit&, const TranslationUnit&) = default;
};

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

enum class SegmentCategory : std::uint8_t { kUnchanged, kGoodEnough, kMustFix };

inline constexpr std::size_t kSegmentCategoryCount = 3;

inline constexpr std::array<SegmentCategory, kSegmentCategoryCount> kAllSegmentCategories = {
    SegmentCategory::kUnchanged, SegmentCategory::kGoodEnough, SegmentCategory::kMustFix,
};

/// "unchanged", "good_enough" or "must_fix".
std::string_view name(SegmentCategory c) noexcept;
std::optional<SegmentCategory> parse_segment_category(std::string_view name) noexcept;

/// Error point penalty of one translation unit: the sum of severity weights.
/// Every recorded instance counts, including repeats of the same type.
std::uint64_t epptu(std::span<const ErrorAnnotation> annotations) noexcept;

/// 0 is unchanged, 1..4 good enough, 5 and above must be fixed.
constexpr SegmentCategory classify_segment(std::uint64_t epptu_value) noexcept {
  if (epptu_value == 0) {
    return SegmentCategory::kUnchanged;
  }
  return epptu_value <= 4 ? SegmentCategory::kGoodEnough : SegmentCategory::kMustFix;
}

/// Whitespace-delimited tokens after NFC normalization.
std::size_t word_count(std::string_view text);

enum class CountingSide : std::uint8_t { kSource, kTarget };

std::string_view name(CountingSide side) noexcept;
std::optional<CountingSide> parse_counting_side(std::string_view name) noexcept;

template <typename T>
using CategoryArray = std::array<T, kSegmentCategoryCount>;

using ErrorMatrix = std::array<std::array<std::uint64_t, kSeverityCount>, kErrorTypeCount>;

/// Per-engine breakdown: error counts by type and severity, total penalty, and
/// category shares at segment and word level.
struct QualityProfile {
  std::string engine_id;
  std::uint64_t total_epp = 0;
  ErrorMatrix matrix{};
  CategoryArray<std::uint64_t> segment_counts{};
  CategoryArray<std::uint64_t> word_counts{};
  std::uint64_t total_segments = 0;
  std::uint64_t total_words = 0;
  std::map<std::uint64_t, std::uint64_t> epptu_histogram;
  /// Units with no review record for this engine (scored as unchanged).
  std::uint64_t unreviewed_segments = 0;

  std::uint64_t count(ErrorType t, Severity s) const noexcept {
    return matrix[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)];
  }
  std::uint64_t segments(SegmentCategory c) const noexcept { return segment_counts[static_cast<std::size_t>(c)]; }
  std::uint64_t words(SegmentCategory c) const noexcept { return word_counts[static_cast<std::size_t>(c)]; }

  friend bool operator==(const QualityProfile&, const QualityProfile&) = default;
};

struct AnnotationProject;

/// System-level score: sum of EPPTU over all units for `engine_id`.
/// Throws NotFoundError if the engine is not registered.
std::uint64_t hope_score(const AnnotationProject& project, std::string_view engine_id);

/// Builds the full profile for one engine. Throws NotFoundError for unknown engines.
QualityProfile aggregate(const AnnotationProject& project, std::string_view engine_id,
                         CountingSide side = CountingSide::kSource);

}  // namespace hope
