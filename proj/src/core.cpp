#include "hope/core.hpp"

#include <algorithm>

#include "hope/error.hpp"
#include "hope/project.hpp"
#include "hope/text.hpp"

namespace hope {

namespace {

struct ErrorTypeInfo {
  std::string_view code;
  std::string_view name;
  std::string_view definition;
};

constexpr std::array<ErrorTypeInfo, kErrorTypeCount> kErrorTypeInfo = {{
    {"IMP", "Impact",
     "Literal or flat rendering that weakens the effect the text is meant to have on its audience."},
    {"RAM", "Required Adaptation Missing",
     "The source is wrong or the target market needs an adaptation, and the translation does not supply it."},
    {"TRM", "Terminology",
     "A domain or client term is rendered incorrectly or inconsistently."},
    {"UGR", "Ungrammatical",
     "The target breaks grammar rules of the target language: agreement, morphology or syntax."},
    {"MIS", "Mistranslation",
     "The meaning of the source is rendered incorrectly."},
    {"STL", "Style",
     "The target is correct but awkward, unidiomatic, or off the style guide."},
    {"PRF", "Proofreading",
     "Spelling, punctuation, spacing, typography or formatting slip."},
    {"PRN", "Proper Name",
     "A name of a person, product, organization or place is rendered incorrectly."},
}};

constexpr std::array<std::string_view, kSeverityCount> kSeverityNames = {
    "minor", "medium", "major", "severe", "critical",
};

constexpr std::array<std::string_view, kSegmentCategoryCount> kCategoryNames = {
    "unchanged", "good_enough", "must_fix",
};

const Engine& require_engine(const AnnotationProject& project, std::string_view engine_id) {
  const Engine* e = project.find_engine(engine_id);
  if (e == nullptr) {
    throw NotFoundError("engine not found: " + std::string(engine_id));
  }
  return *e;
}

}  // namespace

std::string_view code(ErrorType t) noexcept { return kErrorTypeInfo[static_cast<std::size_t>(t)].code; }
std::string_view display_name(ErrorType t) noexcept { return kErrorTypeInfo[static_cast<std::size_t>(t)].name; }
std::string_view definition(ErrorType t) noexcept {
  return kErrorTypeInfo[static_cast<std::size_t>(t)].definition;
}

std::optional<ErrorType> parse_error_type(std::string_view c) noexcept {
  for (ErrorType t : kAllErrorTypes) {
    if (code(t) == c) {
      return t;
    }
  }
  return std::nullopt;
}

std::string_view name(Severity s) noexcept { return kSeverityNames[static_cast<std::size_t>(s)]; }

std::optional<Severity> parse_severity(std::string_view n) noexcept {
  for (Severity s : kAllSeverities) {
    if (name(s) == n) {
      return s;
    }
  }
  return std::nullopt;
}

std::string_view name(SegmentCategory c) noexcept { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<SegmentCategory> parse_segment_category(std::string_view n) noexcept {
  for (SegmentCategory c : kAllSegmentCategories) {
    if (name(c) == n) {
      return c;
    }
  }
  return std::nullopt;
}

std::string_view name(CountingSide side) noexcept { return side == CountingSide::kSource ? "source" : "target"; }

std::optional<CountingSide> parse_counting_side(std::string_view n) noexcept {
  if (n == "source") return CountingSide::kSource;
  if (n == "target") return CountingSide::kTarget;
  return std::nullopt;
}

std::span<const ErrorAnnotation> TranslationUnit::annotations_for(std::string_view engine_id) const {
  auto it = annotations.find(std::string(engine_id));
  if (it == annotations.end()) {
    return {};
  }
  return it->second;
}

bool TranslationUnit::reviewed_for(std::string_view engine_id) const {
  return annotations.find(std::string(engine_id)) != annotations.end();
}

std::uint64_t epptu(std::span<const ErrorAnnotation> annotations) noexcept {
  std::uint64_t total = 0;
  for (const auto& a : annotations) {
    total += weight(a.severity);
  }
  return total;
}

std::size_t word_count(std::string_view text) {
  return text::split_whitespace(text::nfc(text)).size();
}

std::uint64_t hope_score(const AnnotationProject& project, std::string_view engine_id) {
  require_engine(project, engine_id);
  std::uint64_t total = 0;
  for (const auto& unit : project.units) {
    total += epptu(unit.annotations_for(engine_id));
  }
  return total;
}

QualityProfile aggregate(const AnnotationProject& project, std::string_view engine_id, CountingSide side) {
  const Engine& engine = require_engine(project, engine_id);

  QualityProfile p;
  p.engine_id = engine.engine_id;
  for (const auto& unit : project.units) {
    const auto anns = unit.annotations_for(engine_id);
    for (const auto& a : anns) {
      ++p.matrix[static_cast<std::size_t>(a.error_type)][static_cast<std::size_t>(a.severity)];
    }
    const std::uint64_t points = epptu(anns);
    const auto category = static_cast<std::size_t>(classify_segment(points));

    std::uint64_t words = 0;
    if (side == CountingSide::kSource) {
      words = word_count(unit.source);
    } else if (auto it = unit.targets.find(engine.engine_id); it != unit.targets.end()) {
      words = word_count(it->second);
    }

    p.total_epp += points;
    ++p.segment_counts[category];
    p.word_counts[category] += words;
    ++p.total_segments;
    p.total_words += words;
    ++p.epptu_histogram[points];
    if (!unit.reviewed_for(engine_id)) {
      ++p.unreviewed_segments;
    }
  }
  return p;
}

}  // namespace hope
