#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hope/core.hpp"
#include "hope/project.hpp"

namespace hope::report {

/// Differences `a - b` between two engines' profiles.
struct PairDelta {
  std::string a;
  std::string b;
  std::int64_t epp_delta = 0;
  CategoryArray<std::int64_t> segment_deltas{};
  CategoryArray<std::int64_t> word_deltas{};

  friend bool operator==(const PairDelta&, const PairDelta&) = default;
};

struct ComparisonReport {
  std::string project_id;
  CountingSide counting_side = CountingSide::kSource;
  /// One per requested engine, in request order.
  std::vector<QualityProfile> profiles;
  /// One per unordered engine pair (i < j in request order).
  std::vector<PairDelta> deltas;
  /// Snapshot time of the project the report was computed from (its
  /// modified_at), so identical inputs render identical bytes.
  Timestamp generated_at{};
  /// Some units had no review record and were counted as unchanged.
  bool partial = false;

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

/// Profiles and pairwise deltas for at least two registered engines.
/// Without `allow_partial`, every unit must have been reviewed for every
/// listed engine (DataError otherwise). Throws NotFoundError for unknown
/// engines and DataError for fewer than two or repeated engines.
ComparisonReport compare_engines(const AnnotationProject& project, std::span<const std::string> engine_ids,
                                 CountingSide side = CountingSide::kSource, bool allow_partial = false);

/// As compare_engines but also accepts a single engine (no deltas).
ComparisonReport build_report(const AnnotationProject& project, std::span<const std::string> engine_ids,
                              CountingSide side = CountingSide::kSource, bool allow_partial = false);

enum class Format : std::uint8_t { kMachine, kTable, kPlotData };

std::string_view name(Format f) noexcept;
std::optional<Format> parse_format(std::string_view name) noexcept;

std::string render_report(const ComparisonReport& report, Format format);

/// Inverse of render_report(.., Format::kMachine). Throws ParseError.
ComparisonReport parse_machine_report(std::string_view document);

/// Shares in tenths of a percent, rounded by largest remainder so they sum to
/// exactly 1000. nullopt when the total is zero.
std::optional<CategoryArray<std::uint32_t>> percent_tenths(const CategoryArray<std::uint64_t>& counts);

/// 305 -> "30.5".
std::string format_tenths(std::uint32_t tenths);

}  // namespace hope::report
