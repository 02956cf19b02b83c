#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hope/core.hpp"

namespace hope {

inline constexpr std::int64_t kSchemaVersion = 1;

using Timestamp = std::chrono::sys_seconds;

struct Engine {
  std::string engine_id;
  std::string display_name;
  std::string description;

  friend bool operator==(const Engine&, const Engine&) = default;
};

/// The persistence root: a corpus of units, the engines that translated it,
/// and every annotation recorded so far.
struct AnnotationProject {
  std::int64_t schema_version = kSchemaVersion;
  std::string project_id;
  std::string name;
  std::string source_lang = "und";
  std::string target_lang = "und";
  std::vector<Engine> engines;
  std::vector<TranslationUnit> units;
  Timestamp created_at{};
  Timestamp modified_at{};

  const Engine* find_engine(std::string_view engine_id) const noexcept;
  bool has_engine(std::string_view engine_id) const noexcept { return find_engine(engine_id) != nullptr; }
  const TranslationUnit* find_unit(std::string_view unit_id) const noexcept;
  TranslationUnit* find_unit(std::string_view unit_id) noexcept;

  friend bool operator==(const AnnotationProject&, const AnnotationProject&) = default;
};

/// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp t);
/// Inverse of format_timestamp; throws DataError on anything else.
Timestamp parse_timestamp(std::string_view s);
/// Current UTC time truncated to seconds.
Timestamp now_utc();

}  // namespace hope
