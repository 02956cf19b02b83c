#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hope/project.hpp"

namespace hope::ingest {

inline constexpr std::string_view kProjectExtension = ".hope";

// ---------------------------------------------------------------------------
// TSV import
// ---------------------------------------------------------------------------

/// Zero-based column indices. The first row is treated as a header iff every
/// mapped cell equals its declared name (id_header, source_header, engine id).
struct TsvMapping {
  std::optional<std::size_t> id_column;
  std::size_t source_column = 0;
  /// engine_id -> column, in the order engines are registered.
  std::vector<std::pair<std::string, std::size_t>> target_columns;
  std::string id_header = "id";
  std::string source_header = "source";
};

struct ImportOptions {
  std::string project_id = "project";
  std::string name;
  std::string source_lang = "und";
  std::string target_lang = "und";
  /// Creation time; the current UTC second when unset.
  std::optional<Timestamp> now;
};

/// One unit per non-empty row, cell text preserved verbatim (only the line
/// terminator is stripped). Units get ids "000001", ... when there is no id
/// column. Throws DataError naming the 1-based line on ragged rows, empty
/// source cells, duplicate ids or invalid UTF-8.
AnnotationProject import_tsv(std::istream& in, const TsvMapping& mapping, const ImportOptions& options = {});

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Every invariant violation in `project`, as readable one-line messages.
/// Empty means valid.
std::vector<std::string> validate_project(const AnnotationProject& project);

/// Violations of the annotation invariants for `unit`'s output from `engine_id`
/// (span bounds measured in code points of that target text).
std::vector<std::string> validate_annotations(const TranslationUnit& unit, std::string_view engine_id,
                                              std::span<const ErrorAnnotation> annotations);

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

/// Canonical document: fixed field order with schema_version first, maps
/// sorted by key, two-space indentation, trailing newline.
std::string serialize_project(const AnnotationProject& project);

/// Throws ParseError (with line/column for syntax errors), UnsupportedSchemaError.
/// Never returns a partially read project.
AnnotationProject parse_project(std::string_view document);

/// Validates, then replaces `destination` atomically. Throws ValidationError.
void save_project(const AnnotationProject& project, const std::filesystem::path& destination);

AnnotationProject load_project(const std::filesystem::path& source);

nlohmann::ordered_json annotation_to_json(const ErrorAnnotation& a);
/// `path` prefixes error messages, e.g. "units[3].annotations.sys1".
std::vector<ErrorAnnotation> annotations_from_json(const nlohmann::ordered_json& j, const std::string& path);

// ---------------------------------------------------------------------------
// Atomic file replacement
// ---------------------------------------------------------------------------

/// Test hook: stop after writing this many bytes of the temporary file and
/// throw SimulatedCrash, leaving the temporary behind as a crash would.
struct WriteFault {
  std::size_t fail_after_bytes = 0;
};

class SimulatedCrash : public std::runtime_error {
public:
  SimulatedCrash() : std::runtime_error("simulated crash during write") {}
};

/// Writes to a sibling temporary file, fsyncs, then renames over `destination`.
/// Readers see either the old or the new contents, never a mix.
void write_file_atomically(const std::filesystem::path& destination, std::string_view content,
                           const WriteFault* fault = nullptr);

}  // namespace hope::ingest
