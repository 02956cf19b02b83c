#include "hope/ingest.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "hope/error.hpp"
#include "hope/text.hpp"

namespace hope::ingest {

using nlohmann::ordered_json;

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string row_error(std::size_t line_no, const std::string& what) {
  return "row " + std::to_string(line_no) + ": " + what;
}

std::string in_quotes(std::string_view s) { return "'" + std::string(s) + "'"; }

// BCP-47 shape only: alphanumeric subtags of 1-8 characters joined by '-'.
bool plausible_language_tag(std::string_view tag) {
  if (tag.empty()) return false;
  std::size_t run = 0;
  for (char c : tag) {
    if (c == '-') {
      if (run == 0) return false;
      run = 0;
      continue;
    }
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    if (!alnum || ++run > 8) return false;
  }
  return run > 0;
}

// --- JSON reading ----------------------------------------------------------

[[noreturn]] void structure_error(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what, 0, 0);
}

void expect_keys(const ordered_json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) structure_error(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      structure_error(path, "unknown field " + in_quotes(key));
    }
  }
}

const ordered_json& member(const ordered_json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) structure_error(path, std::string("missing field ") + in_quotes(key));
  return *it;
}

std::string string_member(const ordered_json& obj, const char* key, const std::string& path) {
  const auto& v = member(obj, key, path);
  if (!v.is_string()) structure_error(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const ordered_json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_string()) structure_error(path + "." + key, "expected a string");
  return it->get<std::string>();
}

std::size_t index_value(const ordered_json& v, const std::string& path) {
  if (!v.is_number_unsigned()) structure_error(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::map<std::string, std::string> string_map(const ordered_json& obj, const char* key, const std::string& path) {
  const auto& m = member(obj, key, path);
  if (!m.is_object()) structure_error(path + "." + key, "expected an object");
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : m.items()) {
    if (!v.is_string()) structure_error(path + "." + key + "." + k, "expected a string");
    out.emplace(k, v.get<std::string>());
  }
  return out;
}

Timestamp timestamp_member(const ordered_json& obj, const char* key, const std::string& path) {
  const std::string s = string_member(obj, key, path);
  try {
    return parse_timestamp(s);
  } catch (const DataError& e) {
    structure_error(path + "." + key, e.what());
  }
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view doc, std::size_t byte) {
  // nlohmann reports the 1-based byte position just past the offending token.
  const std::size_t limit = std::min(byte == 0 ? 0 : byte - 1, doc.size());
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t k = 0; k < limit; ++k) {
    if (doc[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

AnnotationProject project_from_json(const ordered_json& doc) {
  if (!doc.is_object() || doc.empty()) structure_error("$", "expected a project object");
  if (doc.begin().key() != "schema_version") structure_error("$", "schema_version must be the first field");
  const auto& version = doc.front();
  if (!version.is_number_integer()) structure_error("$.schema_version", "expected an integer");
  if (version.get<std::int64_t>() != kSchemaVersion) throw UnsupportedSchemaError(version.get<std::int64_t>());

  expect_keys(doc, "$",
              {"schema_version", "project_id", "name", "source_lang", "target_lang", "created_at", "modified_at",
               "engines", "units"});
  AnnotationProject p;
  p.schema_version = kSchemaVersion;
  p.project_id = string_member(doc, "project_id", "$");
  p.name = string_member(doc, "name", "$");
  p.source_lang = string_member(doc, "source_lang", "$");
  p.target_lang = string_member(doc, "target_lang", "$");
  p.created_at = timestamp_member(doc, "created_at", "$");
  p.modified_at = timestamp_member(doc, "modified_at", "$");

  const auto& engines = member(doc, "engines", "$");
  if (!engines.is_array()) structure_error("$.engines", "expected an array");
  for (std::size_t k = 0; k < engines.size(); ++k) {
    const std::string path = "$.engines[" + std::to_string(k) + "]";
    expect_keys(engines[k], path, {"engine_id", "display_name", "description"});
    p.engines.push_back({string_member(engines[k], "engine_id", path), string_member(engines[k], "display_name", path),
                         string_member(engines[k], "description", path)});
  }

  const auto& units = member(doc, "units", "$");
  if (!units.is_array()) structure_error("$.units", "expected an array");
  p.units.reserve(units.size());
  for (std::size_t k = 0; k < units.size(); ++k) {
    const std::string path = "$.units[" + std::to_string(k) + "]";
    const auto& u = units[k];
    expect_keys(u, path, {"id", "source", "targets", "post_edited", "annotations"});
    TranslationUnit unit;
    unit.id = string_member(u, "id", path);
    unit.source = string_member(u, "source", path);
    unit.targets = string_map(u, "targets", path);
    unit.post_edited = string_map(u, "post_edited", path);
    const auto& anns = member(u, "annotations", path);
    if (!anns.is_object()) structure_error(path + ".annotations", "expected an object");
    for (const auto& [engine, list] : anns.items()) {
      unit.annotations.emplace(engine, annotations_from_json(list, path + ".annotations." + engine));
    }
    p.units.push_back(std::move(unit));
  }
  return p;
}

ordered_json string_map_json(const std::map<std::string, std::string>& m) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

std::atomic<unsigned> temp_counter{0};

void write_all(int fd, const char* data, std::size_t size, const std::filesystem::path& path) {
  while (size > 0) {
    const ssize_t n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("write failed for " + path.string() + ": " + std::strerror(errno));
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

AnnotationProject import_tsv(std::istream& in, const TsvMapping& mapping, const ImportOptions& options) {
  if (mapping.target_columns.empty()) {
    throw DataError("column mapping names no engine columns");
  }
  std::size_t max_column = mapping.source_column;
  if (mapping.id_column) max_column = std::max(max_column, *mapping.id_column);
  std::set<std::string> engine_ids;
  for (const auto& [engine, column] : mapping.target_columns) {
    if (engine.empty()) throw DataError("column mapping has an empty engine id");
    if (!engine_ids.insert(engine).second) throw DataError("column mapping repeats engine " + in_quotes(engine));
    max_column = std::max(max_column, column);
  }

  AnnotationProject p;
  p.project_id = options.project_id;
  p.name = options.name.empty() ? options.project_id : options.name;
  p.source_lang = options.source_lang;
  p.target_lang = options.target_lang;
  p.created_at = options.now.value_or(now_utc());
  p.modified_at = p.created_at;
  for (const auto& [engine, column] : mapping.target_columns) {
    p.engines.push_back({engine, engine, ""});
  }

  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  std::size_t ordinal = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!text::is_valid_utf8(line)) throw DataError(row_error(line_no, "invalid UTF-8"));

    const auto fields = split_tabs(line);
    if (fields.size() < max_column + 1) {
      throw DataError(row_error(line_no, "expected at least " + std::to_string(max_column + 1) + " fields, found " +
                                             std::to_string(fields.size())));
    }

    if (line_no == 1) {
      bool header = fields[mapping.source_column] == mapping.source_header;
      if (mapping.id_column) header = header && fields[*mapping.id_column] == mapping.id_header;
      for (const auto& [engine, column] : mapping.target_columns) header = header && fields[column] == engine;
      if (header) continue;
    }

    TranslationUnit unit;
    ++ordinal;
    if (mapping.id_column) {
      unit.id = fields[*mapping.id_column];
      if (unit.id.empty()) throw DataError(row_error(line_no, "empty unit id"));
    } else {
      unit.id = std::to_string(ordinal);
      if (unit.id.size() < 6) unit.id.insert(0, 6 - unit.id.size(), '0');
    }
    if (!seen_ids.insert(unit.id).second) throw DataError(row_error(line_no, "duplicate unit id " + in_quotes(unit.id)));

    unit.source = fields[mapping.source_column];
    if (unit.source.empty()) throw DataError(row_error(line_no, "empty source cell"));
    for (const auto& [engine, column] : mapping.target_columns) {
      unit.targets.emplace(engine, fields[column]);
    }
    p.units.push_back(std::move(unit));
  }
  return p;
}

std::vector<std::string> validate_annotations(const TranslationUnit& unit, std::string_view engine_id,
                                              std::span<const ErrorAnnotation> annotations) {
  std::vector<std::string> out;
  const auto target = unit.targets.find(std::string(engine_id));
  const std::size_t length = target == unit.targets.end() ? 0 : text::code_point_length(target->second);
  for (std::size_t k = 0; k < annotations.size(); ++k) {
    const auto& span = annotations[k].span;
    if (!span) continue;
    const std::string where =
        "unit " + in_quotes(unit.id) + " engine " + in_quotes(engine_id) + " annotation " + std::to_string(k) + ": ";
    if (span->start >= span->end) {
      out.push_back(where + "span start >= end (" + std::to_string(span->start) + ", " + std::to_string(span->end) +
                    ")");
    } else if (span->end > length) {
      out.push_back(where + "span end " + std::to_string(span->end) + " exceeds target length " +
                    std::to_string(length));
    }
  }
  return out;
}

std::vector<std::string> validate_project(const AnnotationProject& project) {
  std::vector<std::string> out;
  if (project.schema_version != kSchemaVersion) {
    out.push_back("unsupported schema_version " + std::to_string(project.schema_version));
  }
  if (project.project_id.empty()) out.push_back("empty project_id");
  if (!plausible_language_tag(project.source_lang)) out.push_back("malformed source_lang " + in_quotes(project.source_lang));
  if (!plausible_language_tag(project.target_lang)) out.push_back("malformed target_lang " + in_quotes(project.target_lang));

  std::set<std::string_view> engines;
  for (const auto& e : project.engines) {
    if (e.engine_id.empty()) {
      out.push_back("empty engine id");
    } else if (!engines.insert(e.engine_id).second) {
      out.push_back("duplicate engine id " + in_quotes(e.engine_id));
    }
  }

  std::set<std::string_view> unit_ids;
  for (std::size_t k = 0; k < project.units.size(); ++k) {
    const auto& u = project.units[k];
    if (u.id.empty()) {
      out.push_back("unit #" + std::to_string(k) + ": empty unit id");
    } else if (!unit_ids.insert(u.id).second) {
      out.push_back("unit " + in_quotes(u.id) + ": duplicate unit id");
    }
    const std::string where = "unit " + in_quotes(u.id) + ": ";
    for (const auto& [engine, text] : u.targets) {
      if (!engines.count(engine)) out.push_back(where + "target for unregistered engine " + in_quotes(engine));
    }
    for (const auto& [engine, text] : u.post_edited) {
      if (!engines.count(engine)) {
        out.push_back(where + "post-edit for unregistered engine " + in_quotes(engine));
      } else if (!u.targets.count(engine)) {
        out.push_back(where + "post-edit for engine " + in_quotes(engine) + " without a target");
      }
    }
    for (const auto& [engine, list] : u.annotations) {
      if (!engines.count(engine)) {
        out.push_back(where + "annotation references unregistered engine " + in_quotes(engine));
        continue;
      }
      if (!u.targets.count(engine)) {
        out.push_back(where + "annotations for engine " + in_quotes(engine) + " without a target");
        continue;
      }
      auto spans = validate_annotations(u, engine, list);
      out.insert(out.end(), std::make_move_iterator(spans.begin()), std::make_move_iterator(spans.end()));
    }
  }
  return out;
}

ordered_json annotation_to_json(const ErrorAnnotation& a) {
  ordered_json j;
  j["type"] = std::string(code(a.error_type));
  j["severity"] = std::string(name(a.severity));
  if (a.span) j["span"] = ordered_json::array({a.span->start, a.span->end});
  if (a.note) j["note"] = *a.note;
  if (a.annotator_id) j["annotator_id"] = *a.annotator_id;
  return j;
}

std::vector<ErrorAnnotation> annotations_from_json(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) structure_error(path, "expected an array");
  std::vector<ErrorAnnotation> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string item = path + "[" + std::to_string(k) + "]";
    expect_keys(j[k], item, {"type", "severity", "span", "note", "annotator_id"});
    ErrorAnnotation a;
    const std::string type = string_member(j[k], "type", item);
    const auto t = parse_error_type(type);
    if (!t) structure_error(item + ".type", "unknown error type " + in_quotes(type));
    a.error_type = *t;
    const std::string sev = string_member(j[k], "severity", item);
    const auto s = parse_severity(sev);
    if (!s) structure_error(item + ".severity", "unknown severity " + in_quotes(sev));
    a.severity = *s;
    if (auto it = j[k].find("span"); it != j[k].end()) {
      if (!it->is_array() || it->size() != 2) structure_error(item + ".span", "expected [start, end]");
      a.span = Span{index_value((*it)[0], item + ".span[0]"), index_value((*it)[1], item + ".span[1]")};
    }
    a.note = optional_string(j[k], "note", item);
    a.annotator_id = optional_string(j[k], "annotator_id", item);
    out.push_back(std::move(a));
  }
  return out;
}

std::string serialize_project(const AnnotationProject& project) {
  ordered_json doc;
  doc["schema_version"] = project.schema_version;
  doc["project_id"] = project.project_id;
  doc["name"] = project.name;
  doc["source_lang"] = project.source_lang;
  doc["target_lang"] = project.target_lang;
  doc["created_at"] = format_timestamp(project.created_at);
  doc["modified_at"] = format_timestamp(project.modified_at);
  doc["engines"] = ordered_json::array();
  for (const auto& e : project.engines) {
    ordered_json ej;
    ej["engine_id"] = e.engine_id;
    ej["display_name"] = e.display_name;
    ej["description"] = e.description;
    doc["engines"].push_back(std::move(ej));
  }
  doc["units"] = ordered_json::array();
  for (const auto& u : project.units) {
    ordered_json uj;
    uj["id"] = u.id;
    uj["source"] = u.source;
    uj["targets"] = string_map_json(u.targets);
    uj["post_edited"] = string_map_json(u.post_edited);
    ordered_json anns = ordered_json::object();
    for (const auto& [engine, list] : u.annotations) {
      ordered_json arr = ordered_json::array();
      for (const auto& a : list) arr.push_back(annotation_to_json(a));
      anns[engine] = std::move(arr);
    }
    uj["annotations"] = std::move(anns);
    doc["units"].push_back(std::move(uj));
  }
  return doc.dump(2) + "\n";
}

AnnotationProject parse_project(std::string_view document) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = line_and_column(document, e.byte);
    throw ParseError("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         e.what(),
                     line, column);
  }
  return project_from_json(doc);
}

void save_project(const AnnotationProject& project, const std::filesystem::path& destination) {
  auto violations = validate_project(project);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  write_file_atomically(destination, serialize_project(project));
}

AnnotationProject load_project(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw NotFoundError("cannot open project file " + source.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_project(buffer.str());
}

void write_file_atomically(const std::filesystem::path& destination, std::string_view content,
                           const WriteFault* fault) {
  const auto dir = destination.has_parent_path() ? destination.parent_path() : std::filesystem::path(".");
  const auto temp = dir / ("." + destination.filename().string() + ".tmp-" + std::to_string(::getpid()) + "-" +
                           std::to_string(temp_counter.fetch_add(1)));

  const int fd = ::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("cannot create " + temp.string() + ": " + std::strerror(errno));

  if (fault) {
    write_all(fd, content.data(), std::min(fault->fail_after_bytes, content.size()), temp);
    ::close(fd);
    throw SimulatedCrash();
  }

  try {
    write_all(fd, content.data(), content.size(), temp);
    if (::fsync(fd) != 0) throw Error("fsync failed for " + temp.string() + ": " + std::strerror(errno));
  } catch (...) {
    ::close(fd);
    ::unlink(temp.c_str());
    throw;
  }
  ::close(fd);
  if (::rename(temp.c_str(), destination.c_str()) != 0) {
    const int err = errno;
    ::unlink(temp.c_str());
    throw Error("cannot replace " + destination.string() + ": " + std::strerror(err));
  }
  // Persist the rename itself.
  const int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

}  // namespace hope::ingest
