#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "hope/error.hpp"
#include "hope/project.hpp"

namespace httplib {
class Server;
}

namespace hope::service {

inline constexpr std::string_view kRevisionHeader = "X-Expected-Revision";
inline constexpr std::size_t kDefaultPageSize = 50;
inline constexpr std::size_t kMaxPageSize = 500;

/// Raised when a mutation names a revision other than the current one.
class ConflictError : public Error {
public:
  explicit ConflictError(std::uint64_t current)
      : Error("revision conflict; current revision is " + std::to_string(current)), current_(current) {}

  std::uint64_t current_revision() const noexcept { return current_; }

private:
  std::uint64_t current_;
};

struct Snapshot {
  std::shared_ptr<const AnnotationProject> project;
  std::uint64_t revision = 0;
};

struct PutResult {
  std::uint64_t new_revision = 0;
  std::uint64_t epptu = 0;
  SegmentCategory category = SegmentCategory::kUnchanged;
};

/// Open projects keyed by project_id, each behind a revision gate.
///
/// Reads hand out immutable snapshots. Mutations on one project are
/// serialized; each one checks the expected revision, persists the new
/// project file atomically, then publishes the new snapshot.
class ProjectStore {
public:
  /// Opens every `*.hope` file in `directory`. Throws on unreadable files or
  /// two files sharing a project_id.
  explicit ProjectStore(const std::filesystem::path& directory);

  /// Registers an in-memory project persisted at `path`.
  void add(AnnotationProject project, std::filesystem::path path);

  std::vector<std::string> project_ids() const;
  /// Throws NotFoundError.
  Snapshot snapshot(std::string_view project_id) const;

  /// Replaces the annotation list of one unit/engine. Throws NotFoundError,
  /// ConflictError, ValidationError; on any throw the stored state is unchanged.
  PutResult put_annotations(std::string_view project_id, std::string_view unit_id, std::string_view engine_id,
                            std::vector<ErrorAnnotation> annotations, std::uint64_t expected_revision);

private:
  struct Entry {
    std::filesystem::path path;
    std::mutex writer;
    mutable std::shared_mutex guard;
    std::shared_ptr<const AnnotationProject> project;
    std::uint64_t revision = 1;
  };

  Entry& entry(std::string_view project_id) const;

  std::map<std::string, std::unique_ptr<Entry>, std::less<>> entries_;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

Response handle_health();
Response handle_list_projects(const ProjectStore& store);
/// `cursor` is the offset returned as next_cursor by the previous page.
Response handle_list_units(const ProjectStore& store, std::string_view project_id,
                           std::optional<std::string_view> cursor, std::optional<std::string_view> page_size);
/// `body` is a JSON array of annotations in project-file form.
Response handle_put_annotations(ProjectStore& store, std::string_view project_id, std::string_view unit_id,
                                std::string_view engine_id, std::string_view body,
                                std::optional<std::string_view> expected_revision);
/// `engines` is comma-separated (all registered engines when absent).
Response handle_get_report(const ProjectStore& store, std::string_view project_id,
                           std::optional<std::string_view> engines, std::optional<std::string_view> side,
                           std::optional<std::string_view> format, std::optional<std::string_view> allow_partial);

void register_routes(httplib::Server& server, ProjectStore& store);

struct ServeConfig {
  std::string listen = "127.0.0.1:8080";
  std::filesystem::path projects_dir = ".";
};

/// Flags win over HOPE_LISTEN / HOPE_PROJECTS_DIR, which win over defaults.
ServeConfig resolve_config(std::optional<std::string> listen_flag, std::optional<std::string> dir_flag);

/// Splits "host:port"; throws DataError.
std::pair<std::string, int> parse_listen_address(std::string_view address);

/// Blocks serving HTTP until the process is stopped.
int serve(const ServeConfig& config, std::ostream& log);

}  // namespace hope::service
