#include "hope/service.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "hope/ingest.hpp"
#include "hope/report.hpp"

namespace hope::service {

using nlohmann::ordered_json;

namespace {

Response json_response(int status, const ordered_json& body) {
  return {status, "application/json", body.dump(2) + "\n"};
}

Response error_response(int status, const std::string& message) {
  ordered_json j;
  j["error"] = message;
  return json_response(status, j);
}

std::optional<std::uint64_t> parse_unsigned(std::string_view s) {
  std::uint64_t value = 0;
  if (s.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::vector<std::string> split_commas(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const auto piece = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

ordered_json unit_summary(const TranslationUnit& u, const AnnotationProject& p) {
  ordered_json j;
  j["id"] = u.id;
  j["source"] = u.source;
  ordered_json targets = ordered_json::object();
  for (const auto& [k, v] : u.targets) targets[k] = v;
  j["targets"] = std::move(targets);
  ordered_json pe = ordered_json::object();
  for (const auto& [k, v] : u.post_edited) pe[k] = v;
  j["post_edited"] = std::move(pe);
  ordered_json engines = ordered_json::object();
  for (const auto& e : p.engines) {
    const auto anns = u.annotations_for(e.engine_id);
    const auto points = epptu(anns);
    ordered_json ej;
    ej["reviewed"] = u.reviewed_for(e.engine_id);
    ej["epptu"] = points;
    ej["category"] = std::string(name(classify_segment(points)));
    ej["annotations"] = ordered_json::array();
    for (const auto& a : anns) ej["annotations"].push_back(ingest::annotation_to_json(a));
    engines[e.engine_id] = std::move(ej);
  }
  j["engines"] = std::move(engines);
  return j;
}

std::optional<std::string> param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

}  // namespace

// ---------------------------------------------------------------------------
// ProjectStore
// ---------------------------------------------------------------------------

ProjectStore::ProjectStore(const std::filesystem::path& directory) {
  if (!std::filesystem::is_directory(directory)) {
    throw NotFoundError("projects directory not found: " + directory.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& item : std::filesystem::directory_iterator(directory)) {
    if (item.is_regular_file() && item.path().extension() == ingest::kProjectExtension) {
      files.push_back(item.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    add(ingest::load_project(f), f);
  }
}

void ProjectStore::add(AnnotationProject project, std::filesystem::path path) {
  auto id = project.project_id;
  if (entries_.count(id)) throw DataError("duplicate project id '" + id + "' (" + path.string() + ")");
  auto e = std::make_unique<Entry>();
  e->path = std::move(path);
  e->project = std::make_shared<const AnnotationProject>(std::move(project));
  entries_.emplace(std::move(id), std::move(e));
}

std::vector<std::string> ProjectStore::project_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, e] : entries_) out.push_back(id);
  return out;
}

ProjectStore::Entry& ProjectStore::entry(std::string_view project_id) const {
  auto it = entries_.find(project_id);
  if (it == entries_.end()) throw NotFoundError("project not found: " + std::string(project_id));
  return *it->second;
}

Snapshot ProjectStore::snapshot(std::string_view project_id) const {
  Entry& e = entry(project_id);
  std::shared_lock lock(e.guard);
  return {e.project, e.revision};
}

PutResult ProjectStore::put_annotations(std::string_view project_id, std::string_view unit_id,
                                        std::string_view engine_id, std::vector<ErrorAnnotation> annotations,
                                        std::uint64_t expected_revision) {
  Entry& e = entry(project_id);
  std::lock_guard writer(e.writer);

  Snapshot current;
  {
    std::shared_lock lock(e.guard);
    current = {e.project, e.revision};
  }
  if (expected_revision != current.revision) throw ConflictError(current.revision);

  const TranslationUnit* unit = current.project->find_unit(unit_id);
  if (unit == nullptr) throw NotFoundError("unit not found: " + std::string(unit_id));
  if (!current.project->has_engine(engine_id)) throw NotFoundError("engine not found: " + std::string(engine_id));
  if (!unit->targets.count(std::string(engine_id))) {
    throw ValidationError({"unit '" + std::string(unit_id) + "' has no output from engine '" + std::string(engine_id) +
                           "'"});
  }
  auto violations = ingest::validate_annotations(*unit, engine_id, annotations);
  if (!violations.empty()) throw ValidationError(std::move(violations));

  auto next = std::make_shared<AnnotationProject>(*current.project);
  next->find_unit(unit_id)->annotations[std::string(engine_id)] = std::move(annotations);
  next->modified_at = std::max(now_utc(), next->created_at);
  ingest::save_project(*next, e.path);

  PutResult result;
  result.epptu = epptu(next->find_unit(unit_id)->annotations_for(engine_id));
  result.category = classify_segment(result.epptu);
  {
    std::unique_lock lock(e.guard);
    e.project = std::move(next);
    result.new_revision = ++e.revision;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Handlers
// ---------------------------------------------------------------------------

Response handle_health() { return {200, "text/plain; charset=utf-8", "ok\n"}; }

Response handle_list_projects(const ProjectStore& store) {
  ordered_json list = ordered_json::array();
  for (const auto& id : store.project_ids()) {
    const auto snap = store.snapshot(id);
    const auto& p = *snap.project;
    ordered_json j;
    j["project_id"] = p.project_id;
    j["name"] = p.name;
    j["source_lang"] = p.source_lang;
    j["target_lang"] = p.target_lang;
    j["revision"] = snap.revision;
    j["unit_count"] = p.units.size();
    j["engines"] = ordered_json::array();
    for (const auto& e : p.engines) {
      ordered_json ej;
      ej["engine_id"] = e.engine_id;
      ej["display_name"] = e.display_name;
      ej["description"] = e.description;
      j["engines"].push_back(std::move(ej));
    }
    list.push_back(std::move(j));
  }
  ordered_json body;
  body["projects"] = std::move(list);
  return json_response(200, body);
}

Response handle_list_units(const ProjectStore& store, std::string_view project_id,
                           std::optional<std::string_view> cursor, std::optional<std::string_view> page_size) {
  Snapshot snap;
  try {
    snap = store.snapshot(project_id);
  } catch (const NotFoundError& e) {
    return error_response(404, e.what());
  }
  const auto& p = *snap.project;

  std::size_t size = kDefaultPageSize;
  if (page_size && !page_size->empty()) {
    const auto v = parse_unsigned(*page_size);
    if (!v || *v < 1 || *v > kMaxPageSize) return error_response(400, "page_size must be between 1 and 500");
    size = static_cast<std::size_t>(*v);
  }
  std::size_t offset = 0;
  if (cursor && !cursor->empty()) {
    const auto v = parse_unsigned(*cursor);
    if (!v || *v > p.units.size()) return error_response(400, "bad cursor");
    offset = static_cast<std::size_t>(*v);
  }

  const std::size_t end = std::min(p.units.size(), offset + size);
  ordered_json body;
  body["project_id"] = p.project_id;
  body["revision"] = snap.revision;
  body["total_units"] = p.units.size();
  body["units"] = ordered_json::array();
  for (std::size_t k = offset; k < end; ++k) body["units"].push_back(unit_summary(p.units[k], p));
  body["next_cursor"] = end < p.units.size() ? ordered_json(std::to_string(end)) : ordered_json(nullptr);
  return json_response(200, body);
}

Response handle_put_annotations(ProjectStore& store, std::string_view project_id, std::string_view unit_id,
                                std::string_view engine_id, std::string_view body,
                                std::optional<std::string_view> expected_revision) {
  if (!expected_revision) {
    return error_response(428, std::string("missing ") + std::string(kRevisionHeader) + " header");
  }
  const auto revision = parse_unsigned(*expected_revision);
  if (!revision) return error_response(400, "malformed expected revision");

  ordered_json doc;
  try {
    doc = ordered_json::parse(body.begin(), body.end());
  } catch (const nlohmann::json::parse_error& e) {
    return error_response(400, std::string("malformed body: ") + e.what());
  }

  try {
    auto annotations = ingest::annotations_from_json(doc, "$");
    const auto r = store.put_annotations(project_id, unit_id, engine_id, std::move(annotations), *revision);
    ordered_json out;
    out["new_revision"] = r.new_revision;
    out["epptu"] = r.epptu;
    out["category"] = std::string(name(r.category));
    return json_response(200, out);
  } catch (const ParseError& e) {
    ordered_json out;
    out["error"] = "validation failed";
    out["violations"] = ordered_json::array({e.what()});
    return json_response(422, out);
  } catch (const ValidationError& e) {
    ordered_json out;
    out["error"] = "validation failed";
    out["violations"] = e.violations();
    return json_response(422, out);
  } catch (const ConflictError& e) {
    ordered_json out;
    out["error"] = "revision conflict";
    out["current_revision"] = e.current_revision();
    return json_response(409, out);
  } catch (const NotFoundError& e) {
    return error_response(404, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

Response handle_get_report(const ProjectStore& store, std::string_view project_id,
                           std::optional<std::string_view> engines, std::optional<std::string_view> side,
                           std::optional<std::string_view> format, std::optional<std::string_view> allow_partial) {
  Snapshot snap;
  try {
    snap = store.snapshot(project_id);
  } catch (const NotFoundError& e) {
    return error_response(404, e.what());
  }
  const auto& p = *snap.project;

  CountingSide counting = CountingSide::kSource;
  if (side && !side->empty()) {
    const auto s = parse_counting_side(*side);
    if (!s) return error_response(400, "side must be 'source' or 'target'");
    counting = *s;
  }
  report::Format fmt = report::Format::kTable;
  if (format && !format->empty()) {
    const auto f = report::parse_format(*format);
    if (!f) return error_response(400, "format must be 'machine', 'table' or 'plot_data'");
    fmt = *f;
  }
  bool partial = false;
  if (allow_partial) {
    if (*allow_partial == "1" || *allow_partial == "true") {
      partial = true;
    } else if (!(*allow_partial == "0" || *allow_partial == "false" || allow_partial->empty())) {
      return error_response(400, "allow_partial must be true or false");
    }
  }
  std::vector<std::string> ids;
  if (engines && !engines->empty()) {
    ids = split_commas(*engines);
  } else {
    for (const auto& e : p.engines) ids.push_back(e.engine_id);
  }

  try {
    const auto r = report::build_report(p, ids, counting, partial);
    const std::string type = fmt == report::Format::kMachine    ? "application/json"
                             : fmt == report::Format::kPlotData ? "text/tab-separated-values; charset=utf-8"
                                                                : "text/plain; charset=utf-8";
    return {200, type, report::render_report(r, fmt)};
  } catch (const NotFoundError& e) {
    return error_response(404, e.what());
  } catch (const DataError& e) {
    return error_response(422, e.what());
  }
}

// ---------------------------------------------------------------------------
// HTTP wiring
// ---------------------------------------------------------------------------

void register_routes(httplib::Server& server, ProjectStore& store) {
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send(res, handle_health()); });
  server.Get("/projects", [&store](const httplib::Request&, httplib::Response& res) {
    send(res, handle_list_projects(store));
  });
  server.Get(R"(/projects/([^/]+)/units)", [&store](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_list_units(store, req.matches[1].str(), param(req, "cursor"), param(req, "page_size")));
  });
  server.Put(R"(/projects/([^/]+)/units/([^/]+)/engines/([^/]+)/annotations)",
             [&store](const httplib::Request& req, httplib::Response& res) {
               std::optional<std::string_view> revision;
               const std::string header(kRevisionHeader);
               std::string value;
               if (req.has_header(header)) {
                 value = req.get_header_value(header);
                 revision = value;
               }
               send(res, handle_put_annotations(store, req.matches[1].str(), req.matches[2].str(),
                                                req.matches[3].str(), req.body, revision));
             });
  server.Get(R"(/projects/([^/]+)/report)", [&store](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_get_report(store, req.matches[1].str(), param(req, "engines"), param(req, "side"),
                                param(req, "format"), param(req, "allow_partial")));
  });
}

ServeConfig resolve_config(std::optional<std::string> listen_flag, std::optional<std::string> dir_flag) {
  ServeConfig c;
  if (const char* env = std::getenv("HOPE_LISTEN"); env && *env) c.listen = env;
  if (const char* env = std::getenv("HOPE_PROJECTS_DIR"); env && *env) c.projects_dir = env;
  if (listen_flag) c.listen = *listen_flag;
  if (dir_flag) c.projects_dir = *dir_flag;
  return c;
}

std::pair<std::string, int> parse_listen_address(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw DataError("listen address must be host:port, got '" + std::string(address) + "'");
  }
  const auto port = parse_unsigned(address.substr(colon + 1));
  if (!port || *port > 65535) throw DataError("bad port in listen address '" + std::string(address) + "'");
  std::string host(address.substr(0, colon));
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  return {host, static_cast<int>(*port)};
}

int serve(const ServeConfig& config, std::ostream& log) {
  const auto [host, port] = parse_listen_address(config.listen);
  ProjectStore store(config.projects_dir);
  httplib::Server server;
  register_routes(server, store);
  log << "serving " << store.project_ids().size() << " project(s) from " << config.projects_dir.string() << " on "
      << host << ":" << port << std::endl;
  if (!server.listen(host, port)) {
    log << "cannot listen on " << config.listen << std::endl;
    return 1;
  }
  return 0;
}

}  // namespace hope::service
