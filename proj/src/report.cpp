#include "hope/report.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "hope/error.hpp"

namespace hope::report {

using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 3> kFormatNames = {"machine", "table", "plot_data"};

template <typename T>
ordered_json category_json(const CategoryArray<T>& values) {
  ordered_json j;
  for (SegmentCategory c : kAllSegmentCategories) j[std::string(name(c))] = values[static_cast<std::size_t>(c)];
  return j;
}

ordered_json percent_json(const CategoryArray<std::uint64_t>& counts) {
  const auto tenths = percent_tenths(counts);
  ordered_json j;
  for (SegmentCategory c : kAllSegmentCategories) {
    const std::string key(name(c));
    if (tenths) {
      j[key] = static_cast<double>((*tenths)[static_cast<std::size_t>(c)]) / 10.0;
    } else {
      j[key] = nullptr;
    }
  }
  return j;
}

ordered_json profile_json(const QualityProfile& p) {
  ordered_json j;
  j["engine_id"] = p.engine_id;
  j["total_epp"] = p.total_epp;
  j["total_segments"] = p.total_segments;
  j["total_words"] = p.total_words;
  j["unreviewed_segments"] = p.unreviewed_segments;
  j["segment_counts"] = category_json(p.segment_counts);
  j["segment_percent"] = percent_json(p.segment_counts);
  j["word_counts"] = category_json(p.word_counts);
  j["word_percent"] = percent_json(p.word_counts);
  ordered_json matrix;
  for (ErrorType t : kAllErrorTypes) {
    ordered_json row;
    for (Severity s : kAllSeverities) row[std::string(name(s))] = p.count(t, s);
    matrix[std::string(code(t))] = std::move(row);
  }
  j["matrix"] = std::move(matrix);
  ordered_json hist = ordered_json::array();
  for (const auto& [points, n] : p.epptu_histogram) hist.push_back(ordered_json::array({points, n}));
  j["epptu_histogram"] = std::move(hist);
  return j;
}

// --- machine-format reading ---

[[noreturn]] void bad(const std::string& path, const std::string& what) { throw ParseError(path + ": " + what, 0, 0); }

const ordered_json& at(const ordered_json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) bad(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(path, std::string("missing field '") + key + "'");
  return *it;
}

std::uint64_t as_count(const ordered_json& v, const std::string& path) {
  if (!v.is_number_unsigned()) bad(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::int64_t as_int(const ordered_json& v, const std::string& path) {
  if (!v.is_number_integer()) bad(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::string as_string(const ordered_json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

template <typename T, typename Read>
CategoryArray<T> read_categories(const ordered_json& obj, const std::string& path, Read read) {
  CategoryArray<T> out{};
  for (SegmentCategory c : kAllSegmentCategories) {
    const std::string key(name(c));
    out[static_cast<std::size_t>(c)] = read(at(obj, key.c_str(), path), path + "." + key);
  }
  return out;
}

QualityProfile read_profile(const ordered_json& j, const std::string& path) {
  QualityProfile p;
  p.engine_id = as_string(at(j, "engine_id", path), path + ".engine_id");
  p.total_epp = as_count(at(j, "total_epp", path), path + ".total_epp");
  p.total_segments = as_count(at(j, "total_segments", path), path + ".total_segments");
  p.total_words = as_count(at(j, "total_words", path), path + ".total_words");
  p.unreviewed_segments = as_count(at(j, "unreviewed_segments", path), path + ".unreviewed_segments");
  p.segment_counts = read_categories<std::uint64_t>(at(j, "segment_counts", path), path + ".segment_counts", as_count);
  p.word_counts = read_categories<std::uint64_t>(at(j, "word_counts", path), path + ".word_counts", as_count);
  const auto& matrix = at(j, "matrix", path);
  for (ErrorType t : kAllErrorTypes) {
    const std::string tc(code(t));
    const auto& row = at(matrix, tc.c_str(), path + ".matrix");
    for (Severity s : kAllSeverities) {
      const std::string sn(name(s));
      p.matrix[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)] =
          as_count(at(row, sn.c_str(), path + ".matrix." + tc), path + ".matrix." + tc + "." + sn);
    }
  }
  const auto& hist = at(j, "epptu_histogram", path);
  if (!hist.is_array()) bad(path + ".epptu_histogram", "expected an array");
  for (const auto& pair : hist) {
    if (!pair.is_array() || pair.size() != 2) bad(path + ".epptu_histogram", "expected [epptu, count] pairs");
    p.epptu_histogram[as_count(pair[0], path + ".epptu_histogram")] = as_count(pair[1], path + ".epptu_histogram");
  }
  return p;
}

// --- table rendering ---

std::string signed_str(std::int64_t v) { return (v > 0 ? "+" : "") + std::to_string(v); }

std::string percent_cell(const std::optional<CategoryArray<std::uint32_t>>& tenths, std::size_t k) {
  return tenths ? format_tenths((*tenths)[k]) + "%" : "n/a";
}

void render_profile_table(std::ostream& os, const QualityProfile& p) {
  os << "== Engine " << p.engine_id << " ==\n";
  os << "Total EPP: " << p.total_epp << "\n";
  os << "Segments: " << p.total_segments << "  Words: " << p.total_words;
  if (p.unreviewed_segments > 0) os << "  Unreviewed segments: " << p.unreviewed_segments;
  os << "\n\n";

  os << "Error matrix (type x severity)\n";
  os << std::left << std::setw(6) << "type" << std::right;
  for (Severity s : kAllSeverities) os << std::setw(10) << name(s);
  os << std::setw(8) << "count" << std::setw(8) << "points" << "\n";
  std::array<std::uint64_t, kSeverityCount> column_totals{};
  std::uint64_t grand_count = 0;
  for (ErrorType t : kAllErrorTypes) {
    os << std::left << std::setw(6) << code(t) << std::right;
    std::uint64_t count = 0;
    std::uint64_t points = 0;
    for (Severity s : kAllSeverities) {
      const auto n = p.count(t, s);
      os << std::setw(10) << n;
      count += n;
      points += n * weight(s);
      column_totals[static_cast<std::size_t>(s)] += n;
    }
    grand_count += count;
    os << std::setw(8) << count << std::setw(8) << points << "\n";
  }
  os << std::left << std::setw(6) << "total" << std::right;
  for (auto n : column_totals) os << std::setw(10) << n;
  os << std::setw(8) << grand_count << std::setw(8) << p.total_epp << "\n\n";

  os << "Quality indicators (segment level vs word level)\n";
  os << std::left << std::setw(13) << "category" << std::right << std::setw(10) << "segments" << std::setw(9)
     << "seg %" << std::setw(10) << "words" << std::setw(9) << "word %" << "\n";
  const auto seg = percent_tenths(p.segment_counts);
  const auto words = percent_tenths(p.word_counts);
  for (SegmentCategory c : kAllSegmentCategories) {
    const auto k = static_cast<std::size_t>(c);
    os << std::left << std::setw(13) << name(c) << std::right << std::setw(10) << p.segment_counts[k] << std::setw(9)
       << percent_cell(seg, k) << std::setw(10) << p.word_counts[k] << std::setw(9) << percent_cell(words, k) << "\n";
  }
  os << std::left << std::setw(13) << "total" << std::right << std::setw(10) << p.total_segments << std::setw(9)
     << (seg ? "100.0%" : "n/a") << std::setw(10) << p.total_words << std::setw(9) << (words ? "100.0%" : "n/a")
     << "\n\n";

  os << "EPPTU distribution:";
  if (p.epptu_histogram.empty()) os << " (none)";
  for (const auto& [points, n] : p.epptu_histogram) os << " " << points << ":" << n;
  os << "\n\n";
}

void render_delta_table(std::ostream& os, const PairDelta& d) {
  os << "== Delta " << d.a << " - " << d.b << " ==\n";
  os << "EPP: " << signed_str(d.epp_delta) << "\n";
  os << std::left << std::setw(13) << "category" << std::right << std::setw(10) << "segments" << std::setw(10)
     << "words" << "\n";
  for (SegmentCategory c : kAllSegmentCategories) {
    const auto k = static_cast<std::size_t>(c);
    os << std::left << std::setw(13) << name(c) << std::right << std::setw(10) << signed_str(d.segment_deltas[k])
       << std::setw(10) << signed_str(d.word_deltas[k]) << "\n";
  }
  os << "\n";
}

std::string render_table(const ComparisonReport& r) {
  std::ostringstream os;
  os << "HOPE quality report\n";
  os << "Project: " << r.project_id << "\n";
  os << "Counting side: " << name(r.counting_side) << "\n";
  os << "Generated at: " << format_timestamp(r.generated_at) << "\n";
  os << "Engines:";
  for (const auto& p : r.profiles) os << " " << p.engine_id;
  os << "\n";
  if (r.partial) os << "Note: unreviewed units are counted as unchanged\n";
  os << "\n";
  for (const auto& p : r.profiles) render_profile_table(os, p);
  for (const auto& d : r.deltas) render_delta_table(os, d);
  return os.str();
}

std::string render_plot_data(const ComparisonReport& r) {
  std::ostringstream os;
  os << "engine\tlevel\tcategory\tcount\tpercent\n";
  for (const auto& p : r.profiles) {
    const std::array<std::pair<std::string_view, const CategoryArray<std::uint64_t>*>, 2> levels = {{
        {"segment", &p.segment_counts},
        {"word", &p.word_counts},
    }};
    for (const auto& [level, counts] : levels) {
      const auto tenths = percent_tenths(*counts);
      for (SegmentCategory c : kAllSegmentCategories) {
        const auto k = static_cast<std::size_t>(c);
        os << p.engine_id << '\t' << level << '\t' << name(c) << '\t' << (*counts)[k] << '\t'
           << (tenths ? format_tenths((*tenths)[k]) : "n/a") << '\n';
      }
    }
  }
  return os.str();
}

std::string render_machine(const ComparisonReport& r) {
  ordered_json j;
  j["project_id"] = r.project_id;
  j["counting_side"] = std::string(name(r.counting_side));
  j["generated_at"] = format_timestamp(r.generated_at);
  j["partial"] = r.partial;
  j["profiles"] = ordered_json::array();
  for (const auto& p : r.profiles) j["profiles"].push_back(profile_json(p));
  j["deltas"] = ordered_json::array();
  for (const auto& d : r.deltas) {
    ordered_json dj;
    dj["a"] = d.a;
    dj["b"] = d.b;
    dj["epp_delta"] = d.epp_delta;
    dj["segment_deltas"] = category_json(d.segment_deltas);
    dj["word_deltas"] = category_json(d.word_deltas);
    j["deltas"].push_back(std::move(dj));
  }
  return j.dump(2) + "\n";
}

template <typename T>
CategoryArray<std::int64_t> difference(const CategoryArray<T>& a, const CategoryArray<T>& b) {
  CategoryArray<std::int64_t> out{};
  for (std::size_t k = 0; k < kSegmentCategoryCount; ++k) {
    out[k] = static_cast<std::int64_t>(a[k]) - static_cast<std::int64_t>(b[k]);
  }
  return out;
}

}  // namespace

std::string_view name(Format f) noexcept { return kFormatNames[static_cast<std::size_t>(f)]; }

std::optional<Format> parse_format(std::string_view n) noexcept {
  for (std::size_t k = 0; k < kFormatNames.size(); ++k) {
    if (kFormatNames[k] == n) return static_cast<Format>(k);
  }
  return std::nullopt;
}

std::optional<CategoryArray<std::uint32_t>> percent_tenths(const CategoryArray<std::uint64_t>& counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) return std::nullopt;

  CategoryArray<std::uint32_t> tenths{};
  CategoryArray<std::uint64_t> remainder{};
  std::uint32_t assigned = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    tenths[k] = static_cast<std::uint32_t>(counts[k] * 1000 / total);
    remainder[k] = counts[k] * 1000 % total;
    assigned += tenths[k];
  }
  std::array<std::size_t, kSegmentCategoryCount> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < 1000; ++k, ++assigned) {
    ++tenths[order[k]];
  }
  return tenths;
}

std::string format_tenths(std::uint32_t tenths) {
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

ComparisonReport build_report(const AnnotationProject& project, std::span<const std::string> engine_ids,
                              CountingSide side, bool allow_partial) {
  if (engine_ids.empty()) throw DataError("no engines requested");
  std::set<std::string_view> seen;
  for (const auto& id : engine_ids) {
    if (!seen.insert(id).second) throw DataError("engine listed twice: " + id);
    if (!project.has_engine(id)) throw NotFoundError("engine not found: " + id);
  }

  ComparisonReport r;
  r.project_id = project.project_id;
  r.counting_side = side;
  r.generated_at = project.modified_at;
  for (const auto& id : engine_ids) {
    QualityProfile p = aggregate(project, id, side);
    if (p.unreviewed_segments > 0) {
      if (!allow_partial) {
        throw DataError("engine '" + id + "' has " + std::to_string(p.unreviewed_segments) +
                        " unreviewed units; allow partial reports to count them as unchanged");
      }
      r.partial = true;
    }
    r.profiles.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < r.profiles.size(); ++i) {
    for (std::size_t j = i + 1; j < r.profiles.size(); ++j) {
      const auto& a = r.profiles[i];
      const auto& b = r.profiles[j];
      PairDelta d;
      d.a = a.engine_id;
      d.b = b.engine_id;
      d.epp_delta = static_cast<std::int64_t>(a.total_epp) - static_cast<std::int64_t>(b.total_epp);
      d.segment_deltas = difference(a.segment_counts, b.segment_counts);
      d.word_deltas = difference(a.word_counts, b.word_counts);
      r.deltas.push_back(std::move(d));
    }
  }
  return r;
}

ComparisonReport compare_engines(const AnnotationProject& project, std::span<const std::string> engine_ids,
                                 CountingSide side, bool allow_partial) {
  if (engine_ids.size() < 2) throw DataError("comparison needs at least two engines");
  return build_report(project, engine_ids, side, allow_partial);
}

std::string render_report(const ComparisonReport& report, Format format) {
  switch (format) {
    case Format::kMachine:
      return render_machine(report);
    case Format::kTable:
      return render_table(report);
    case Format::kPlotData:
      return render_plot_data(report);
  }
  return {};
}

ComparisonReport parse_machine_report(std::string_view document) {
  ordered_json j;
  try {
    j = ordered_json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0, e.byte);
  }
  ComparisonReport r;
  r.project_id = as_string(at(j, "project_id", "$"), "$.project_id");
  const auto side = parse_counting_side(as_string(at(j, "counting_side", "$"), "$.counting_side"));
  if (!side) bad("$.counting_side", "expected 'source' or 'target'");
  r.counting_side = *side;
  try {
    r.generated_at = parse_timestamp(as_string(at(j, "generated_at", "$"), "$.generated_at"));
  } catch (const DataError& e) {
    bad("$.generated_at", e.what());
  }
  const auto& partial = at(j, "partial", "$");
  if (!partial.is_boolean()) bad("$.partial", "expected a boolean");
  r.partial = partial.get<bool>();

  const auto& profiles = at(j, "profiles", "$");
  if (!profiles.is_array()) bad("$.profiles", "expected an array");
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    r.profiles.push_back(read_profile(profiles[k], "$.profiles[" + std::to_string(k) + "]"));
  }
  const auto& deltas = at(j, "deltas", "$");
  if (!deltas.is_array()) bad("$.deltas", "expected an array");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const std::string path = "$.deltas[" + std::to_string(k) + "]";
    PairDelta d;
    d.a = as_string(at(deltas[k], "a", path), path + ".a");
    d.b = as_string(at(deltas[k], "b", path), path + ".b");
    d.epp_delta = as_int(at(deltas[k], "epp_delta", path), path + ".epp_delta");
    d.segment_deltas = read_categories<std::int64_t>(at(deltas[k], "segment_deltas", path), path, as_int);
    d.word_deltas = read_categories<std::int64_t>(at(deltas[k], "word_deltas", path), path, as_int);
    r.deltas.push_back(std::move(d));
  }
  return r;
}

}  // namespace hope::report
