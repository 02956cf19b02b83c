#include "hope/cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

#include "hope/ingest.hpp"
#include "hope/metrics.hpp"
#include "hope/report.hpp"
#include "hope/service.hpp"

namespace hope::cli {

namespace {

using namespace hope::metrics;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::size_t parse_column(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size() || text.front() == '-') {
    throw UsageError(what + ": expected a column number, got '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_engines(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

CountingSide side_or_usage(const std::string& text) {
  const auto side = parse_counting_side(text);
  if (!side) throw UsageError("--side must be 'source' or 'target'");
  return *side;
}

// ---------------------------------------------------------------------------

int cmd_import(const std::string& tsv, std::size_t source_col, const std::vector<std::string>& engines,
               const std::optional<std::string>& id_col, const std::string& out_path, ingest::ImportOptions options,
               bool force, std::ostream& out) {
  ingest::TsvMapping mapping;
  mapping.source_column = source_col;
  if (id_col) mapping.id_column = parse_column(*id_col, "--id-col");
  for (const auto& pair : engines) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--engine expects ENGINE=COLUMN, got '" + pair + "'");
    mapping.target_columns.emplace_back(pair.substr(0, eq), parse_column(pair.substr(eq + 1), "--engine"));
  }
  if (!force && std::filesystem::exists(out_path)) {
    throw DataError(out_path + " already exists (use --force to replace it)");
  }
  std::ifstream in(tsv, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + tsv);
  if (options.project_id.empty() || options.project_id == "project") {
    options.project_id = std::filesystem::path(out_path).stem().string();
  }
  if (options.name.empty()) options.name = options.project_id;
  const auto project = ingest::import_tsv(in, mapping, options);
  ingest::save_project(project, out_path);
  out << "imported " << project.units.size() << " units for " << project.engines.size() << " engine(s) into "
      << out_path << "\n";
  return kExitOk;
}

int cmd_score(const std::string& path, const std::string& engine, CountingSide side, std::ostream& out) {
  const auto project = ingest::load_project(path);
  const auto profile = aggregate(project, engine, side);
  const auto seg = report::percent_tenths(profile.segment_counts);
  const auto word = report::percent_tenths(profile.word_counts);
  auto pct = [](const auto& shares, SegmentCategory c) -> std::string {
    return shares ? report::format_tenths((*shares)[static_cast<std::size_t>(c)]) : "n/a";
  };

  out << "project\t" << project.project_id << "\n";
  out << "engine\t" << profile.engine_id << "\n";
  out << "counting_side\t" << name(side) << "\n";
  out << "total_epp\t" << profile.total_epp << "\n";
  out << "segments\t" << profile.total_segments << "\n";
  out << "words\t" << profile.total_words << "\n";
  out << "unreviewed_segments\t" << profile.unreviewed_segments << "\n";
  out << "\ncategory\tsegments\tsegment_percent\twords\tword_percent\n";
  for (auto c : kAllSegmentCategories) {
    out << name(c) << "\t" << profile.segments(c) << "\t" << pct(seg, c) << "\t" << profile.words(c) << "\t"
        << pct(word, c) << "\n";
  }
  out << "\nepptu\tsegments\n";
  for (const auto& [points, n] : profile.epptu_histogram) out << points << "\t" << n << "\n";
  return kExitOk;
}

int cmd_report(const std::string& path, const std::string& engines, CountingSide side, const std::string& format,
               bool allow_partial, std::ostream& out) {
  const auto fmt = report::parse_format(format);
  if (!fmt) throw UsageError("--format must be table, machine or plot_data");
  const auto project = ingest::load_project(path);
  std::vector<std::string> ids = split_engines(engines);
  if (ids.empty()) {
    for (const auto& e : project.engines) ids.push_back(e.engine_id);
  }
  out << report::render_report(report::build_report(project, ids, side, allow_partial), *fmt);
  return kExitOk;
}

struct LineScore {
  std::int64_t edits = 0;
  std::int64_t ref_words = 0;
};

LineScore score_line(const std::string& metric, const TokenSequence& hyp, const TokenSequence& ref) {
  const auto ref_words = static_cast<std::int64_t>(ref.tokens.size());
  if (ref.tokens.empty()) return {static_cast<std::int64_t>(hyp.tokens.size()), 0};
  if (metric == "per") return {per(hyp, ref).errors(), ref_words};
  EditResult r;
  if (metric == "wer") {
    r = wer(hyp, ref);
  } else if (metric == "ter") {
    r = ter(hyp, std::span<const TokenSequence>(&ref, 1));
  } else {
    r = hter(hyp, ref);
  }
  return {static_cast<std::int64_t>(r.counts.edits()), ref_words};
}

int cmd_score_auto(const std::string& hyp_path, const std::string& ref_path, const std::string& metric,
                   TokenizerConfig config, std::ostream& out) {
  const auto hyps = read_lines(hyp_path);
  const auto refs = read_lines(ref_path);
  if (hyps.size() != refs.size()) {
    throw DataError("line count mismatch: hypothesis has " + std::to_string(hyps.size()) + " lines, reference has " +
                    std::to_string(refs.size()));
  }
  out << "line\t" << metric << "\tedits\tref_words\n";
  std::int64_t edits = 0;
  std::int64_t ref_words = 0;
  for (std::size_t k = 0; k < hyps.size(); ++k) {
    const auto s = score_line(metric, tokenize(hyps[k], config), tokenize(refs[k], config));
    edits += s.edits;
    ref_words += s.ref_words;
    out << (k + 1) << "\t" << (s.ref_words ? to_decimal(Rational(s.edits, s.ref_words)) : "n/a") << "\t" << s.edits
        << "\t" << s.ref_words << "\n";
  }
  if (ref_words == 0) throw UndefinedRateError("corpus rate undefined: references contain no words");
  out << "corpus\t" << to_decimal(Rational(edits, ref_words)) << "\t" << edits << "\t" << ref_words << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const auto project = ingest::load_project(path);
  const auto violations = ingest::validate_project(project);
  for (const auto& v : violations) out << v << "\n";
  if (!violations.empty()) return kExitData;
  out << path << ": ok\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"HOPE post-editing quality scoring toolkit", "hope"};
  app.require_subcommand(1);

  // import
  std::string tsv, import_out, source_col_text;
  std::vector<std::string> engine_cols;
  std::optional<std::string> id_col;
  ingest::ImportOptions import_options;
  bool force = false;
  auto* import = app.add_subcommand("import", "Create a project from a TSV of source and engine outputs");
  import->add_option("--tsv", tsv, "Input TSV file")->required();
  import->add_option("--source-col", source_col_text, "Zero-based source column")->required();
  import->add_option("--engine", engine_cols, "ENGINE=COLUMN, repeatable")->required();
  import->add_option("--id-col", id_col, "Zero-based column holding unit ids");
  import->add_option("--out", import_out, "Project file to write")->required();
  import->add_option("--project-id", import_options.project_id, "Project id (defaults to the file stem)");
  import->add_option("--name", import_options.name, "Display name");
  import->add_option("--source-lang", import_options.source_lang, "Source language tag");
  import->add_option("--target-lang", import_options.target_lang, "Target language tag");
  import->add_flag("--force", force, "Replace an existing project file");

  // score
  std::string score_path, score_engine, score_side = "source";
  auto* score = app.add_subcommand("score", "Quality profile of one engine");
  score->add_option("project", score_path, "Project file")->required();
  score->add_option("--engine", score_engine, "Engine id")->required();
  score->add_option("--side", score_side, "Word counting side: source or target");

  // report
  std::string report_path, report_engines, report_side = "source", report_format = "table";
  bool allow_partial = false;
  auto* rep = app.add_subcommand("report", "Compare engines");
  rep->add_option("project", report_path, "Project file")->required();
  rep->add_option("--engines", report_engines, "Comma-separated engine ids (default: all)");
  rep->add_option("--side", report_side, "Word counting side: source or target");
  rep->add_option("--format", report_format, "table, machine or plot_data");
  rep->add_flag("--allow-partial", allow_partial, "Count unreviewed units as unchanged");

  // score-auto
  std::string hyp_path, ref_path, metric = "wer";
  TokenizerConfig tokenizer;
  auto* automatic = app.add_subcommand("score-auto", "Automatic edit-distance metrics over line-aligned files");
  automatic->add_option("--hyp", hyp_path, "Hypothesis file, one segment per line")->required();
  automatic->add_option("--ref", ref_path, "Reference (or post-edited) file")->required();
  automatic->add_option("--metric", metric, "wer, per, ter or hter")
      ->check(CLI::IsMember({"wer", "per", "ter", "hter"}));
  automatic->add_flag("--lowercase", tokenizer.lowercase, "Compare case-insensitively");
  automatic->add_flag("--split-punct", tokenizer.split_punctuation, "Split punctuation off word edges");

  // serve
  std::optional<std::string> listen, projects_dir;
  auto* serve = app.add_subcommand("serve", "Serve projects over HTTP");
  serve->add_option("--listen", listen, "host:port (default 127.0.0.1:8080)");
  serve->add_option("--projects-dir", projects_dir, "Directory of .hope files");

  // validate
  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a project file's invariants");
  validate->add_option("project", validate_path, "Project file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "hope: " << e.what() << "\n";
    if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << "run 'hope " << sub->get_name() << " --help' for usage\n";
    } else {
      err << "run 'hope --help' for usage\n";
    }
    return kExitUsage;
  }

  try {
    if (*import) {
      return cmd_import(tsv, parse_column(source_col_text, "--source-col"), engine_cols, id_col, import_out,
                        import_options, force, out);
    }
    if (*score) return cmd_score(score_path, score_engine, side_or_usage(score_side), out);
    if (*rep) {
      return cmd_report(report_path, report_engines, side_or_usage(report_side), report_format, allow_partial, out);
    }
    if (*automatic) return cmd_score_auto(hyp_path, ref_path, metric, tokenizer, out);
    if (*serve) return service::serve(service::resolve_config(listen, projects_dir), err);
    if (*validate) return cmd_validate(validate_path, out);
  } catch (const UsageError& e) {
    err << "hope: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "hope: " << e.what() << "\n";
    for (const auto& v : e.violations()) err << "  " << v << "\n";
    return kExitData;
  } catch (const ParseError& e) {
    err << "hope: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "hope: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace hope::cli
