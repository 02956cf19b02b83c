// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "json.hpp"

#include "hope/core.hpp"
#include "hope/ingest.hpp"
#include "hope/metrics.hpp"
#include "hope/project.hpp"
#include "hope/report.hpp"
#include "hope/text.hpp"

#include "oracles.hpp"
#include "support.hpp"

using namespace hope;
using namespace hope::metrics;
using Clock = std::chrono::steady_clock;
using Tokens = std::vector<std::string>;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("hope-acceptance-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> engine_ids(const AnnotationProject& p) {
  std::vector<std::string> out;
  for (const auto& e : p.engines) out.push_back(e.engine_id);
  return out;
}

// ---------------------------------------------------------------------------

Outcome severity_scale() {
  Outcome o;
  const std::array<std::uint64_t, 5> expected{1, 2, 4, 8, 16};
  if (kSeverityCount != expected.size()) o.fail("expected five severities");
  for (std::size_t k = 0; k < kSeverityCount; ++k) {
    const auto w = weight(kAllSeverities[k]);
    if (w != expected[k]) o.fail(std::string(name(kAllSeverities[k])) + " weighs " + std::to_string(w));
    if (w != (std::uint64_t{1} << k)) o.fail("weight(" + std::to_string(k) + ") != 2^" + std::to_string(k));
  }
  if (o.pass) o.detail = "minor..critical = 1 2 4 8 16";
  return o;
}

Outcome threshold_table() {
  Outcome o;
  using C = SegmentCategory;
  const std::vector<std::pair<std::uint64_t, C>> table{
      {0, C::kUnchanged},  {1, C::kGoodEnough}, {2, C::kGoodEnough}, {3, C::kGoodEnough}, {4, C::kGoodEnough},
      {5, C::kMustFix},    {6, C::kMustFix},    {16, C::kMustFix},   {21, C::kMustFix}};
  for (const auto& [points, category] : table) {
    if (classify_segment(points) != category) {
      o.fail("epptu " + std::to_string(points) + " -> " + std::string(name(classify_segment(points))));
    }
  }
  if (o.pass) o.detail = "9/9 rows exact";
  return o;
}

Outcome system_score_identity() {
  Outcome o;
  std::mt19937 rng(20240101);
  const auto t0 = Clock::now();
  std::size_t checked = 0;
  for (int k = 0; k < 200; ++k) {
    const auto p = test::random_project(rng, 40);
    for (const auto& e : p.engines) {
      std::uint64_t sum = 0;
      for (const auto& u : p.units) sum += epptu(u.annotations_for(e.engine_id));
      const auto score = hope_score(p, e.engine_id);
      const auto profile = aggregate(p, e.engine_id);
      if (score != sum || profile.total_epp != sum) {
        o.fail("project " + std::to_string(k) + " engine " + e.engine_id + ": " + std::to_string(score) + " vs " +
               std::to_string(sum) + " vs " + std::to_string(profile.total_epp));
      }
      ++checked;
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 1.0) o.fail(fmt("took %.3f s", elapsed));
  if (o.pass) o.detail = std::to_string(checked) + " engine profiles, " + fmt("%.3f s", elapsed);
  return o;
}

Outcome edit_metric_oracles() {
  Outcome o;
  const auto t0 = Clock::now();

  // WER and PER: every pair of sequences of length <= 6 over three symbols.
  const oracle::EditScriptSearch search(3, 6);
  const auto& nodes = search.nodes();
  std::vector<Tokens> tokens;
  for (const auto& n : nodes) tokens.push_back(oracle::to_tokens(n));
  std::size_t pairs = 0;
  for (std::size_t r = 0; r < nodes.size() && o.pass; ++r) {
    if (tokens[r].empty()) continue;
    const auto dist = search.distances_from(r);
    const auto ref_len = static_cast<std::int64_t>(tokens[r].size());
    for (std::size_t h = 0; h < nodes.size(); ++h) {
      const auto w = wer(tokens[h], tokens[r]);
      if (w.rate != Rational(dist[h], ref_len)) {
        o.fail("wer mismatch on pair " + std::to_string(h) + "/" + std::to_string(r));
        break;
      }
      if (replay(tokens[h], w.trace) != tokens[r]) {
        o.fail("wer trace does not replay on pair " + std::to_string(h) + "/" + std::to_string(r));
        break;
      }
      const auto hyp_len = static_cast<std::int64_t>(tokens[h].size());
      const auto correct = static_cast<std::int64_t>(oracle::multiset_matches(tokens[h], tokens[r]));
      const Rational per_oracle = Rational(1) - Rational(correct - std::max<std::int64_t>(0, hyp_len - ref_len), ref_len);
      if (per(tokens[h], tokens[r]).rate != per_oracle) {
        o.fail("per mismatch on pair " + std::to_string(h) + "/" + std::to_string(r));
        break;
      }
      ++pairs;
    }
  }

  // TER: greedy shifts against the exhaustive block-move search.
  std::mt19937 rng(777);
  std::uniform_int_distribution<int> hyp_len(0, 8);
  std::uniform_int_distribution<int> ref_len(1, 8);
  std::uniform_int_distribution<int> symbol(0, 3);
  auto draw = [&](int n) {
    oracle::Seq s;
    for (int k = 0; k < n; ++k) s.push_back(symbol(rng));
    return oracle::to_tokens(s);
  };
  int equal = 0;
  const int trials = 1000;
  for (int k = 0; k < trials && o.pass; ++k) {
    const Tokens hyp = draw(hyp_len(rng));
    const std::vector<Tokens> refs{draw(ref_len(rng))};
    const auto t = ter(hyp, refs);
    const int greedy = static_cast<int>(t.counts.edits());
    const int exact = oracle::exhaustive_ter_edits(hyp, refs[0]);
    if (greedy < exact) o.fail("greedy TER below the exact optimum on trial " + std::to_string(k));
    if (greedy == exact) ++equal;
    if (replay(hyp, t.trace) != refs[0]) o.fail("ter trace does not replay on trial " + std::to_string(k));
  }
  const double equality = 100.0 * equal / trials;
  if (equality < 95.0) o.fail(fmt("TER equality only %.1f%%", equality));

  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) o.fail(fmt("took %.1f s", elapsed));
  if (o.pass) {
    o.detail = std::to_string(pairs) + " wer/per pairs exact; TER equal to optimum in " + fmt("%.1f%%", equality) +
               " of 1000, never below; " + fmt("%.1f s", elapsed);
  }
  return o;
}

Outcome metric_order() {
  Outcome o;
  std::mt19937 rng(4242);
  std::uniform_int_distribution<int> hyp_len(0, 12);
  std::uniform_int_distribution<int> ref_len(1, 12);
  std::uniform_int_distribution<int> symbol(0, 4);
  auto draw = [&](int n) {
    oracle::Seq s;
    for (int k = 0; k < n; ++k) s.push_back(symbol(rng));
    return oracle::to_tokens(s);
  };
  for (int k = 0; k < 10000; ++k) {
    const Tokens hyp = draw(hyp_len(rng));
    const std::vector<Tokens> refs{draw(ref_len(rng))};
    const auto w = wer(hyp, refs[0]).rate;
    if (!(per(hyp, refs[0]).rate <= w)) o.fail("per > wer on pair " + std::to_string(k));
    if (!(ter(hyp, refs).rate <= w)) o.fail("ter > wer on pair " + std::to_string(k));
  }
  if (o.pass) o.detail = "10000 pairs";
  return o;
}

// Percent columns of a machine report must each sum to 100.0 +- 0.1.
void check_percent_sums(const std::string& machine, Outcome& o) {
  const auto doc = nlohmann::json::parse(machine);
  for (const auto& profile : doc["profiles"]) {
    for (const char* level : {"segment_percent", "word_percent"}) {
      double sum = 0;
      for (const auto& [category, value] : profile[level].items()) sum += value.get<double>();
      if (std::abs(sum - 100.0) > 0.1) {
        o.fail(profile["engine_id"].get<std::string>() + " " + level + " sums to " + fmt("%.2f", sum));
      }
    }
  }
}

Outcome task_one_replay() {
  Outcome o;
  std::mt19937 rng(111);
  std::ostringstream tsv;
  tsv << "source\tsys1\tgoogle\n";
  for (int k = 0; k < 111; ++k) {
    tsv << test::random_text(rng, 14) << "\t" << test::random_text(rng, 14) << "\t" << test::random_text(rng, 14)
        << "\n";
  }
  ingest::TsvMapping mapping;
  mapping.target_columns = {{"sys1", 1}, {"google", 2}};
  ingest::ImportOptions options;
  options.project_id = "task-one";
  options.source_lang = "en";
  options.target_lang = "ru";
  std::istringstream in(tsv.str());
  auto project = ingest::import_tsv(in, mapping, options);
  if (project.units.size() != 111) o.fail("imported " + std::to_string(project.units.size()) + " units");

  for (auto& u : project.units) {
    for (const auto& e : project.engines) {
      const auto len = text::code_point_length(u.targets.at(e.engine_id));
      u.annotations[e.engine_id] = test::random_annotations(rng, 3, len);
    }
  }
  if (!ingest::validate_project(project).empty()) o.fail("annotated project is invalid");

  const std::vector<std::string> ids{"sys1", "google"};
  const auto r = report::compare_engines(project, ids);
  for (const auto& p : r.profiles) {
    const auto seg_sum = p.segment_counts[0] + p.segment_counts[1] + p.segment_counts[2];
    if (p.total_segments != 111 || seg_sum != 111) {
      o.fail(p.engine_id + " totals " + std::to_string(p.total_segments) + " segments");
    }
  }
  if (r.deltas.size() != 1) o.fail("expected one engine pair");
  check_percent_sums(report::render_report(r, report::Format::kMachine), o);
  if (o.pass) {
    o.detail = "111 segments per engine; HOPE sys1 " + std::to_string(r.profiles[0].total_epp) + ", google " +
               std::to_string(r.profiles[1].total_epp);
  }
  return o;
}

Outcome task_two_replay() {
  Outcome o;
  std::mt19937 rng(3339);
  AnnotationProject project;
  project.project_id = "task-two";
  project.name = "Task II";
  project.source_lang = "en";
  project.target_lang = "zh";
  project.engines = {{"sys1", "System 1", ""}, {"google", "Google", ""}};
  std::uniform_int_distribution<int> words(1, 40);
  int remaining = 3339;
  for (int k = 0; remaining > 0; ++k) {
    const int n = std::min(remaining, words(rng));
    remaining -= n;
    TranslationUnit u;
    u.id = "s" + std::to_string(k + 1);
    for (int w = 0; w < n; ++w) u.source += (w ? " word" : "word") + std::to_string(w);
    for (const auto& e : project.engines) {
      u.targets[e.engine_id] = "target " + std::to_string(k);
      u.annotations[e.engine_id] = test::random_annotations(rng, 3);
    }
    project.units.push_back(std::move(u));
  }

  const auto t0 = Clock::now();
  const auto r = report::compare_engines(project, engine_ids(project));
  const auto table = report::render_report(r, report::Format::kTable);
  const auto machine = report::render_report(r, report::Format::kMachine);
  const auto plot = report::render_report(r, report::Format::kPlotData);
  const double elapsed = seconds_since(t0);

  for (const auto& p : r.profiles) {
    const auto word_sum = p.word_counts[0] + p.word_counts[1] + p.word_counts[2];
    if (p.total_words != 3339 || word_sum != 3339) {
      o.fail(p.engine_id + " word total " + std::to_string(word_sum));
    }
  }
  if (table.find("segments") == std::string::npos || table.find("words") == std::string::npos) {
    o.fail("table lacks a segment or word breakdown");
  }
  if (plot.find("\tsegment\t") == std::string::npos || plot.find("\tword\t") == std::string::npos) {
    o.fail("plot data lacks a segment or word series");
  }
  check_percent_sums(machine, o);
  if (elapsed >= 1.0) o.fail(fmt("pipeline took %.3f s", elapsed));
  if (o.pass) {
    o.detail = std::to_string(project.units.size()) + " segments, 3339 words per engine, " + fmt("%.3f s", elapsed);
  }
  return o;
}

Outcome persistence() {
  Outcome o;
  const auto dir = scratch_dir();
  const auto path = dir / "project.hope";
  std::mt19937 rng(500);
  int interrupted = 0;
  for (int k = 0; k < 500 && o.pass; ++k) {
    const auto p = test::random_project(rng, 25);
    ingest::save_project(p, path);
    const auto first = read_all(path);
    const auto loaded = ingest::load_project(path);
    if (!(loaded == p)) o.fail("project " + std::to_string(k) + " changed in a round trip");
    ingest::save_project(loaded, path);
    if (read_all(path) != first) o.fail("project " + std::to_string(k) + " is not byte-stable");

    // A crash part-way through replacing the file must leave the old project readable.
    const auto next = ingest::serialize_project(test::random_project(rng, 25));
    std::uniform_int_distribution<std::size_t> cut(0, next.size() - 1);
    const ingest::WriteFault fault{cut(rng)};
    try {
      ingest::write_file_atomically(path, next, &fault);
      o.fail("write fault did not trigger");
    } catch (const ingest::SimulatedCrash&) {
      ++interrupted;
    }
    try {
      if (!(ingest::load_project(path) == p)) o.fail("interrupted write altered project " + std::to_string(k));
    } catch (const std::exception& e) {
      o.fail(std::string("unloadable after interrupted write: ") + e.what());
    }
  }
  std::filesystem::remove_all(dir);
  if (o.pass) o.detail = "500 byte-identical round trips, " + std::to_string(interrupted) + " interrupted writes";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"severity scale", severity_scale},
      {"epptu thresholds", threshold_table},
      {"system score identity", system_score_identity},
      {"edit metric oracles", edit_metric_oracles},
      {"metric order", metric_order},
      {"task one replay", task_one_replay},
      {"task two replay", task_two_replay},
      {"persistence", persistence},
  };
  int failed = 0;
  for (const auto& [label, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s  %-24s %s\n", o.pass ? "PASS" : "FAIL", label, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
