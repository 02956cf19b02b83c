#include "doctest.h"
#include "hope/error.hpp"
#include "hope/ingest.hpp"
#include "hope/report.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>

#include "support.hpp"

#ifndef HOPE_GOLDEN_DIR
#error "HOPE_GOLDEN_DIR must be defined"
#endif

using namespace hope;
using namespace hope::report;
using test::ann;

namespace {

// Hand-scored fixture:
//   unit  words  sys1 epptu      google epptu
//   u1    4      1  good_enough  0  unchanged
//   u2    3      5  must_fix     2  good_enough
//   u3    1      0  unchanged    16 must_fix
//   u4    4      4  good_enough  0  unchanged
AnnotationProject fixture() {
  AnnotationProject p;
  p.project_id = "demo";
  p.name = "Demo";
  p.source_lang = "en";
  p.target_lang = "ru";
  p.created_at = parse_timestamp("2024-03-01T09:00:00Z");
  p.modified_at = parse_timestamp("2024-03-02T10:30:00Z");
  p.engines = {{"sys1", "System 1", ""}, {"google", "Google Translate", ""}};
  auto unit = [&](std::string id, std::string src, std::vector<ErrorAnnotation> a, std::vector<ErrorAnnotation> b) {
    TranslationUnit u;
    u.id = std::move(id);
    u.source = std::move(src);
    u.targets["sys1"] = "target one";
    u.targets["google"] = "target two";
    u.annotations["sys1"] = std::move(a);
    u.annotations["google"] = std::move(b);
    p.units.push_back(std::move(u));
  };
  unit("u1", "The cat sat .", {ann(ErrorType::kTerminology, Severity::kMinor)}, {});
  unit("u2", "Open the file",
       {ann(ErrorType::kMistranslation, Severity::kMajor), ann(ErrorType::kUngrammatical, Severity::kMinor)},
       {ann(ErrorType::kMistranslation, Severity::kMedium)});
  unit("u3", "Save", {}, {ann(ErrorType::kImpact, Severity::kCritical)});
  unit("u4", "Close all windows now",
       {ann(ErrorType::kStyle, Severity::kMedium), ann(ErrorType::kProofreading, Severity::kMedium)}, {});
  return p;
}

const std::vector<std::string> kBoth = {"sys1", "google"};

// HOPE_UPDATE_GOLDEN=1 rewrites the golden files from the current output.
std::string golden(const std::string& name, const std::string& actual) {
  const std::string path = std::string(HOPE_GOLDEN_DIR) + "/" + name;
  if (std::getenv("HOPE_UPDATE_GOLDEN")) std::ofstream(path, std::ios::binary) << actual;
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), {}};
}

CategoryArray<std::uint64_t> counts(std::uint64_t u, std::uint64_t g, std::uint64_t m) { return {u, g, m}; }

}  // namespace

TEST_CASE("compare: hand-scored fixture") {
  const auto r = compare_engines(fixture(), kBoth);
  REQUIRE(r.profiles.size() == 2);
  const auto& a = r.profiles[0];
  const auto& b = r.profiles[1];
  CHECK(a.engine_id == "sys1");
  CHECK(a.total_epp == 10);
  CHECK(b.total_epp == 18);
  CHECK(a.segment_counts == counts(1, 2, 1));
  CHECK(b.segment_counts == counts(2, 1, 1));
  CHECK(a.word_counts == counts(1, 8, 3));
  CHECK(b.word_counts == counts(8, 3, 1));
  CHECK(a.total_words == 12);
  REQUIRE(r.deltas.size() == 1);
  CHECK(r.deltas[0].a == "sys1");
  CHECK(r.deltas[0].b == "google");
  CHECK(r.deltas[0].epp_delta == -8);
  CHECK(r.deltas[0].segment_deltas == CategoryArray<std::int64_t>{-1, 1, 0});
  CHECK(r.deltas[0].word_deltas == CategoryArray<std::int64_t>{-7, 5, 2});
  CHECK(format_timestamp(r.generated_at) == "2024-03-02T10:30:00Z");
  CHECK_FALSE(r.partial);
}

TEST_CASE("compare: HOPE 40 vs 55 gives delta -15") {
  auto p = test::project_with_scores({16, 16, 8});
  p.engines.push_back({"sys2", "System 2", ""});
  const std::vector<std::uint64_t> other{16, 16, 16, 7};
  for (std::size_t k = 0; k < p.units.size(); ++k) {
    p.units[k].targets["sys2"] = "t";
    p.units[k].annotations["sys2"] = test::annotations_scoring(other[k]);
  }
  p.units[2].annotations["sys2"] = test::annotations_scoring(23);
  const std::vector<std::string> ids{"sys1", "sys2"};
  const auto r = compare_engines(p, ids);
  CHECK(r.profiles[0].total_epp == 40);
  CHECK(r.profiles[1].total_epp == 55);
  CHECK(r.deltas[0].epp_delta == -15);
}

TEST_CASE("compare: identical annotations give zero deltas") {
  auto p = fixture();
  for (auto& u : p.units) u.annotations["google"] = u.annotations["sys1"];
  const auto r = compare_engines(p, kBoth);
  CHECK(r.deltas[0].epp_delta == 0);
  CHECK(r.deltas[0].segment_deltas == CategoryArray<std::int64_t>{});
  CHECK(r.deltas[0].word_deltas == CategoryArray<std::int64_t>{});
}

TEST_CASE("compare: preconditions") {
  const auto p = fixture();
  const std::vector<std::string> one{"sys1"};
  const std::vector<std::string> unknown{"sys1", "deepl"};
  const std::vector<std::string> twice{"sys1", "sys1"};
  CHECK_THROWS_AS(compare_engines(p, one), DataError);
  CHECK_THROWS_AS(compare_engines(p, unknown), NotFoundError);
  CHECK_THROWS_AS(compare_engines(p, twice), DataError);
  CHECK(build_report(p, one).deltas.empty());
  CHECK(build_report(p, one).profiles.size() == 1);
}

TEST_CASE("compare: unreviewed units need allow_partial") {
  auto p = fixture();
  p.units[2].annotations.erase("google");
  CHECK_THROWS_WITH_AS(compare_engines(p, kBoth), doctest::Contains("unreviewed"), DataError);
  const auto r = compare_engines(p, kBoth, CountingSide::kSource, true);
  CHECK(r.partial);
  CHECK(r.profiles[1].unreviewed_segments == 1);
  CHECK(r.profiles[1].segment_counts == counts(3, 1, 0));
  // an empty list is a review with no errors, not a missing review
  p.units[2].annotations["google"] = {};
  CHECK_FALSE(compare_engines(p, kBoth).partial);
}

TEST_CASE("compare: invariant under unit order") {
  std::mt19937 rng(5);
  for (int k = 0; k < 50; ++k) {
    auto p = test::random_project(rng, 15);
    std::vector<std::string> ids;
    for (const auto& e : p.engines) ids.push_back(e.engine_id);
    const auto before = build_report(p, ids, CountingSide::kTarget, true);
    std::shuffle(p.units.begin(), p.units.end(), rng);
    CHECK(build_report(p, ids, CountingSide::kTarget, true) == before);
  }
}

TEST_CASE("percentages: largest remainder in tenths") {
  const auto p = percent_tenths(counts(3, 5, 2));
  REQUIRE(p.has_value());
  CHECK(format_tenths((*p)[0]) == "30.0");
  CHECK(format_tenths((*p)[1]) == "50.0");
  CHECK(format_tenths((*p)[2]) == "20.0");

  const auto thirds = percent_tenths(counts(1, 1, 1));
  REQUIRE(thirds.has_value());
  CHECK((*thirds)[0] + (*thirds)[1] + (*thirds)[2] == 1000);
  CHECK((*thirds)[0] == 334);

  const auto twelfths = percent_tenths(counts(1, 8, 3));
  CHECK(*twelfths == CategoryArray<std::uint32_t>{83, 667, 250});

  CHECK_FALSE(percent_tenths(counts(0, 0, 0)).has_value());

  std::mt19937 rng(3);
  std::uniform_int_distribution<std::uint64_t> n(0, 5000);
  for (int k = 0; k < 2000; ++k) {
    const auto c = counts(n(rng), n(rng), n(rng) % 7);
    const auto t = percent_tenths(c);
    if (c[0] + c[1] + c[2] == 0) continue;
    REQUIRE(t.has_value());
    CHECK((*t)[0] + (*t)[1] + (*t)[2] == 1000);
    const double total = static_cast<double>(c[0] + c[1] + c[2]);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs((*t)[i] - 1000.0 * static_cast<double>(c[i]) / total) < 1.0);
    }
  }
}

TEST_CASE("render: golden table") {
  const auto r = compare_engines(fixture(), kBoth);
  const auto table = render_report(r, Format::kTable);
  const auto plot = render_report(r, Format::kPlotData);
  CHECK(table == golden("demo_table.txt", table));
  CHECK(plot == golden("demo_plot.tsv", plot));
}

TEST_CASE("render: empty project shows n/a") {
  AnnotationProject p;
  p.project_id = "empty";
  p.engines = {{"a", "A", ""}, {"b", "B", ""}};
  const std::vector<std::string> ids{"a", "b"};
  const auto r = compare_engines(p, ids);
  const auto table = render_report(r, Format::kTable);
  CHECK(table.find("n/a") != std::string::npos);
  CHECK(table.find("%") == table.find("seg %") + 4);
  const auto plot = render_report(r, Format::kPlotData);
  CHECK(plot.find("a\tsegment\tunchanged\t0\tn/a\n") != std::string::npos);
  const auto machine = render_report(r, Format::kMachine);
  CHECK(machine.find("\"unchanged\": null") != std::string::npos);
  CHECK(parse_machine_report(machine) == r);
}

TEST_CASE("render: machine format is lossless") {
  CHECK(parse_machine_report(render_report(compare_engines(fixture(), kBoth), Format::kMachine)) ==
        compare_engines(fixture(), kBoth));
  std::mt19937 rng(17);
  for (int k = 0; k < 100; ++k) {
    const auto p = test::random_project(rng, 20);
    std::vector<std::string> ids;
    for (const auto& e : p.engines) ids.push_back(e.engine_id);
    const auto side = k % 2 ? CountingSide::kTarget : CountingSide::kSource;
    const auto r = build_report(p, ids, side, true);
    const auto doc = render_report(r, Format::kMachine);
    CHECK(doc.back() == '\n');
    const auto back = parse_machine_report(doc);
    CHECK(back == r);
    CHECK(render_report(back, Format::kMachine) == doc);
  }
  CHECK_THROWS_AS(parse_machine_report("{\"project_id\": 3}"), ParseError);
  CHECK_THROWS_AS(parse_machine_report("{"), ParseError);
}

TEST_CASE("render: percentages at both levels sum to 100") {
  std::mt19937 rng(23);
  for (int k = 0; k < 50; ++k) {
    const auto p = test::random_project(rng, 30);
    std::vector<std::string> ids;
    for (const auto& e : p.engines) ids.push_back(e.engine_id);
    const auto r = build_report(p, ids, CountingSide::kSource, true);
    for (const auto& prof : r.profiles) {
      for (const auto* c : {&prof.segment_counts, &prof.word_counts}) {
        const auto t = percent_tenths(*c);
        if ((*c)[0] + (*c)[1] + (*c)[2] == 0) {
          CHECK_FALSE(t.has_value());
        } else {
          CHECK((*t)[0] + (*t)[1] + (*t)[2] == 1000);
        }
      }
    }
  }
}
