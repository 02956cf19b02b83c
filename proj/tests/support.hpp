#pragma once

// Fixtures and random generators shared by unit and acceptance tests.

#include <random>
#include <string>
#include <vector>

#include "hope/core.hpp"
#include "hope/project.hpp"
#include "hope/text.hpp"

namespace test {

inline hope::ErrorAnnotation ann(hope::ErrorType t, hope::Severity s) {
  hope::ErrorAnnotation a;
  a.error_type = t;
  a.severity = s;
  return a;
}

/// Annotations whose penalty sums to exactly `points` (one per set bit).
inline std::vector<hope::ErrorAnnotation> annotations_scoring(std::uint64_t points) {
  std::vector<hope::ErrorAnnotation> out;
  while (points >= 16) {
    out.push_back(ann(hope::ErrorType::kMistranslation, hope::Severity::kCritical));
    points -= 16;
  }
  for (std::size_t k = 0; k < hope::kSeverityCount; ++k) {
    if (points & (std::uint64_t{1} << k)) {
      out.push_back(ann(hope::kAllErrorTypes[k], hope::kAllSeverities[k]));
    }
  }
  return out;
}

/// One engine "sys1", one reviewed unit per entry of `scores`.
inline hope::AnnotationProject project_with_scores(const std::vector<std::uint64_t>& scores) {
  hope::AnnotationProject p;
  p.project_id = "fixture";
  p.name = "Fixture";
  p.engines = {{"sys1", "System 1", ""}};
  for (std::size_t k = 0; k < scores.size(); ++k) {
    hope::TranslationUnit u;
    u.id = "u" + std::to_string(k + 1);
    u.source = "source text " + std::to_string(k + 1);
    u.targets["sys1"] = "target text";
    u.annotations["sys1"] = annotations_scoring(scores[k]);
    p.units.push_back(std::move(u));
  }
  return p;
}

inline std::string random_text(std::mt19937& rng, int max_words) {
  static const std::vector<std::string> words = {
      "the", "engine", "CAD/CAM", "model", "\xD0\xBC\xD0\xBE\xD0\xB4\xD0\xB5\xD0\xBB\xD1\x8C",
      "\xD1\x82\xD0\xBE\xD1\x87\xD0\xBD\xD0\xBE\xD1\x81\xD1\x82\xD1\x8C", "design,", "\"quoted\"",
      "caf\xC3\xA9", "tab\\t", "{json}", "a", "ok."};
  std::uniform_int_distribution<int> count(1, max_words);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::string out;
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    if (k > 0) out += ' ';
    out += words[pick(rng)];
  }
  return out;
}

inline std::vector<hope::ErrorAnnotation> random_annotations(std::mt19937& rng, int max_count,
                                                             std::size_t target_length = 0) {
  std::uniform_int_distribution<int> count(0, max_count);
  std::uniform_int_distribution<std::size_t> type(0, hope::kErrorTypeCount - 1);
  std::uniform_int_distribution<std::size_t> sev(0, hope::kSeverityCount - 1);
  std::bernoulli_distribution coin(0.3);
  std::vector<hope::ErrorAnnotation> out;
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    auto a = ann(hope::kAllErrorTypes[type(rng)], hope::kAllSeverities[sev(rng)]);
    if (coin(rng)) a.note = "note " + std::to_string(k) + " \xE2\x80\x94 \"x\"";
    if (coin(rng)) a.annotator_id = "rater" + std::to_string(k % 2);
    if (target_length > 0 && coin(rng)) {
      std::uniform_int_distribution<std::size_t> pos(0, target_length - 1);
      const std::size_t s = pos(rng);
      std::uniform_int_distribution<std::size_t> end(s + 1, target_length);
      a.span = hope::Span{s, end(rng)};
    }
    out.push_back(std::move(a));
  }
  return out;
}

/// A valid project with 1-3 engines and up to `max_units` units.
inline hope::AnnotationProject random_project(std::mt19937& rng, int max_units) {
  static const std::vector<std::string> engine_ids = {"sys1", "google", "deepl"};
  std::uniform_int_distribution<int> engine_count(1, 3);
  std::uniform_int_distribution<int> unit_count(0, max_units);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<std::int64_t> secs(0, 2'000'000'000);

  hope::AnnotationProject p;
  p.project_id = "proj-" + std::to_string(rng() % 1000);
  p.name = "Random " + random_text(rng, 3);
  p.source_lang = "en";
  p.target_lang = "ru";
  p.created_at = hope::Timestamp{std::chrono::seconds{secs(rng)}};
  p.modified_at = p.created_at + std::chrono::seconds{secs(rng) % 100000};
  const int ne = engine_count(rng);
  for (int e = 0; e < ne; ++e) {
    p.engines.push_back({engine_ids[static_cast<std::size_t>(e)], "Engine " + std::to_string(e),
                         coin(rng) ? "" : "desc\twith tab"});
  }
  const int nu = unit_count(rng);
  for (int k = 0; k < nu; ++k) {
    hope::TranslationUnit u;
    u.id = "u" + std::to_string(k);
    u.source = random_text(rng, 12);
    for (const auto& e : p.engines) {
      if (!coin(rng) && k % 3 == 0) continue;  // some units lack output for an engine
      const std::string target = random_text(rng, 12);
      u.targets[e.engine_id] = target;
      if (coin(rng)) u.post_edited[e.engine_id] = random_text(rng, 12);
      if (coin(rng) || k % 2 == 0) {
        u.annotations[e.engine_id] = random_annotations(rng, 4, hope::text::code_point_length(target));
      }
    }
    p.units.push_back(std::move(u));
  }
  return p;
}

}  // namespace test
