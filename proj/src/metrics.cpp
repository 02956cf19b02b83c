#include "hope/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "hope/error.hpp"
#include "hope/text.hpp"

namespace hope::metrics {

namespace {

using Ids = std::vector<std::uint32_t>;

// Maps tokens to dense ids so the inner loops compare integers.
class Interner {
public:
  Ids intern(std::span<const std::string> tokens) {
    Ids out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
      auto [it, inserted] = ids_.try_emplace(t, static_cast<std::uint32_t>(ids_.size()));
      out.push_back(it->second);
    }
    return out;
  }

private:
  std::unordered_map<std::string, std::uint32_t> ids_;
};

std::size_t distance(const Ids& hyp, const Ids& ref) {
  std::vector<std::size_t> prev(ref.size() + 1);
  std::vector<std::size_t> row(ref.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    row[0] = i;
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      const std::size_t diag = prev[j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      row[j] = std::min({diag, prev[j] + 1, row[j - 1] + 1});
    }
    std::swap(prev, row);
  }
  return prev[ref.size()];
}

struct Alignment {
  std::size_t cost = 0;
  EditTrace ops;
  EditCounts counts;
};

// Full-table Levenshtein with a fixed backtrace preference (diagonal, then
// hypothesis-side deletion, then reference-side insertion), so alignments are
// deterministic.
Alignment align(const Ids& hyp, const Ids& ref, std::span<const std::string> ref_tokens) {
  const std::size_t n = hyp.size();
  const std::size_t m = ref.size();
  const std::size_t width = m + 1;
  std::vector<std::size_t> d((n + 1) * width);
  for (std::size_t i = 0; i <= n; ++i) d[i * width] = i;
  for (std::size_t j = 0; j <= m; ++j) d[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = d[(i - 1) * width + j - 1] + (hyp[i - 1] == ref[j - 1] ? 0 : 1);
      d[i * width + j] = std::min({diag, d[(i - 1) * width + j] + 1, d[i * width + j - 1] + 1});
    }
  }

  Alignment a;
  a.cost = d[n * width + m];
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = d[i * width + j];
    if (i > 0 && j > 0) {
      const bool same = hyp[i - 1] == ref[j - 1];
      if (here == d[(i - 1) * width + j - 1] + (same ? 0 : 1)) {
        if (same) {
          a.ops.push_back(EditOp::match(i - 1, j - 1));
          ++a.counts.matches;
        } else {
          a.ops.push_back(EditOp::substitute(i - 1, j - 1, ref_tokens[j - 1]));
          ++a.counts.substitutions;
        }
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && here == d[(i - 1) * width + j] + 1) {
      a.ops.push_back(EditOp::erase(i - 1));
      ++a.counts.insertions;
      --i;
    } else {
      a.ops.push_back(EditOp::insert(j - 1, ref_tokens[j - 1]));
      ++a.counts.deletions;
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

template <typename T>
std::vector<T> apply_shift(const std::vector<T>& seq, std::size_t start, std::size_t len, std::size_t dest) {
  std::vector<T> rest;
  rest.reserve(seq.size());
  rest.insert(rest.end(), seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(start));
  rest.insert(rest.end(), seq.begin() + static_cast<std::ptrdiff_t>(start + len), seq.end());
  rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(dest), seq.begin() + static_cast<std::ptrdiff_t>(start),
              seq.begin() + static_cast<std::ptrdiff_t>(start + len));
  return rest;
}

struct Shift {
  std::size_t start = 0;
  std::size_t length = 0;
  std::size_t dest = 0;
  std::size_t gain = 0;
};

// Best single shift under the standard constraints: the block equals some
// reference span and at least one of its tokens is not currently matched.
// Every destination is tried. Highest gain wins; ties go to the shorter block,
// then the leftmost start, then the leftmost destination.
std::optional<Shift> best_shift(const Ids& cur, const Ids& ref, const Alignment& alignment) {
  const std::size_t n = cur.size();
  const std::size_t m = ref.size();

  std::vector<bool> matched(n, false);
  for (const auto& op : alignment.ops) {
    if (op.kind == EditOp::Kind::kMatch) {
      matched[op.hyp_index] = true;
    }
  }

  const std::size_t base = alignment.cost;
  std::optional<Shift> best;
  for (std::size_t len = 1; len <= std::min(n, m); ++len) {
    for (std::size_t start = 0; start + len <= n; ++start) {
      const auto first = cur.begin() + static_cast<std::ptrdiff_t>(start);
      const auto last = first + static_cast<std::ptrdiff_t>(len);
      if (std::all_of(matched.begin() + static_cast<std::ptrdiff_t>(start),
                      matched.begin() + static_cast<std::ptrdiff_t>(start + len), [](bool b) { return b; })) {
        continue;
      }
      if (std::search(ref.begin(), ref.end(), first, last) == ref.end()) {
        continue;
      }
      for (std::size_t dest = 0; dest + len <= n; ++dest) {
        if (dest == start) {
          continue;
        }
        const std::size_t dist = distance(apply_shift(cur, start, len, dest), ref);
        if (dist >= base) {
          continue;
        }
        const std::size_t gain = base - dist;
        if (!best || gain > best->gain) {
          best = Shift{start, len, dest, gain};
        }
      }
    }
  }
  return best;
}

struct TerRun {
  EditCounts counts;
  EditTrace trace;
};

TerRun greedy_ter(const Ids& hyp, const Ids& ref, std::span<const std::string> ref_tokens) {
  Ids cur = hyp;
  EditTrace shifts;
  for (;;) {
    Alignment a = align(cur, ref, ref_tokens);
    std::optional<Shift> s;
    if (a.cost > 0) {
      s = best_shift(cur, ref, a);
    }
    // A shift costs one edit itself, so it must save at least two.
    if (!s || s->gain < 2) {
      TerRun run;
      run.counts = a.counts;
      run.counts.shifts = shifts.size();
      run.trace = std::move(shifts);
      run.trace.insert(run.trace.end(), std::make_move_iterator(a.ops.begin()), std::make_move_iterator(a.ops.end()));
      return run;
    }
    cur = apply_shift(cur, s->start, s->length, s->dest);
    shifts.push_back(EditOp::shift(s->start, s->length, s->dest));
  }
}

void require_reference(std::size_t ref_size) {
  if (ref_size == 0) {
    throw UndefinedRateError("undefined rate: empty reference");
  }
}

}  // namespace

std::string to_decimal(Rational r, int places) {
  const bool negative = r < 0;
  if (negative) r = -r;
  std::int64_t scale = 1;
  for (int k = 0; k < places; ++k) scale *= 10;
  // Round half up on the magnitude.
  const Rational scaled = r * scale;
  std::int64_t q = scaled.numerator() / scaled.denominator();
  const std::int64_t rem = scaled.numerator() % scaled.denominator();
  if (2 * rem >= scaled.denominator()) ++q;

  std::string digits = std::to_string(q);
  if (places > 0) {
    if (static_cast<int>(digits.size()) <= places) {
      digits.insert(0, static_cast<std::size_t>(places + 1) - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  }
  if (negative && q != 0) digits.insert(0, "-");
  return digits;
}

TokenSequence TokenSequence::from_tokens(std::vector<std::string> tokens) {
  TokenSequence seq;
  for (const auto& t : tokens) {
    if (!seq.text.empty()) seq.text += ' ';
    seq.text += t;
  }
  seq.tokens = std::move(tokens);
  return seq;
}

TokenSequence tokenize(std::string_view input, TokenizerConfig config) {
  TokenSequence seq;
  seq.config = config;
  seq.text = text::nfc(input);
  if (config.lowercase) {
    seq.text = text::lowercase(seq.text);
  }
  for (auto& word : text::split_whitespace(seq.text)) {
    if (!config.split_punctuation) {
      seq.tokens.push_back(std::move(word));
      continue;
    }
    for (auto& piece : text::split_edge_punctuation(word)) {
      seq.tokens.push_back(std::move(piece));
    }
  }
  return seq;
}

std::vector<std::string> replay(std::span<const std::string> hyp, const EditTrace& trace) {
  std::vector<std::string> cur(hyp.begin(), hyp.end());
  std::size_t k = 0;
  for (; k < trace.size() && trace[k].kind == EditOp::Kind::kShift; ++k) {
    const auto& op = trace[k];
    if (op.length == 0 || op.hyp_index + op.length > cur.size() || op.dest > cur.size() - op.length) {
      throw DataError("trace shift out of range");
    }
    cur = apply_shift(cur, op.hyp_index, op.length, op.dest);
  }

  std::vector<std::string> out;
  std::size_t next_hyp = 0;
  std::size_t next_ref = 0;
  auto consume_hyp = [&](std::size_t i) {
    if (i != next_hyp || i >= cur.size()) throw DataError("trace hypothesis index out of order");
    ++next_hyp;
  };
  auto consume_ref = [&](std::size_t j) {
    if (j != next_ref) throw DataError("trace reference index out of order");
    ++next_ref;
  };
  for (; k < trace.size(); ++k) {
    const auto& op = trace[k];
    switch (op.kind) {
      case EditOp::Kind::kMatch:
        consume_hyp(op.hyp_index);
        consume_ref(op.ref_index);
        out.push_back(cur[op.hyp_index]);
        break;
      case EditOp::Kind::kSubstitute:
        consume_hyp(op.hyp_index);
        consume_ref(op.ref_index);
        out.push_back(op.token);
        break;
      case EditOp::Kind::kInsert:
        consume_ref(op.ref_index);
        out.push_back(op.token);
        break;
      case EditOp::Kind::kDelete:
        consume_hyp(op.hyp_index);
        break;
      case EditOp::Kind::kShift:
        throw DataError("trace shift after positional ops");
    }
  }
  if (next_hyp != cur.size()) {
    throw DataError("trace leaves hypothesis tokens unconsumed");
  }
  return out;
}

EditResult wer(std::span<const std::string> hyp, std::span<const std::string> ref) {
  require_reference(ref.size());
  Interner interner;
  const Ids h = interner.intern(hyp);
  const Ids r = interner.intern(ref);
  Alignment a = align(h, r, ref);
  EditResult result;
  result.rate = Rational(static_cast<std::int64_t>(a.cost), static_cast<std::int64_t>(ref.size()));
  result.counts = a.counts;
  result.trace = std::move(a.ops);
  return result;
}

EditResult wer(const TokenSequence& hyp, const TokenSequence& ref) { return wer(hyp.tokens, ref.tokens); }

std::int64_t PerResult::errors() const noexcept {
  const auto h = static_cast<std::int64_t>(hyp_length);
  const auto r = static_cast<std::int64_t>(ref_length);
  return r - (static_cast<std::int64_t>(correct) - std::max<std::int64_t>(0, h - r));
}

PerResult per(std::span<const std::string> hyp, std::span<const std::string> ref) {
  require_reference(ref.size());
  std::unordered_map<std::string_view, std::int64_t> remaining;
  for (const auto& t : ref) ++remaining[t];
  PerResult result;
  for (const auto& t : hyp) {
    auto it = remaining.find(t);
    if (it != remaining.end() && it->second > 0) {
      --it->second;
      ++result.correct;
    }
  }
  result.hyp_length = hyp.size();
  result.ref_length = ref.size();
  result.rate = Rational(result.errors(), static_cast<std::int64_t>(ref.size()));
  return result;
}

PerResult per(const TokenSequence& hyp, const TokenSequence& ref) { return per(hyp.tokens, ref.tokens); }

EditResult ter(std::span<const std::string> hyp, std::span<const std::vector<std::string>> refs) {
  if (refs.empty()) {
    throw DataError("TER needs at least one reference");
  }
  std::int64_t total_ref_len = 0;
  for (const auto& r : refs) {
    require_reference(r.size());
    total_ref_len += static_cast<std::int64_t>(r.size());
  }

  Interner interner;
  const Ids h = interner.intern(hyp);
  std::optional<TerRun> best;
  std::size_t best_index = 0;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    TerRun run = greedy_ter(h, interner.intern(refs[k]), refs[k]);
    if (!best || run.counts.edits() < best->counts.edits()) {
      best = std::move(run);
      best_index = k;
    }
  }

  EditResult result;
  // edits / (total / k) == edits * k / total
  result.rate = Rational(static_cast<std::int64_t>(best->counts.edits()) * static_cast<std::int64_t>(refs.size()),
                         total_ref_len);
  result.counts = best->counts;
  result.trace = std::move(best->trace);
  result.reference_index = best_index;
  return result;
}

EditResult ter(const TokenSequence& hyp, std::span<const TokenSequence> refs) {
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(refs.size());
  for (const auto& r : refs) tokens.push_back(r.tokens);
  return ter(hyp.tokens, tokens);
}

EditResult hter(const TokenSequence& hyp, const TokenSequence& post_edited) {
  return ter(hyp, std::span<const TokenSequence>(&post_edited, 1));
}

}  // namespace hope::metrics
