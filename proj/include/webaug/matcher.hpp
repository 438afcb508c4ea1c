#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "webaug/corpus.hpp"
#include "webaug/dataset.hpp"
#include "webaug/lexicon.hpp"

namespace webaug {

enum class MatchMode { substring, word_boundary };

const char *to_string(MatchMode m);
std::optional<MatchMode> match_mode_from_string(std::string_view s);

// All categories one item matched, with the fields and phrases that fired.
struct MatchHit {
  std::string item_id;
  int category_id = 0;
  std::vector<FieldType> fields_hit;      // canonical field order, non-empty
  std::vector<std::string> phrases_hit;   // sorted, unique, all from S_c
};

// Single-pass multi-pattern matcher over all categories' phrase sets,
// built as an Aho-Corasick automaton over normalized pattern bytes.
// Immutable after construction; safe to share across threads.
class PhraseMatcher {
public:
  PhraseMatcher(const Lexicon &lexicon, MatchMode mode);

  MatchMode mode() const { return mode_; }
  int category_count() const { return category_count_; }

  // Pattern occurrences in an already-normalized text. Emits (category_id,
  // pattern index) pairs, deduplicated, sorted.
  struct PatternHit {
    int category_id;
    uint32_t pattern; // index into patterns()
    bool operator<(const PatternHit &o) const {
      return category_id != o.category_id ? category_id < o.category_id
                                          : pattern < o.pattern;
    }
    bool operator==(const PatternHit &o) const {
      return category_id == o.category_id && pattern == o.pattern;
    }
  };
  void find(std::string_view normalized_text, std::vector<PatternHit> &out) const;

  const std::string &pattern_text(uint32_t pattern) const {
    return patterns_[pattern].text;
  }

  // Normalizes each non-empty field and reports one MatchHit per category
  // that fired, ordered by category_id. All four fields are always scanned
  // so that fields_hit is complete.
  std::vector<MatchHit> match_item(const WebDataItem &item) const;

private:
  struct Pattern {
    std::string text; // normalized
    int category_id;
  };
  struct Node {
    std::vector<std::pair<unsigned char, int32_t>> next; // sorted by byte
    int32_t fail = 0;
    std::vector<uint32_t> outputs; // patterns ending here (incl. via fail)
  };

  int32_t child(int32_t node, unsigned char c) const;
  int32_t step(int32_t node, unsigned char c) const;
  bool boundary_ok(std::string_view text, size_t begin, size_t end) const;

  std::vector<Pattern> patterns_;
  std::vector<Node> nodes_;
  MatchMode mode_;
  int category_count_;
};

struct WebLabelResult {
  LabeledDataset dataset; // named "E_T", provenance web_match, no confidence
  // Number of (item, category) pairs each field produced (a pair hit by two
  // fields is credited to both).
  std::array<uint64_t, 4> field_pair_credits{};
  uint64_t items_processed = 0;
  uint64_t items_matched = 0;
};

// Labels a corpus by string match: one pair per (item, category) with at
// least one phrase occurrence. Deterministic for any thread count.
WebLabelResult label_by_web(const std::vector<WebDataItem> &corpus,
                            const PhraseMatcher &matcher, int threads = 1);
WebLabelResult label_by_web(CorpusFileReader &reader,
                            const PhraseMatcher &matcher, int threads = 1);

} // namespace webaug
