#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace webaug {

struct Phrase {
  std::string text; // always in normalized form
  std::string lang; // carried as metadata; does not affect matching
};

struct Category {
  int id = 0; // 1..C, contiguous across a lexicon
  std::string name;
  std::vector<Phrase> phrases; // sorted by (text, lang), unique, non-empty
};

struct Lexicon {
  std::vector<Category> categories; // sorted by id

  int category_count() const { return static_cast<int>(categories.size()); }
  const Category *find(int category_id) const;
};

// Shared normalization rule for phrases and matched text: case-fold, collapse
// internal whitespace runs to single spaces, trim. Folding covers ASCII,
// Latin-1, Greek and Cyrillic letter ranges; other scripts pass through
// unchanged (input is assumed composed). Idempotent; may return "".
std::string normalize_phrase(std::string_view raw);

// Word characters for word-boundary matching: ASCII letters/digits and every
// non-ASCII byte.
inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

// Loads and validates a lexicon: normalizes all phrases, rejects duplicate
// category ids, non-contiguous ids, and categories whose phrases all
// normalize away. Throws std::runtime_error naming the offender.
Lexicon load_lexicon(const std::string &path);
Lexicon parse_lexicon(const std::string &text);
void save_lexicon(const Lexicon &lexicon, const std::string &path);

// Builds a validated lexicon from raw (unnormalized) categories. Used by the
// loader and by the synthetic generator.
Lexicon build_lexicon(std::vector<Category> raw_categories);

} // namespace webaug
