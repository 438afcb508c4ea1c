#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "webaug/corpus.hpp"
#include "webaug/dataset.hpp"
#include "webaug/lexicon.hpp"
#include "webaug/matcher.hpp"
#include "webaug/rng.hpp"

namespace testutil {

// Per-test scratch directory under the working directory, wiped on entry so
// reruns never see stale files.
class TempDir {
public:
  explicit TempDir(const std::string &name)
      : path_(std::filesystem::current_path() / "scratch" / name) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  std::string operator/(const std::string &leaf) const {
    return (path_ / leaf).string();
  }
  const std::filesystem::path &path() const { return path_; }

private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

using PairSet = std::set<std::pair<std::string, int>>;

inline PairSet pair_set(const webaug::LabeledDataset &ds) {
  PairSet out;
  for (const webaug::LabeledImage &img : ds.items)
    out.insert({img.item_id, img.category_id});
  return out;
}

inline bool subset_of(const PairSet &a, const PairSet &b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Naive reference matcher: every phrase scanned against every field at every
// position. Quadratic and obviously correct, used as the oracle for the
// automaton.
inline std::vector<size_t> naive_occurrences(const std::string &text,
                                             const std::string &phrase) {
  std::vector<size_t> at;
  for (size_t pos = text.find(phrase); pos != std::string::npos;
       pos = text.find(phrase, pos + 1))
    at.push_back(pos);
  return at;
}

inline bool naive_boundary_ok(const std::string &text, size_t begin,
                              size_t end) {
  if (begin > 0 && webaug::is_word_byte(
                       static_cast<unsigned char>(text[begin - 1])))
    return false;
  if (end < text.size() &&
      webaug::is_word_byte(static_cast<unsigned char>(text[end])))
    return false;
  return true;
}

struct NaiveHit {
  int category_id;
  std::set<webaug::FieldType> fields;
  std::set<std::string> phrases;
};

// category_id -> hit, or empty map when nothing fires.
inline std::map<int, NaiveHit> naive_match_item(const webaug::WebDataItem &item,
                                                const webaug::Lexicon &lexicon,
                                                webaug::MatchMode mode) {
  std::map<int, NaiveHit> hits;
  for (webaug::FieldType f : webaug::kAllFields) {
    const std::string text = webaug::normalize_phrase(item.field(f));
    if (text.empty())
      continue;
    for (const webaug::Category &cat : lexicon.categories) {
      for (const webaug::Phrase &p : cat.phrases) {
        bool found = false;
        for (size_t pos : naive_occurrences(text, p.text)) {
          if (mode == webaug::MatchMode::substring ||
              naive_boundary_ok(text, pos, pos + p.text.size())) {
            found = true;
            break;
          }
        }
        if (found) {
          NaiveHit &h = hits[cat.id];
          h.category_id = cat.id;
          h.fields.insert(f);
          h.phrases.insert(p.text);
        }
      }
    }
  }
  return hits;
}

// Random instances for the oracle tests. A small alphabet with spaces makes
// overlapping and nested patterns common.
inline std::string random_text(std::mt19937_64 &rng, size_t max_len) {
  static const char alphabet[] = "aabbcc  ";
  const size_t len = webaug::rng_below(rng, max_len + 1);
  std::string s;
  for (size_t i = 0; i < len; ++i)
    s.push_back(alphabet[webaug::rng_below(rng, sizeof alphabet - 1)]);
  return s;
}

inline webaug::Lexicon random_lexicon(std::mt19937_64 &rng, int max_categories,
                                      int max_phrases) {
  const int C = 1 + static_cast<int>(webaug::rng_below(
                        rng, static_cast<uint64_t>(max_categories)));
  std::vector<webaug::Category> cats;
  for (int c = 1; c <= C; ++c) {
    webaug::Category cat;
    cat.id = c;
    cat.name = "cat" + std::to_string(c);
    const int n = 1 + static_cast<int>(webaug::rng_below(
                          rng, static_cast<uint64_t>(max_phrases)));
    for (int k = 0; k < n; ++k) {
      std::string p;
      do {
        p = random_text(rng, 6);
      } while (webaug::normalize_phrase(p).empty());
      cat.phrases.push_back({p, "en"});
    }
    cats.push_back(std::move(cat));
  }
  return webaug::build_lexicon(std::move(cats));
}

inline webaug::WebDataItem random_item(std::mt19937_64 &rng, size_t index) {
  webaug::WebDataItem item;
  char buf[16];
  std::snprintf(buf, sizeof buf, "t%05zu", index);
  item.item_id = buf;
  item.domain = "d.example";
  item.image_ref = "http://d.example/" + item.item_id;
  do {
    item.anchor_text = random_text(rng, 40);
    item.alt_text = random_text(rng, 40);
    item.page_title = random_text(rng, 40);
    item.surrounding_text = random_text(rng, 40);
  } while (!item.has_any_text());
  return item;
}

} // namespace testutil
