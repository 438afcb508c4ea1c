#include "webaug/matcher.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

#include "webaug/parallel.hpp"

namespace webaug {

const char *to_string(MatchMode m) {
  return m == MatchMode::substring ? "substring" : "word_boundary";
}

std::optional<MatchMode> match_mode_from_string(std::string_view s) {
  if (s == "substring")
    return MatchMode::substring;
  if (s == "word_boundary" || s == "word-boundary")
    return MatchMode::word_boundary;
  return std::nullopt;
}

PhraseMatcher::PhraseMatcher(const Lexicon &lexicon, MatchMode mode)
    : mode_(mode), category_count_(lexicon.category_count()) {
  if (lexicon.categories.empty())
    throw std::invalid_argument("matcher needs a non-empty lexicon");

  // One pattern per distinct (normalized text, category); the same text in
  // several languages collapses to one pattern.
  for (const Category &cat : lexicon.categories) {
    const std::string *prev = nullptr;
    for (const Phrase &p : cat.phrases) { // sorted by text
      if (prev && *prev == p.text)
        continue;
      patterns_.push_back({p.text, cat.id});
      prev = &p.text;
    }
  }

  nodes_.emplace_back(); // root
  for (uint32_t pi = 0; pi < patterns_.size(); ++pi) {
    int32_t node = 0;
    for (unsigned char c : patterns_[pi].text) {
      int32_t nxt = child(node, c);
      if (nxt < 0) {
        nxt = static_cast<int32_t>(nodes_.size());
        nodes_.emplace_back();
        auto &edges = nodes_[node].next;
        edges.insert(std::upper_bound(edges.begin(), edges.end(),
                                      std::make_pair(c, int32_t{0}),
                                      [](auto a, auto b) { return a.first < b.first; }),
                     {c, nxt});
      }
      node = nxt;
    }
    nodes_[node].outputs.push_back(pi);
  }

  // Failure links by BFS; each node inherits its fail target's outputs so a
  // single lookup at search time yields every pattern ending at a position.
  std::deque<int32_t> queue;
  for (auto [c, v] : nodes_[0].next) {
    nodes_[v].fail = 0;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    int32_t u = queue.front();
    queue.pop_front();
    for (auto [c, v] : nodes_[u].next) {
      int32_t f = step(nodes_[u].fail, c);
      nodes_[v].fail = f;
      const auto &inherited = nodes_[f].outputs;
      nodes_[v].outputs.insert(nodes_[v].outputs.end(), inherited.begin(),
                               inherited.end());
      queue.push_back(v);
    }
  }
}

int32_t PhraseMatcher::child(int32_t node, unsigned char c) const {
  const auto &edges = nodes_[node].next;
  auto it = std::lower_bound(edges.begin(), edges.end(), c,
                             [](const std::pair<unsigned char, int32_t> &e,
                                unsigned char key) { return e.first < key; });
  return (it != edges.end() && it->first == c) ? it->second : -1;
}

int32_t PhraseMatcher::step(int32_t node, unsigned char c) const {
  for (;;) {
    int32_t nxt = child(node, c);
    if (nxt >= 0)
      return nxt;
    if (node == 0)
      return 0;
    node = nodes_[node].fail;
  }
}

bool PhraseMatcher::boundary_ok(std::string_view text, size_t begin,
                                size_t end) const {
  if (begin > 0 && is_word_byte(static_cast<unsigned char>(text[begin - 1])))
    return false;
  if (end < text.size() && is_word_byte(static_cast<unsigned char>(text[end])))
    return false;
  return true;
}

void PhraseMatcher::find(std::string_view normalized_text,
                         std::vector<PatternHit> &out) const {
  out.clear();
  int32_t node = 0;
  for (size_t i = 0; i < normalized_text.size(); ++i) {
    node = step(node, static_cast<unsigned char>(normalized_text[i]));
    for (uint32_t pi : nodes_[node].outputs) {
      const Pattern &p = patterns_[pi];
      const size_t end = i + 1;
      const size_t begin = end - p.text.size();
      if (mode_ == MatchMode::word_boundary &&
          !boundary_ok(normalized_text, begin, end))
        continue;
      out.push_back({p.category_id, pi});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

std::vector<MatchHit> PhraseMatcher::match_item(const WebDataItem &item) const {
  struct Acc {
    uint8_t field_mask = 0;
    std::vector<uint32_t> patterns;
  };
  std::map<int, Acc> per_category;

  std::vector<PatternHit> hits;
  for (FieldType f : kAllFields) {
    const std::string &raw = item.field(f);
    if (raw.empty())
      continue;
    find(normalize_phrase(raw), hits);
    for (const PatternHit &h : hits) {
      Acc &acc = per_category[h.category_id];
      acc.field_mask |= static_cast<uint8_t>(1u << static_cast<int>(f));
      acc.patterns.push_back(h.pattern);
    }
  }

  std::vector<MatchHit> out;
  out.reserve(per_category.size());
  for (auto &[cat, acc] : per_category) {
    MatchHit hit;
    hit.item_id = item.item_id;
    hit.category_id = cat;
    for (FieldType f : kAllFields)
      if (acc.field_mask & (1u << static_cast<int>(f)))
        hit.fields_hit.push_back(f);
    std::sort(acc.patterns.begin(), acc.patterns.end());
    acc.patterns.erase(std::unique(acc.patterns.begin(), acc.patterns.end()),
                       acc.patterns.end());
    for (uint32_t pi : acc.patterns)
      hit.phrases_hit.push_back(patterns_[pi].text);
    out.push_back(std::move(hit));
  }
  return out;
}

namespace {

struct PairOut {
  LabeledImage image;
  uint8_t field_mask;
  bool first_of_item;
};

WebLabelResult merge_pairs(std::vector<PairOut> pairs, uint64_t items_seen) {
  WebLabelResult result;
  result.dataset.name = "E_T";
  result.items_processed = items_seen;
  for (auto &p : pairs) {
    if (p.first_of_item)
      ++result.items_matched;
    for (FieldType f : kAllFields)
      if (p.field_mask & (1u << static_cast<int>(f)))
        ++result.field_pair_credits[static_cast<size_t>(f)];
    result.dataset.items.push_back(std::move(p.image));
  }
  finalize_dataset(result.dataset);
  return result;
}

void match_into(const WebDataItem &item, const PhraseMatcher &matcher,
                std::vector<PairOut> &out) {
  auto hits = matcher.match_item(item);
  bool first = true;
  for (auto &hit : hits) {
    LabeledImage img;
    img.item_id = item.item_id;
    img.image_ref = item.image_ref;
    img.category_id = hit.category_id;
    img.provenance = {Provenance::web_match};
    uint8_t mask = 0;
    for (FieldType f : hit.fields_hit)
      mask |= static_cast<uint8_t>(1u << static_cast<int>(f));
    out.push_back({std::move(img), mask, first});
    first = false;
  }
}

} // namespace

WebLabelResult label_by_web(const std::vector<WebDataItem> &corpus,
                            const PhraseMatcher &matcher, int threads) {
  auto pairs = parallel_map_chunks<WebDataItem, PairOut>(
      corpus, threads, 1024,
      [&](const WebDataItem &item, std::vector<PairOut> &out) {
        match_into(item, matcher, out);
      });
  return merge_pairs(std::move(pairs), corpus.size());
}

WebLabelResult label_by_web(CorpusFileReader &reader,
                            const PhraseMatcher &matcher, int threads) {
  std::vector<PairOut> pairs;
  uint64_t items_seen = 0;
  std::vector<WebDataItem> chunk;
  const size_t chunk_cap = 4096;
  for (;;) {
    chunk.clear();
    while (chunk.size() < chunk_cap) {
      auto item = reader.next();
      if (!item)
        break;
      chunk.push_back(std::move(*item));
    }
    if (chunk.empty())
      break;
    items_seen += chunk.size();
    auto part = parallel_map_chunks<WebDataItem, PairOut>(
        chunk, threads, 256,
        [&](const WebDataItem &item, std::vector<PairOut> &out) {
          match_into(item, matcher, out);
        });
    pairs.insert(pairs.end(), std::make_move_iterator(part.begin()),
                 std::make_move_iterator(part.end()));
  }
  return merge_pairs(std::move(pairs), items_seen);
}

} // namespace webaug
