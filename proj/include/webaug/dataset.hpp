#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace webaug {

// Which stage produced a labeled pair. A pair that survives a dataset union
// can carry more than one.
enum class Provenance {
  web_match,       // string match against the lexicon
  dcnn,            // visual confidence over an unlabeled pool
  web_filtered,    // web match filtered by visual confidence
  textclf,         // text classifier prediction
  textclf_filtered // classifier prediction filtered by visual confidence
};

const char *to_string(Provenance p);
std::optional<Provenance> provenance_from_string(std::string_view s);

// An (image, category) pair. confidence is present whenever a score provider
// was involved in producing the pair.
struct LabeledImage {
  std::string item_id;
  std::string image_ref;
  int category_id = 0; // 1..C
  std::optional<double> confidence;
  std::vector<Provenance> provenance; // non-empty, unique, primary first
};

// A named collection of LabeledImage, kept sorted by (category_id, item_id)
// with no duplicate (item_id, category_id) pair. One item may appear under
// several categories.
struct LabeledDataset {
  std::string name;
  std::vector<LabeledImage> items;

  size_t size() const { return items.size(); }
  bool contains(const std::string &item_id, int category_id) const;
};

// Sorts by (category_id, item_id) and rejects duplicate pairs.
void finalize_dataset(LabeledDataset &ds);

LabeledDataset read_dataset_file(const std::string &path,
                                 const std::string &name = "");
void write_dataset_file(const LabeledDataset &ds, const std::string &path);
std::string dataset_line(const LabeledImage &img);

// item_id -> true category id, 0 meaning "none of the C categories".
struct TruthTable {
  std::unordered_map<std::string, int> labels;

  // -1 when the item is not covered at all.
  int lookup(const std::string &item_id) const {
    auto it = labels.find(item_id);
    return it == labels.end() ? -1 : it->second;
  }
  bool covers(const std::string &item_id) const {
    return labels.count(item_id) > 0;
  }
};

} // namespace webaug
