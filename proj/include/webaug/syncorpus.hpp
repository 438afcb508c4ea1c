#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "webaug/corpus.hpp"
#include "webaug/dataset.hpp"
#include "webaug/lexicon.hpp"
#include "webaug/scores.hpp"

namespace webaug {

// Synthetic corpus with planted ground truth. Every planted match lands in
// exactly one field; noise matches reuse each category's designated
// ambiguous phrase inside filler text, and the filler vocabulary is disjoint
// from all lexicon phrases, so the planted table is exactly what the matcher
// must find.
struct GeneratorConfig {
  int categories = 10;
  uint64_t items = 20000;
  double noise_rate = 0.8;                          // fraction of planted matches that are wrong
  std::array<double, 4> field_mix = {0.5, 0.3, 0.15, 0.05}; // anchor/alt/title/surrounding
  double popularity_skew = 0.0;                     // 0 = uniform; else p(c) ~ c^-skew
  double score_sharpness = 2.0;                     // separation of the two score regimes
  uint64_t seed = 1;

  void validate() const; // throws std::invalid_argument
};

struct PlantedMatch {
  std::string item_id;
  int category_id;
  FieldType field;
};

struct GroundTruth {
  TruthTable truth;                  // item -> true category (0 = none)
  std::vector<PlantedMatch> planted; // sorted by (category_id, item_id)
};

void write_truth_file(const std::string &path, const GroundTruth &gt);
GroundTruth read_truth_file(const std::string &path);

struct SyntheticCorpus {
  std::vector<WebDataItem> items;
  Lexicon lexicon;
  std::vector<ScoreEntry> scores; // one entry per (item, category) pair
  GroundTruth ground_truth;
};

SyntheticCorpus generate_corpus(const GeneratorConfig &config);

struct GeneratedPaths {
  std::string corpus;
  std::string lexicon;
  std::string scores;
  std::string truth;
};

// Writes corpus/lexicon/scores/truth under out_dir. Same config and seed
// produce byte-identical files.
GeneratedPaths generate_to_dir(const GeneratorConfig &config,
                               const std::string &out_dir);

} // namespace webaug
