#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "webaug/corpus.hpp"
#include "webaug/dataset.hpp"
#include "webaug/matcher.hpp"
#include "webaug/scores.hpp"
#include "webaug/textclf.hpp"

namespace webaug {

struct PipelineConfig {
  std::string corpus_path;
  std::string lexicon_path;
  std::string scores_path;
  std::string out_dir;

  ThresholdConfig thresholds;
  MatchMode mode = MatchMode::word_boundary;
  TrainConfig train;
  double predict_threshold = 0.5;

  uint64_t hard_cap = 15000;
  uint64_t target_cap = 6000;
  bool balance_output = false;

  bool textclf_enabled = true;
  uint64_t seed = 1;
  int threads = 1;

  void validate() const;
  static PipelineConfig from_json_file(const std::string &path);
  static PipelineConfig from_json_text(const std::string &text);
  std::string to_json_text() const;
  // Stable hash over the canonical serialization, hex-encoded.
  std::string config_hash() const;
};

// Set union on (item_id, category_id). When both sides carry a pair, the
// higher confidence wins and both provenances are kept.
LabeledDataset union_datasets(const LabeledDataset &a, const LabeledDataset &b,
                              const std::string &name);

// Two-stage subsampling: categories above hard_cap are cut to hard_cap,
// then every category above target_cap is cut to target_cap. Categories at
// or below target_cap pass through untouched; nothing is ever duplicated.
LabeledDataset balance(const LabeledDataset &dataset, uint64_t hard_cap,
                       uint64_t target_cap, uint64_t seed);

struct DatasetStats {
  std::map<int, uint64_t> per_category;
  // Union attribution: a pair is credited to every field that fired for it;
  // proportions normalize over total credits.
  std::array<double, 4> field_proportions{};
  std::array<uint64_t, 4> field_credits{};
  std::array<uint64_t, 20> confidence_hist{}; // 20 uniform bins on [0,1]
  uint64_t scored = 0;       // pairs contributing to the histogram
  uint64_t total = 0;
  uint64_t unattributed = 0; // pairs whose item is missing from the corpus
};

// corpus/matcher drive field attribution; provider drives the confidence
// histogram (pairs the provider does not know are left out of it). Any of
// the three may be null.
DatasetStats compute_stats(const LabeledDataset &dataset,
                           const CorpusIndex *corpus,
                           const PhraseMatcher *matcher,
                           const ScoreProvider *provider);
void write_stats_file(const DatasetStats &stats, const std::string &path);

struct AccuracyReport {
  bool defined = false;        // false for an empty dataset
  double sampled = 0.0;        // over the per-category sample
  uint64_t sampled_n = 0;
  std::optional<double> exact; // full population, when truth covers every item
  uint64_t total_n = 0;
};

// Samples min(sample_per_category, count) pairs per category without
// replacement, deterministic by seed; a pair is correct when truth maps its
// item to exactly its category.
AccuracyReport estimate_accuracy(const LabeledDataset &dataset,
                                 const TruthTable &truth,
                                 int sample_per_category, uint64_t seed);

struct StageInfo {
  std::string name;
  uint64_t count = 0;
  std::string path;
  double wall_ms = 0.0;
};

struct Manifest {
  std::string config_hash;
  uint64_t seed = 0;
  std::vector<StageInfo> stages;
  bool failed = false;
  std::string failed_stage;
  std::string error;

  const StageInfo *find_stage(const std::string &name) const;
  // Reproducibility compares everything except wall-clock times.
  bool equivalent(const Manifest &other) const;
};

void write_manifest(const Manifest &m, const std::string &path);
Manifest read_manifest(const std::string &path);

struct PipelineResult {
  Manifest manifest;
  std::string manifest_path;
};

// Runs the full augmentation flow: E_T -> E_VTweb / N_VTweb -> text sets ->
// classifier -> E_Tweb_plus -> E_VTweb_plus -> E_VT, persisting every stage
// under out_dir plus per-stage stats and a manifest. A stage failure stops
// the run, keeps earlier outputs, and records the failing stage in a
// manifest flagged failed=true before the error is rethrown as
// PipelineError.
PipelineResult run_full_pipeline(const PipelineConfig &config);

struct PipelineError : std::runtime_error {
  PipelineError(std::string stage_, const std::string &what_)
      : std::runtime_error(what_), stage(std::move(stage_)) {}
  std::string stage;
};

} // namespace webaug
