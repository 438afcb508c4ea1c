#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "webaug/corpus.hpp"
#include "webaug/dataset.hpp"

namespace webaug {

// Visual confidence source standing in for a trained image classifier.
// Implementations must be deterministic per (image, category), return values
// in [0,1], and be safe for concurrent reads. A missing score is an explicit
// nullopt, never silently 0.
class ScoreProvider {
public:
  virtual ~ScoreProvider() = default;
  virtual std::optional<double> score(std::string_view item_id,
                                      std::string_view image_ref,
                                      int category_id) const = 0;
};

// Precomputed score table loaded from a file keyed by item id or image ref.
class FileScoreProvider : public ScoreProvider {
public:
  static FileScoreProvider from_file(const std::string &path);

  void add(std::string key, int category_id, double score);
  std::optional<double> score(std::string_view item_id,
                              std::string_view image_ref,
                              int category_id) const override;
  size_t size() const { return table_.size(); }

private:
  struct PairHash {
    size_t operator()(const std::pair<std::string, int> &p) const {
      return std::hash<std::string>()(p.first) * 1000003u +
             static_cast<size_t>(p.second);
    }
  };
  std::unordered_map<std::pair<std::string, int>, double, PairHash> table_;
};

struct ScoreEntry {
  std::string id;
  int category_id;
  double score;
};
void write_score_file(const std::string &path,
                      const std::vector<ScoreEntry> &entries);

// Derives scores from a ground-truth table: true pairs draw from a high-mean
// distribution, all other pairs from a low-mean one, with the overlap
// controlled by sharpness. flip_prob swaps the two distributions for a pair,
// injecting provider-side noise. Deterministic per pair regardless of query
// order.
class OracleScoreProvider : public ScoreProvider {
public:
  OracleScoreProvider(TruthTable truth, double sharpness, double flip_prob,
                      uint64_t seed);
  std::optional<double> score(std::string_view item_id,
                              std::string_view image_ref,
                              int category_id) const override;

private:
  TruthTable truth_;
  double sharpness_;
  double flip_prob_;
  uint64_t seed_;
};

// Draws one score from the generator's two-regime score model. Shared with
// the synthetic corpus generator so file-backed and oracle providers agree
// on distribution shape.
double draw_pair_score(bool true_pair, double sharpness, uint64_t pair_seed);

// alpha' < alpha and beta <= alpha/5 ("much smaller") are enforced.
struct ThresholdConfig {
  double alpha = 0.1;
  double alpha_prime = 0.01;
  double beta = 0.01;

  void validate() const; // throws std::invalid_argument
};

struct FilterCounters {
  uint64_t kept = 0;
  uint64_t dropped_below = 0;
  uint64_t dropped_unknown = 0;
};

// E_V: every (image, category) pair with score >= alpha over an unlabeled
// pool. Unknown scores are skipped and counted.
LabeledDataset label_by_dcnn(const std::vector<UnlabeledImageRef> &unlabeled,
                             const ScoreProvider &provider, double alpha,
                             int category_count,
                             FilterCounters *counters = nullptr,
                             int threads = 1);

// Keeps exactly the pairs whose own-category score is >= threshold (boundary
// kept). Survivors carry the stamp as their provenance and their confidence
// is recorded. Unknown scores are dropped and counted separately.
LabeledDataset filter_by_confidence(const LabeledDataset &dataset,
                                    const ScoreProvider &provider,
                                    double threshold,
                                    Provenance stamp = Provenance::web_filtered,
                                    FilterCounters *counters = nullptr,
                                    int threads = 1);

// N_VTweb: pairs with score strictly below beta; the noise-class seed for
// the text classifier. Unknown scores are excluded (absence of a score is
// not evidence of noise).
LabeledDataset collect_noise(const LabeledDataset &dataset,
                             const ScoreProvider &provider, double beta,
                             FilterCounters *counters = nullptr,
                             int threads = 1);

} // namespace webaug
