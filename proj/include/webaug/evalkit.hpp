#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "webaug/dataset.hpp"

namespace webaug {

struct SweepPoint {
  double threshold = 0.0;
  uint64_t quantity = 0;
  std::optional<double> accuracy; // full-population, when truth is given
};

// Builds the dataset at every grid threshold and records (quantity,
// accuracy). grid must be ascending and within [0,1].
std::vector<SweepPoint>
sweep(const std::function<LabeledDataset(double)> &builder,
      const std::vector<double> &grid, const TruthTable *truth = nullptr);

// Tab-separated threshold/quantity/accuracy, one row per point; accuracy
// column is "-" when absent.
void write_sweep_tsv(const std::string &path,
                     const std::vector<SweepPoint> &points);

// Relevance grades on the {0, 2, 3} judgment scale for one ranked list.
struct RankedList {
  std::vector<int> relevances;
};

// NDCG at depth d: sum of (2^r - 1)/log(1+rank) over the first min(d, len)
// positions, normalized by the same sum over the descending-sorted list.
// Invariant to the log base. A list with zero ideal mass scores 0. Throws
// std::invalid_argument when depth < 1 or the list is empty.
double ndcg(const std::vector<int> &relevances, int depth);

// Same computation with an explicit logarithm base; exposed so the base
// invariance can be asserted directly.
double ndcg_with_base(const std::vector<int> &relevances, int depth,
                      double log_base);

// Batch file: one query per line, comma-separated grades. Grades outside
// {0,2,3} are rejected.
std::vector<RankedList> read_ndcg_batch(const std::string &path);

} // namespace webaug
