#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "webaug/corpus.hpp"
#include "webaug/dataset.hpp"

namespace webaug {

// FNV-1a 64-bit. The constants are part of the model file contract: a model
// trained with different constants cannot be loaded.
inline constexpr uint64_t kFnvOffset = 14695981039346656037ULL;
inline constexpr uint64_t kFnvPrime = 1099511628211ULL;

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = kFnvOffset;
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

// Domain vocabulary with id 0 reserved for out-of-vocabulary domains.
// Known domains get ids 1..n assigned in sorted order; size() == n + 1.
class DomainVocab {
public:
  DomainVocab() = default;
  static DomainVocab build(std::vector<std::string> domains);

  uint32_t id_of(std::string_view domain) const;
  uint32_t size() const { return static_cast<uint32_t>(sorted_.size()) + 1; }
  const std::vector<std::string> &domains() const { return sorted_; }

private:
  std::vector<std::string> sorted_;
};

// Featurized metadata record: hashed bigram ids (a multiset), the metadata
// type, and the domain id.
struct TextFeatures {
  std::vector<uint32_t> bigram_ids; // each < B; repeats allowed
  int type_id = 0;                  // 0..3
  uint32_t domain_id = 0;           // < D

  size_t n_bigrams() const { return bigram_ids.size(); }
};

// Normalizes, whitespace-tokenizes, forms consecutive-token bigrams and
// hashes each into [0, B). A single-token text falls back to hashing the
// token itself as one feature.
TextFeatures featurize(const TextRecord &record, uint32_t B,
                       const DomainVocab &vocab);

struct LabeledText {
  TextFeatures features;
  int label = 0; // 1..C+1; C+1 is the noise class
};

// Two-layer averaged-embedding softmax classifier over C + 1 classes.
// Embedding rows are laid out [bigram buckets | 4 types | domains].
struct TextClassifier {
  uint32_t B = 0;     // bigram hash buckets
  uint32_t D = 0;     // domain vocabulary size (incl. OOV)
  uint32_t C = 0;     // categories; classes are 1..C+1
  uint32_t d_emb = 0;
  std::vector<double> E; // (B + 4 + D) x d_emb, row-major
  std::vector<double> W; // (C + 1) x d_emb, row-major
  DomainVocab vocab;

  size_t embed_rows() const {
    return static_cast<size_t>(B) + 4 + D;
  }
  size_t bigram_row(uint32_t id) const { return id; }
  size_t type_row(int type_id) const {
    return static_cast<size_t>(B) + static_cast<size_t>(type_id);
  }
  size_t domain_row(uint32_t id) const {
    return static_cast<size_t>(B) + 4 + id;
  }

  // E uniform in [-1/d_emb, 1/d_emb], W zero, so the untrained model
  // predicts exactly the uniform distribution.
  void init(uint32_t B_, uint32_t D_, uint32_t C_, uint32_t d_emb_,
            uint64_t seed);

  // Hidden state: mean of the touched embedding rows over n_bigrams + 2.
  std::vector<double> hidden(const TextFeatures &f) const;
  // Class probabilities, length C+1, positive, summing to 1.
  std::vector<double> forward(const TextFeatures &f) const;
};

// Dense gradients matching E and W shapes; rows not touched by the batch
// are zero. Sized for the small models used in tests and checks.
struct Gradients {
  std::vector<double> dE;
  std::vector<double> dW;
};

// Mean negative log-likelihood over the batch and its exact gradient.
// Throws std::invalid_argument on an empty batch or a label outside 1..C+1.
double loss_and_grad(const TextClassifier &model,
                     const std::vector<LabeledText> &batch, Gradients *grads);

struct TrainConfig {
  double lr0 = 0.25;
  int epochs = 5;
  uint64_t seed = 1;
  uint32_t d_emb = 16;
  uint32_t B = 1u << 20;
  // Subsample the noise class to minus_ratio * |plus| when > 0. Default
  // keeps every example.
  double minus_ratio = 0.0;

  void validate() const;
};

// One line of the persisted text-set files.
struct TextSetRecord {
  std::string item_id;
  FieldType field_type;
  std::string text;
  std::string domain;
  int label; // 1..C+1
};

struct TextSets {
  std::vector<TextSetRecord> plus;  // labels 1..C
  std::vector<TextSetRecord> minus; // label C+1
  int category_count = 0;
};

// T+ takes every text record of every (item, category) pair in e_vtweb with
// the pair's category as label; T- takes records of n_vtweb items with the
// noise label C+1. Items that fell out of the corpus index are skipped.
TextSets build_textsets(const LabeledDataset &e_vtweb,
                        const LabeledDataset &n_vtweb,
                        const CorpusIndex &corpus, int category_count);

void write_textset_file(const std::string &path,
                        const std::vector<TextSetRecord> &records);
std::vector<TextSetRecord> read_textset_file(const std::string &path);

struct TrainResult {
  TextClassifier model;
  std::vector<double> epoch_loss; // mean per-example loss per epoch
};

// Per-example SGD with learning rate lr0 * (1 - s/S) at step s of S total.
// Bit-reproducible for a fixed seed: the shuffle order and update order are
// fully determined. Throws if either side of the text sets is empty.
TrainResult train_textclf(const TextSets &sets, const TrainConfig &config);

// Scores every record of every item; an item is labeled c (never the noise
// class) when any of its records has p(y=c) > threshold, with confidence the
// maximum such probability. Dataset is named "E_Tweb_plus".
LabeledDataset predict_label_set(const std::vector<WebDataItem> &corpus,
                                 const TextClassifier &model,
                                 double threshold = 0.5, int threads = 1);

// Model file: versioned binary dump of dimensions, hash constants, domain
// vocabulary and weights. Loading fails hard on a magic/version mismatch or
// on hash constants that differ from the compiled ones.
void save_model(const TextClassifier &model, const std::string &path);
TextClassifier load_model(const std::string &path);

} // namespace webaug
