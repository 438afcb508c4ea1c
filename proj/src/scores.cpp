#include "webaug/scores.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "webaug/jsonl.hpp"
#include "webaug/parallel.hpp"
#include "webaug/rng.hpp"
#include "webaug/textclf.hpp" // fnv1a64

namespace webaug {

FileScoreProvider FileScoreProvider::from_file(const std::string &path) {
  FileScoreProvider provider;
  for_each_line(path, [&](size_t line_no, std::string_view line) {
    json obj = json::parse(line, nullptr, false);
    if (!obj.is_object())
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": not a JSON object");
    if (!obj.contains("id") || !obj.contains("category_id") ||
        !obj.contains("score"))
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": score entries need id, category_id, score");
    double s = obj["score"].get<double>();
    if (!(s >= 0.0 && s <= 1.0))
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": score outside [0,1]");
    provider.add(obj["id"].get<std::string>(), obj["category_id"].get<int>(),
                 s);
  });
  return provider;
}

void FileScoreProvider::add(std::string key, int category_id, double score) {
  table_[{std::move(key), category_id}] = score;
}

std::optional<double> FileScoreProvider::score(std::string_view item_id,
                                               std::string_view image_ref,
                                               int category_id) const {
  auto it = table_.find({std::string(item_id), category_id});
  if (it == table_.end() && !image_ref.empty())
    it = table_.find({std::string(image_ref), category_id});
  if (it == table_.end())
    return std::nullopt;
  return it->second;
}

void write_score_file(const std::string &path,
                      const std::vector<ScoreEntry> &entries) {
  JsonlWriter out(path);
  for (const ScoreEntry &e : entries) {
    json obj;
    obj["id"] = e.id;
    obj["category_id"] = e.category_id;
    obj["score"] = e.score;
    out.write(obj);
  }
  out.close();
}

// True pairs concentrate near 1 (with a small uniform tail so some drop below
// any threshold); non-pairs concentrate near 0 with a thin upper tail.
// Sharpness widens the gap between the regimes.
double draw_pair_score(bool true_pair, double sharpness, uint64_t pair_seed) {
  std::mt19937_64 rng(pair_seed);
  const double u1 = rng_real(rng);
  const double u2 = rng_real(rng);
  if (true_pair) {
    if (u1 < 0.85)
      return std::pow(u2, 1.0 / (2.0 * sharpness));
    return u2;
  }
  return 1.0 - std::pow(u2, 1.0 / (16.0 * sharpness));
}

OracleScoreProvider::OracleScoreProvider(TruthTable truth, double sharpness,
                                         double flip_prob, uint64_t seed)
    : truth_(std::move(truth)), sharpness_(sharpness), flip_prob_(flip_prob),
      seed_(seed) {
  if (!(sharpness_ > 0.0))
    throw std::invalid_argument("sharpness must be positive");
  if (flip_prob_ < 0.0 || flip_prob_ > 1.0)
    throw std::invalid_argument("flip_prob must be in [0,1]");
}

std::optional<double> OracleScoreProvider::score(std::string_view item_id,
                                                 std::string_view,
                                                 int category_id) const {
  const int truth = truth_.lookup(std::string(item_id));
  if (truth < 0)
    return std::nullopt;
  const uint64_t pair_tag =
      fnv1a64(item_id) * 1000003ULL + static_cast<uint64_t>(category_id);
  const uint64_t pair_seed = derive_seed(seed_, pair_tag);
  bool true_pair = truth == category_id;
  if (flip_prob_ > 0.0) {
    std::mt19937_64 flip_rng(derive_seed(pair_seed, 1));
    if (rng_real(flip_rng) < flip_prob_)
      true_pair = !true_pair;
  }
  return draw_pair_score(true_pair, sharpness_, pair_seed);
}

void ThresholdConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must be in (0,1]");
  if (!(alpha_prime > 0.0 && alpha_prime < alpha))
    throw std::invalid_argument("alpha_prime must satisfy 0 < alpha' < alpha");
  if (!(beta > 0.0 && beta <= alpha / 5.0))
    throw std::invalid_argument("beta must satisfy 0 < beta <= alpha/5");
}

namespace {

enum class Keep { at_or_above, strictly_below };

struct ScoredPair {
  LabeledImage image;
  int verdict; // 0 keep, 1 below, 2 unknown
};

void apply_counters(const std::vector<ScoredPair> &pairs,
                    FilterCounters *counters) {
  if (!counters)
    return;
  for (const auto &p : pairs) {
    if (p.verdict == 0)
      ++counters->kept;
    else if (p.verdict == 1)
      ++counters->dropped_below;
    else
      ++counters->dropped_unknown;
  }
}

LabeledDataset select_by_score(const LabeledDataset &dataset,
                               const ScoreProvider &provider, double threshold,
                               Keep keep, Provenance stamp, std::string name,
                               FilterCounters *counters, int threads) {
  auto pairs = parallel_map_chunks<LabeledImage, ScoredPair>(
      dataset.items, threads, 1024,
      [&](const LabeledImage &img, std::vector<ScoredPair> &out) {
        auto s = provider.score(img.item_id, img.image_ref, img.category_id);
        if (!s) {
          out.push_back({img, 2});
          return;
        }
        const bool selected =
            keep == Keep::at_or_above ? *s >= threshold : *s < threshold;
        if (!selected) {
          out.push_back({img, 1});
          return;
        }
        LabeledImage kept = img;
        kept.confidence = *s;
        kept.provenance = {stamp};
        out.push_back({std::move(kept), 0});
      });
  apply_counters(pairs, counters);
  LabeledDataset result;
  result.name = std::move(name);
  for (auto &p : pairs)
    if (p.verdict == 0)
      result.items.push_back(std::move(p.image));
  finalize_dataset(result);
  return result;
}

} // namespace

LabeledDataset label_by_dcnn(const std::vector<UnlabeledImageRef> &unlabeled,
                             const ScoreProvider &provider, double alpha,
                             int category_count, FilterCounters *counters,
                             int threads) {
  if (category_count <= 0)
    throw std::invalid_argument("category_count must be positive");
  auto pairs = parallel_map_chunks<UnlabeledImageRef, ScoredPair>(
      unlabeled, threads, 256,
      [&](const UnlabeledImageRef &ref, std::vector<ScoredPair> &out) {
        for (int c = 1; c <= category_count; ++c) {
          auto s = provider.score(ref.item_id, ref.image_ref, c);
          if (!s) {
            out.push_back({{}, 2});
            continue;
          }
          if (*s < alpha) {
            out.push_back({{}, 1});
            continue;
          }
          LabeledImage img;
          img.item_id = ref.item_id;
          img.image_ref = ref.image_ref;
          img.category_id = c;
          img.confidence = *s;
          img.provenance = {Provenance::dcnn};
          out.push_back({std::move(img), 0});
        }
      });
  apply_counters(pairs, counters);
  LabeledDataset result;
  result.name = "E_V";
  for (auto &p : pairs)
    if (p.verdict == 0)
      result.items.push_back(std::move(p.image));
  finalize_dataset(result);
  return result;
}

LabeledDataset filter_by_confidence(const LabeledDataset &dataset,
                                    const ScoreProvider &provider,
                                    double threshold, Provenance stamp,
                                    FilterCounters *counters, int threads) {
  std::string name = stamp == Provenance::web_filtered  ? "E_VTweb"
                     : stamp == Provenance::textclf_filtered ? "E_VTweb_plus"
                                                             : dataset.name;
  return select_by_score(dataset, provider, threshold, Keep::at_or_above,
                         stamp, std::move(name), counters, threads);
}

LabeledDataset collect_noise(const LabeledDataset &dataset,
                             const ScoreProvider &provider, double beta,
                             FilterCounters *counters, int threads) {
  return select_by_score(dataset, provider, beta, Keep::strictly_below,
                         Provenance::web_match, "N_VTweb", counters, threads);
}

} // namespace webaug
