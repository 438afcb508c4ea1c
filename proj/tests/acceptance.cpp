// Acceptance gate: one pass/fail line per criterion, exit 0 only when every
// criterion holds. Tolerances and budgets are pinned here, next to the checks
// that use them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "webaug/evalkit.hpp"
#include "webaug/pipeline.hpp"
#include "webaug/syncorpus.hpp"
#include "webaug/textclf.hpp"

using namespace webaug;
using testutil::pair_set;
using testutil::PairSet;
using testutil::subset_of;
using testutil::TempDir;

namespace {

// Pinned tolerances and budgets.
constexpr double kGradStep = 1e-5;
constexpr double kGradRelTol = 1e-4;
constexpr double kProbTol = 1e-9;
constexpr double kNdcgTol = 1e-12;
constexpr double kAccuracyGapPts = 0.20;  // E_VTweb over E_T at the default cut
constexpr double kAccuracyDropPts = 0.02; // union may cost at most this much
constexpr double kMatcherBudgetSec = 30.0;
constexpr double kSweepBudgetSec = 60.0;
constexpr double kPipelineBudgetSec = 300.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fs", s);
  return buf;
}

std::string fmt_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
  return buf;
}

// The standard synthetic scenario all scale-bearing criteria run on.
GeneratorConfig standard_scenario() {
  GeneratorConfig cfg;
  cfg.categories = 10;
  cfg.items = 20000;
  cfg.noise_rate = 0.8;
  cfg.score_sharpness = 2.0;
  cfg.seed = 7;
  return cfg;
}

PipelineConfig pipeline_config(const GeneratedPaths &paths,
                               const std::string &out_dir, uint64_t seed) {
  PipelineConfig cfg;
  cfg.corpus_path = paths.corpus;
  cfg.lexicon_path = paths.lexicon;
  cfg.scores_path = paths.scores;
  cfg.out_dir = out_dir;
  cfg.seed = seed;
  cfg.train.seed = seed;
  return cfg;
}

double exact_accuracy(const LabeledDataset &ds, const TruthTable &truth) {
  if (ds.items.empty())
    return 0.0;
  size_t correct = 0;
  for (const LabeledImage &img : ds.items)
    if (truth.lookup(img.item_id) == img.category_id)
      ++correct;
  return static_cast<double>(correct) / static_cast<double>(ds.items.size());
}

// ---------------------------------------------------------------------------
// 1. The matcher agrees with an exhaustive position-by-position scan on
//    randomized lexicon/corpus instances, in both match modes.
Outcome criterion_matcher_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  const int kInstances = 500;
  for (int instance = 0; instance < kInstances; ++instance) {
    Lexicon lexicon = testutil::random_lexicon(rng, 10, 5); // <= 50 phrases
    const size_t n_items = 1 + rng_below(rng, 200);
    std::vector<WebDataItem> items;
    items.reserve(n_items);
    for (size_t i = 0; i < n_items; ++i)
      items.push_back(testutil::random_item(rng, i));
    for (MatchMode mode : {MatchMode::substring, MatchMode::word_boundary}) {
      PhraseMatcher matcher(lexicon, mode);
      WebLabelResult result = label_by_web(items, matcher, 1);
      PairSet expected;
      for (const WebDataItem &item : items)
        for (const auto &[cat, hit] :
             testutil::naive_match_item(item, lexicon, mode))
          expected.insert({item.item_id, cat});
      if (pair_set(result.dataset) != expected)
        return {false, "diverged from the exhaustive scan on instance " +
                           std::to_string(instance)};
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= kMatcherBudgetSec)
    return {false, "runtime " + fmt_secs(secs) + " exceeds " +
                       fmt_secs(kMatcherBudgetSec)};
  return {true, std::to_string(kInstances) +
                    " instances x 2 modes equal the exhaustive scan in " +
                    fmt_secs(secs)};
}

// ---------------------------------------------------------------------------
// 2. Raising the confidence threshold never grows the dataset and never
//    lowers its full-population accuracy, for both the pure-visual set and
//    the filtered web set; the filtered set clears the unfiltered one by a
//    wide margin at the default cut.
Outcome criterion_threshold_monotonicity() {
  const auto t0 = Clock::now();
  SyntheticCorpus syn = generate_corpus(standard_scenario());
  FileScoreProvider provider;
  for (const ScoreEntry &e : syn.scores)
    provider.add(e.id, e.category_id, e.score);
  const TruthTable &truth = syn.ground_truth.truth;

  PhraseMatcher matcher(syn.lexicon, MatchMode::word_boundary);
  LabeledDataset e_t = label_by_web(syn.items, matcher, 1).dataset;

  std::vector<UnlabeledImageRef> pool;
  pool.reserve(syn.items.size());
  for (const WebDataItem &item : syn.items)
    pool.push_back({item.item_id, item.image_ref});

  const std::vector<double> grid = {0.1, 0.2, 0.3, 0.4, 0.5,
                                    0.6, 0.7, 0.8, 0.9};
  auto filtered_points = sweep(
      [&](double t) {
        return filter_by_confidence(e_t, provider, t);
      },
      grid, &truth);
  auto visual_points = sweep(
      [&](double t) {
        return label_by_dcnn(pool, provider, t, standard_scenario().categories);
      },
      grid, &truth);

  for (const auto *points : {&filtered_points, &visual_points}) {
    const char *which = points == &filtered_points ? "filtered web set"
                                                   : "pure visual set";
    for (size_t i = 0; i < points->size(); ++i) {
      if (!(*points)[i].accuracy)
        return {false, std::string(which) + " lost its accuracy column"};
      if (i == 0)
        continue;
      if ((*points)[i].quantity > (*points)[i - 1].quantity)
        return {false, std::string(which) + " quantity grew at threshold " +
                           std::to_string(grid[i])};
      if (*(*points)[i].accuracy < *(*points)[i - 1].accuracy)
        return {false, std::string(which) + " accuracy fell at threshold " +
                           std::to_string(grid[i])};
    }
  }

  const double acc_et = exact_accuracy(e_t, truth);
  const double acc_filtered = *filtered_points.front().accuracy;
  if (acc_filtered < acc_et + kAccuracyGapPts)
    return {false, "filtered accuracy " + fmt_pct(acc_filtered) +
                       " does not clear unfiltered " + fmt_pct(acc_et) +
                       " by " + fmt_pct(kAccuracyGapPts)};
  const double secs = seconds_since(t0);
  if (secs >= kSweepBudgetSec)
    return {false, "runtime " + fmt_secs(secs) + " exceeds " +
                       fmt_secs(kSweepBudgetSec)};
  return {true, "both sweeps monotone over 9 thresholds; filtered " +
                    fmt_pct(acc_filtered) + " vs unfiltered " +
                    fmt_pct(acc_et) + " in " + fmt_secs(secs)};
}

// ---------------------------------------------------------------------------
// 3. Every pipeline run satisfies the set algebra the construction promises:
//    the filtered sets are subsets of their sources, the final set is the
//    exact union of its two branches, and the noise seed never overlaps the
//    kept set.
Outcome criterion_set_algebra() {
  std::mt19937_64 rng(303);
  for (int k = 0; k < 20; ++k) {
    GeneratorConfig gen;
    gen.categories = 2 + static_cast<int>(rng_below(rng, 7));
    gen.items = 500 + rng_below(rng, 2001);
    gen.noise_rate = 0.2 + 0.7 * rng_real(rng);
    gen.popularity_skew = (k % 3 == 0) ? 1.0 : 0.0;
    gen.seed = 1000 + static_cast<uint64_t>(k);

    TempDir dir("acc_algebra_" + std::to_string(k));
    GeneratedPaths paths = generate_to_dir(gen, dir / "data");
    PipelineConfig config =
        pipeline_config(paths, dir / "out", 40 + static_cast<uint64_t>(k));
    const double alpha = 0.05 + 0.45 * rng_real(rng);
    config.thresholds.alpha = alpha;
    config.thresholds.alpha_prime = alpha * (0.05 + 0.4 * rng_real(rng));
    config.thresholds.beta = alpha / 5.0 * (0.2 + 0.8 * rng_real(rng));
    config.mode =
        (k % 2 == 0) ? MatchMode::word_boundary : MatchMode::substring;
    run_full_pipeline(config);

    auto ds = [&](const char *leaf) {
      return read_dataset_file(config.out_dir + "/" + leaf);
    };
    const PairSet et = pair_set(ds("E_T.jsonl"));
    const PairSet evtweb = pair_set(ds("E_VTweb.jsonl"));
    const PairSet etp = pair_set(ds("E_Tweb_plus.jsonl"));
    const PairSet evtp = pair_set(ds("E_VTweb_plus.jsonl"));
    const PairSet evt = pair_set(ds("E_VT.jsonl"));
    const PairSet noise = pair_set(ds("N_VTweb.jsonl"));

    const std::string tag = " (config " + std::to_string(k) + ")";
    if (!subset_of(evtweb, et))
      return {false, "filtered web set escapes the web-labeled set" + tag};
    if (!subset_of(evtp, etp))
      return {false,
              "filtered classifier set escapes the classifier set" + tag};
    PairSet expected_union = evtweb;
    expected_union.insert(evtp.begin(), evtp.end());
    if (evt != expected_union)
      return {false, "final set is not the union of its branches" + tag};
    for (const auto &p : noise)
      if (evtweb.count(p))
        return {false, "noise seed overlaps the kept set" + tag};
  }
  return {true, "subset, union and disjointness hold on 20 random configs"};
}

// ---------------------------------------------------------------------------
// 4. The classifier's math: analytic gradients match central differences,
//    probabilities are normalized, the zero model is exactly uniform,
//    a separable task trains to high accuracy, and training is
//    bit-reproducible for a fixed seed.
Outcome criterion_classifier_math() {
  std::mt19937_64 rng(404);

  for (int t = 0; t < 100; ++t) {
    const uint32_t B = 4 + static_cast<uint32_t>(rng_below(rng, 8));
    const uint32_t D = 2 + static_cast<uint32_t>(rng_below(rng, 3));
    const uint32_t C = 2 + static_cast<uint32_t>(rng_below(rng, 3));
    const uint32_t d_emb = 2 + static_cast<uint32_t>(rng_below(rng, 3));
    TextClassifier model;
    model.init(B, D, C, d_emb, 500 + static_cast<uint64_t>(t));
    for (double &w : model.W)
      w = rng_real(rng) * 2.0 - 1.0;
    for (double &e : model.E)
      e = rng_real(rng) * 2.0 - 1.0;

    std::vector<LabeledText> batch;
    const size_t n = 1 + rng_below(rng, 4);
    for (size_t i = 0; i < n; ++i) {
      TextFeatures f;
      const size_t n_bigrams = 1 + rng_below(rng, 5);
      for (size_t j = 0; j < n_bigrams; ++j)
        f.bigram_ids.push_back(static_cast<uint32_t>(rng_below(rng, B)));
      f.type_id = static_cast<int>(rng_below(rng, 4));
      f.domain_id = static_cast<uint32_t>(rng_below(rng, D));
      batch.push_back({f, 1 + static_cast<int>(rng_below(rng, C + 1))});
    }

    const std::vector<double> probs = model.forward(batch.front().features);
    double sum = 0.0;
    for (double p : probs)
      sum += p;
    if (std::abs(sum - 1.0) > kProbTol)
      return {false, "forward probabilities sum to " + std::to_string(sum)};

    Gradients grads;
    loss_and_grad(model, batch, &grads);
    auto check_block = [&](std::vector<double> &weights,
                           const std::vector<double> &analytic) {
      for (size_t i = 0; i < weights.size(); ++i) {
        const double saved = weights[i];
        weights[i] = saved + kGradStep;
        const double up = loss_and_grad(model, batch, nullptr);
        weights[i] = saved - kGradStep;
        const double down = loss_and_grad(model, batch, nullptr);
        weights[i] = saved;
        const double numeric = (up - down) / (2.0 * kGradStep);
        const double rel =
            std::abs(analytic[i] - numeric) /
            std::max({std::abs(analytic[i]), std::abs(numeric), kGradStep});
        if (rel >= kGradRelTol)
          return false;
      }
      return true;
    };
    if (!check_block(model.E, grads.dE) || !check_block(model.W, grads.dW))
      return {false,
              "gradient check failed on model " + std::to_string(t)};
  }

  {
    TextClassifier zero;
    zero.init(16, 3, 5, 8, 1);
    std::fill(zero.E.begin(), zero.E.end(), 0.0);
    std::fill(zero.W.begin(), zero.W.end(), 0.0);
    TextFeatures f;
    f.bigram_ids = {3, 7};
    f.type_id = 1;
    f.domain_id = 2;
    const double loss = loss_and_grad(zero, {{f, 2}}, nullptr);
    if (std::abs(loss - std::log(6.0)) > kProbTol)
      return {false, "zero-model loss " + std::to_string(loss) +
                         " is not ln(C+1)"};
  }

  TextSets sets;
  sets.category_count = 5;
  for (int label = 1; label <= 5; ++label)
    for (int i = 0; i < 200; ++i) {
      const std::string s = std::to_string(label);
      sets.plus.push_back({"p" + s + "_" + std::to_string(i), FieldType::alt,
                           "sig" + s + "x sig" + s + "y sig" + s + "z",
                           "d.example", label});
    }
  for (int i = 0; i < 200; ++i)
    sets.minus.push_back({"m" + std::to_string(i), FieldType::alt,
                          "junk0x junk0y junk0z", "n.example", 6});
  TrainConfig tc;
  tc.B = 1u << 16;
  tc.seed = 1;
  TrainResult run1 = train_textclf(sets, tc);
  TrainResult run2 = train_textclf(sets, tc);
  if (run1.model.E != run2.model.E || run1.model.W != run2.model.W ||
      run1.epoch_loss != run2.epoch_loss)
    return {false, "same-seed training is not bit-reproducible"};

  size_t correct = 0, total = 0;
  auto count_records = [&](const std::vector<TextSetRecord> &records) {
    for (const TextSetRecord &r : records) {
      TextRecord rec{r.item_id, r.field_type, r.text, r.domain};
      const std::vector<double> p = run1.model.forward(
          featurize(rec, run1.model.B, run1.model.vocab));
      int best = 1;
      for (size_t c = 2; c <= p.size(); ++c)
        if (p[c - 1] > p[best - 1])
          best = static_cast<int>(c);
      correct += (best == r.label);
      ++total;
    }
  };
  count_records(sets.plus);
  count_records(sets.minus);
  const double train_acc =
      static_cast<double>(correct) / static_cast<double>(total);
  if (train_acc < 0.95)
    return {false, "separable task reached only " + fmt_pct(train_acc) +
                       " in 5 epochs"};

  return {true, "gradients within 1e-4 on 100 models; uniform zero model; "
                "bit-reproducible; separable task at " +
                    fmt_pct(train_acc)};
}

// ---------------------------------------------------------------------------
// 5. The classifier branch pays for itself: its label set is more accurate
//    than raw web matching, and the union grows the filtered set without
//    giving up more than two points of accuracy.
Outcome criterion_joint_labeling_benefit() {
  const auto t0 = Clock::now();
  TempDir dir("acc_benefit");
  GeneratedPaths paths = generate_to_dir(standard_scenario(), dir / "data");
  PipelineConfig config = pipeline_config(paths, dir / "out", 7);
  run_full_pipeline(config);
  const TruthTable truth = read_truth_file(paths.truth).truth;

  LabeledDataset et = read_dataset_file(config.out_dir + "/E_T.jsonl");
  LabeledDataset etp =
      read_dataset_file(config.out_dir + "/E_Tweb_plus.jsonl");
  LabeledDataset evtweb = read_dataset_file(config.out_dir + "/E_VTweb.jsonl");
  LabeledDataset evt = read_dataset_file(config.out_dir + "/E_VT.jsonl");

  const double acc_et = exact_accuracy(et, truth);
  const double acc_etp = exact_accuracy(etp, truth);
  const double acc_evtweb = exact_accuracy(evtweb, truth);
  const double acc_evt = exact_accuracy(evt, truth);

  if (acc_etp <= acc_et)
    return {false, "classifier labels " + fmt_pct(acc_etp) +
                       " do not beat web matching " + fmt_pct(acc_et)};
  if (evt.size() <= evtweb.size())
    return {false, "union size " + std::to_string(evt.size()) +
                       " does not exceed the filtered set " +
                       std::to_string(evtweb.size())};
  if (acc_evt < acc_evtweb - kAccuracyDropPts)
    return {false, "union accuracy " + fmt_pct(acc_evt) + " falls more than " +
                       fmt_pct(kAccuracyDropPts) + " below " +
                       fmt_pct(acc_evtweb)};
  const double secs = seconds_since(t0);
  if (secs >= kPipelineBudgetSec)
    return {false, "runtime " + fmt_secs(secs) + " exceeds " +
                       fmt_secs(kPipelineBudgetSec)};
  return {true, "classifier " + fmt_pct(acc_etp) + " > web " + fmt_pct(acc_et) +
                    "; union " + std::to_string(evt.size()) + " pairs at " +
                    fmt_pct(acc_evt) + " vs filtered " +
                    std::to_string(evtweb.size()) + " at " +
                    fmt_pct(acc_evtweb) + " in " + fmt_secs(secs)};
}

// ---------------------------------------------------------------------------
// 6. The ranking metric: ideal orderings score exactly 1, a hand-computed
//    probe matches to 1e-12 under either log base, and random lists stay
//    inside [0,1].
Outcome criterion_ranking_metric() {
  std::mt19937_64 rng(606);
  const int kGrades[3] = {0, 2, 3};

  for (int t = 0; t < 200; ++t) {
    const size_t len = 1 + rng_below(rng, 40);
    std::vector<int> grades;
    for (size_t i = 0; i < len; ++i)
      grades.push_back(kGrades[rng_below(rng, 3)]);
    grades[rng_below(rng, len)] = 3; // at least one positive
    std::sort(grades.begin(), grades.end(), std::greater<int>());
    const int depth = 1 + static_cast<int>(rng_below(rng, len));
    const double v = ndcg(grades, depth);
    if (std::abs(v - 1.0) > kNdcgTol)
      return {false, "ideal ordering scored " + std::to_string(v)};
  }

  const std::vector<int> probe = {2, 3, 0};
  const auto gain = [](int r) { return std::pow(2.0, r) - 1.0; };
  const auto disc = [](int rank) {
    return std::log(2.0) / std::log(1.0 + rank);
  };
  const double direct = (gain(2) * disc(1) + gain(3) * disc(2)) /
                        (gain(3) * disc(1) + gain(2) * disc(2));
  const double v = ndcg(probe, 3);
  if (std::abs(v - direct) > kNdcgTol)
    return {false, "probe list diverges from the direct evaluation"};
  if (std::abs(v - ndcg_with_base(probe, 3, 2.0)) > kNdcgTol ||
      std::abs(v - ndcg_with_base(probe, 3, std::exp(1.0))) > kNdcgTol)
    return {false, "probe list changes value with the log base"};

  for (int t = 0; t < 1000; ++t) {
    const size_t len = 1 + rng_below(rng, 50);
    std::vector<int> grades;
    for (size_t i = 0; i < len; ++i)
      grades.push_back(kGrades[rng_below(rng, 3)]);
    const int depth = 1 + static_cast<int>(rng_below(rng, len + 10));
    const double r = ndcg(grades, depth);
    if (r < 0.0 || r > 1.0)
      return {false, "random list scored outside [0,1]"};
  }
  return {true, "200 ideal lists at 1.0; probe matches direct evaluation "
                "under both bases; 1000 random lists in [0,1]"};
}

// ---------------------------------------------------------------------------
// 7. Balancing: no category ends above the target cap, categories already at
//    or below it are untouched, and the subsample is seed-deterministic.
Outcome criterion_balancing() {
  std::mt19937_64 rng(707);
  LabeledDataset ds;
  ds.name = "E_VT";
  const size_t counts[5] = {300, 150, 60, 45, 12};
  size_t serial = 0;
  for (int cat = 1; cat <= 5; ++cat)
    for (size_t i = 0; i < counts[cat - 1]; ++i) {
      LabeledImage img;
      char buf[16];
      std::snprintf(buf, sizeof buf, "b%05zu", serial++);
      img.item_id = buf;
      img.image_ref = "http://x.example/" + img.item_id;
      img.category_id = cat;
      img.confidence = rng_real(rng);
      img.provenance = {Provenance::web_filtered};
      ds.items.push_back(std::move(img));
    }
  finalize_dataset(ds);

  const uint64_t kTargetCap = 60;
  LabeledDataset balanced = balance(ds, 150, kTargetCap, 5);
  std::map<int, PairSet> before, after;
  for (const LabeledImage &img : ds.items)
    before[img.category_id].insert({img.item_id, img.category_id});
  for (const LabeledImage &img : balanced.items)
    after[img.category_id].insert({img.item_id, img.category_id});

  for (int cat = 1; cat <= 5; ++cat) {
    if (after[cat].size() > kTargetCap)
      return {false, "category " + std::to_string(cat) + " kept " +
                         std::to_string(after[cat].size()) +
                         " pairs, above the cap"};
    if (!subset_of(after[cat], before[cat]))
      return {false, "category " + std::to_string(cat) +
                         " gained pairs it never had"};
    if (before[cat].size() <= kTargetCap && after[cat] != before[cat])
      return {false, "category " + std::to_string(cat) +
                         " was at or below the cap but changed"};
  }

  LabeledDataset again = balance(ds, 150, kTargetCap, 5);
  if (again.items.size() != balanced.items.size())
    return {false, "same-seed balance changed size"};
  for (size_t i = 0; i < again.items.size(); ++i)
    if (again.items[i].item_id != balanced.items[i].item_id ||
        again.items[i].category_id != balanced.items[i].category_id)
      return {false, "same-seed balance changed contents"};
  return {true, "caps respected, small categories untouched, "
                "same-seed runs identical"};
}

// ---------------------------------------------------------------------------
// 8. Worker count is invisible in the results: one thread and eight threads
//    produce byte-identical stage outputs on the standard scenario.
Outcome criterion_thread_determinism() {
  TempDir dir("acc_threads");
  GeneratedPaths paths = generate_to_dir(standard_scenario(), dir / "data");
  PipelineConfig one = pipeline_config(paths, dir / "out1", 7);
  one.threads = 1;
  PipelineConfig eight = pipeline_config(paths, dir / "out8", 7);
  eight.threads = 8;
  Manifest m1 = run_full_pipeline(one).manifest;
  Manifest m8 = run_full_pipeline(eight).manifest;

  size_t compared = 0;
  for (const StageInfo &stage : m1.stages) {
    const StageInfo *other = m8.find_stage(stage.name);
    if (!other)
      return {false, "stage " + stage.name + " missing from the 8-thread run"};
    if (stage.count != other->count)
      return {false, "stage " + stage.name + " counts differ"};
    if (testutil::slurp(stage.path) != testutil::slurp(other->path))
      return {false, "stage " + stage.name + " outputs differ"};
    ++compared;
  }
  return {true, std::to_string(compared) +
                    " stage outputs byte-identical across 1 and 8 threads"};
}

} // namespace

int main() {
  struct Criterion {
    const char *name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"matcher equals the exhaustive scan", criterion_matcher_oracle},
      {"threshold sweeps are monotone", criterion_threshold_monotonicity},
      {"dataset set algebra holds", criterion_set_algebra},
      {"classifier math checks out", criterion_classifier_math},
      {"classifier branch grows the set safely",
       criterion_joint_labeling_benefit},
      {"ranking metric is exact and bounded", criterion_ranking_metric},
      {"balancing respects the caps", criterion_balancing},
      {"thread count never changes outputs", criterion_thread_determinism},
  };

  int failures = 0;
  int number = 1;
  for (const Criterion &c : criteria) {
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception &e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %d. %s: %s\n", outcome.pass ? "PASS" : "FAIL", number,
                c.name, outcome.detail.c_str());
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
    ++number;
  }
  if (failures > 0)
    std::printf("%d of 8 criteria failed\n", failures);
  else
    std::printf("all 8 criteria passed\n");
  return failures == 0 ? 0 : 1;
}
