#include "doctest.h"

#include <random>

#include "webaug/rng.hpp"
#include "webaug/scores.hpp"
#include "webaug/syncorpus.hpp"

#include "helpers.hpp"

using namespace webaug;

namespace {

// Score table where pair (i, c) scores i/10 for category 1 and is unknown
// for category 2 above item 5.
FileScoreProvider grid_provider() {
  FileScoreProvider p;
  for (int i = 0; i <= 10; ++i) {
    p.add("item" + std::to_string(i), 1, i / 10.0);
    if (i <= 5)
      p.add("item" + std::to_string(i), 2, 1.0 - i / 10.0);
  }
  return p;
}

LabeledDataset dataset_for(int category, int n, const std::string &name) {
  LabeledDataset ds;
  ds.name = name;
  for (int i = 0; i <= n; ++i) {
    LabeledImage img;
    img.item_id = "item" + std::to_string(i);
    img.image_ref = "http://d.example/" + img.item_id;
    img.category_id = category;
    img.provenance = {Provenance::web_match};
    ds.items.push_back(std::move(img));
  }
  finalize_dataset(ds);
  return ds;
}

} // namespace

TEST_SUITE("scores") {

TEST_CASE("threshold config validation") {
  ThresholdConfig ok;
  CHECK_NOTHROW(ok.validate());

  ThresholdConfig bad = ok;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.alpha = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = ok;
  bad.alpha_prime = ok.alpha; // must be strictly below alpha
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = ok;
  bad.beta = ok.alpha / 2.0; // not << alpha
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  ThresholdConfig one{1.0, 0.5, 0.2};
  CHECK_NOTHROW(one.validate());
}

TEST_CASE("alpha 0 admits every scored pair, unknown pairs are counted") {
  FileScoreProvider provider = grid_provider();
  std::vector<UnlabeledImageRef> pool;
  for (int i = 0; i <= 10; ++i)
    pool.push_back({"item" + std::to_string(i), "ref" + std::to_string(i)});

  FilterCounters counters;
  LabeledDataset ev = label_by_dcnn(pool, provider, 0.0, 2, &counters);
  // 11 pairs for category 1, 6 known for category 2
  CHECK(ev.size() == 17);
  CHECK(counters.kept == 17);
  CHECK(counters.dropped_unknown == 5);
  CHECK(counters.dropped_below == 0);
  for (const LabeledImage &img : ev.items) {
    REQUIRE(img.confidence.has_value());
    CHECK(img.provenance == std::vector<Provenance>{Provenance::dcnn});
  }
}

TEST_CASE("alpha 1 keeps only exact-1.0 scores") {
  FileScoreProvider provider = grid_provider();
  std::vector<UnlabeledImageRef> pool;
  for (int i = 0; i <= 10; ++i)
    pool.push_back({"item" + std::to_string(i), ""});
  LabeledDataset ev = label_by_dcnn(pool, provider, 1.0, 2);
  REQUIRE(ev.size() == 2); // item10 under category 1, item0 under category 2
  CHECK(ev.items[0].item_id == "item10");
  CHECK(ev.items[0].category_id == 1);
  CHECK(ev.items[1].item_id == "item0");
  CHECK(ev.items[1].category_id == 2);
}

TEST_CASE("filter at threshold 0 is the identity with confidences attached") {
  FileScoreProvider provider = grid_provider();
  LabeledDataset input = dataset_for(1, 10, "E_T");
  FilterCounters counters;
  LabeledDataset out =
      filter_by_confidence(input, provider, 0.0, Provenance::web_filtered,
                           &counters);
  CHECK(testutil::pair_set(out) == testutil::pair_set(input));
  CHECK(counters.dropped_below == 0);
  for (const LabeledImage &img : out.items)
    CHECK(img.confidence.has_value());
}

TEST_CASE("filter keeps the boundary score and drops just below it") {
  FileScoreProvider provider;
  provider.add("keep", 1, 0.1);
  provider.add("drop", 1, 0.09);
  LabeledDataset input;
  input.name = "E_T";
  for (const char *id : {"keep", "drop"}) {
    LabeledImage img;
    img.item_id = id;
    img.category_id = 1;
    img.provenance = {Provenance::web_match};
    input.items.push_back(std::move(img));
  }
  finalize_dataset(input);

  FilterCounters counters;
  LabeledDataset out = filter_by_confidence(input, provider, 0.1,
                                            Provenance::web_filtered,
                                            &counters);
  REQUIRE(out.size() == 1);
  CHECK(out.items[0].item_id == "keep");
  CHECK(out.items[0].confidence == 0.1);
  CHECK(counters.dropped_below == 1);
}

TEST_CASE("unknown scores are dropped and counted apart from below-threshold") {
  FileScoreProvider provider;
  provider.add("low", 1, 0.2);
  LabeledDataset input;
  input.name = "E_T";
  for (const char *id : {"low", "unknown"}) {
    LabeledImage img;
    img.item_id = id;
    img.category_id = 1;
    img.provenance = {Provenance::web_match};
    input.items.push_back(std::move(img));
  }
  finalize_dataset(input);

  FilterCounters counters;
  LabeledDataset out = filter_by_confidence(input, provider, 0.5,
                                            Provenance::web_filtered,
                                            &counters);
  CHECK(out.size() == 0);
  CHECK(counters.dropped_below == 1);
  CHECK(counters.dropped_unknown == 1);
}

TEST_CASE("filters nest and the filtered set carries the filter provenance") {
  GeneratorConfig cfg;
  cfg.categories = 4;
  cfg.items = 1200;
  cfg.seed = 3;
  SyntheticCorpus corpus = generate_corpus(cfg);
  OracleScoreProvider provider(corpus.ground_truth.truth, cfg.score_sharpness,
                               0.0, derive_seed(cfg.seed, 3));

  PhraseMatcher m(corpus.lexicon, MatchMode::word_boundary);
  LabeledDataset et = label_by_web(corpus.items, m).dataset;

  LabeledDataset loose = filter_by_confidence(et, provider, 0.2);
  LabeledDataset tight = filter_by_confidence(et, provider, 0.6);
  CHECK(testutil::subset_of(testutil::pair_set(tight),
                            testutil::pair_set(loose)));
  CHECK(testutil::subset_of(testutil::pair_set(loose), testutil::pair_set(et)));
  CHECK(loose.name == "E_VTweb");
  for (const LabeledImage &img : loose.items)
    CHECK(img.provenance == std::vector<Provenance>{Provenance::web_filtered});
}

TEST_CASE("filtering at 0.5 raises accuracy over a noisy input") {
  GeneratorConfig cfg;
  cfg.categories = 5;
  cfg.items = 2000;
  cfg.noise_rate = 0.8;
  cfg.seed = 7;
  SyntheticCorpus corpus = generate_corpus(cfg);
  OracleScoreProvider provider(corpus.ground_truth.truth, cfg.score_sharpness,
                               0.0, derive_seed(cfg.seed, 3));
  PhraseMatcher m(corpus.lexicon, MatchMode::word_boundary);
  LabeledDataset et = label_by_web(corpus.items, m).dataset;
  LabeledDataset filtered = filter_by_confidence(et, provider, 0.5);

  auto accuracy = [&](const LabeledDataset &ds) {
    size_t right = 0;
    for (const LabeledImage &img : ds.items)
      right += corpus.ground_truth.truth.lookup(img.item_id) == img.category_id
                   ? 1
                   : 0;
    return static_cast<double>(right) / static_cast<double>(ds.size());
  };
  CHECK(filtered.size() > 0);
  CHECK(accuracy(filtered) > accuracy(et));
}

TEST_CASE("beta 0 collects nothing") {
  FileScoreProvider provider = grid_provider();
  LabeledDataset input = dataset_for(1, 10, "E_T");
  LabeledDataset noise = collect_noise(input, provider, 0.0);
  CHECK(noise.size() == 0);
  CHECK(noise.name == "N_VTweb");
}

TEST_CASE("every pair lands in exactly one of filter, noise, middle, unknown") {
  GeneratorConfig cfg;
  cfg.categories = 4;
  cfg.items = 1000;
  cfg.seed = 11;
  SyntheticCorpus corpus = generate_corpus(cfg);
  OracleScoreProvider provider(corpus.ground_truth.truth, cfg.score_sharpness,
                               0.0, derive_seed(cfg.seed, 3));
  PhraseMatcher m(corpus.lexicon, MatchMode::word_boundary);
  LabeledDataset et = label_by_web(corpus.items, m).dataset;

  const double alpha = 0.3, beta = 0.05;
  auto kept = testutil::pair_set(filter_by_confidence(et, provider, alpha));
  auto noise = testutil::pair_set(collect_noise(et, provider, beta));

  size_t middle = 0;
  for (const LabeledImage &img : et.items) {
    auto s = provider.score(img.item_id, img.image_ref, img.category_id);
    REQUIRE(s.has_value()); // oracle knows every item
    const std::pair<std::string, int> key{img.item_id, img.category_id};
    const bool in_kept = kept.count(key) > 0;
    const bool in_noise = noise.count(key) > 0;
    CHECK(!(in_kept && in_noise));
    if (!in_kept && !in_noise) {
      CHECK(*s >= beta);
      CHECK(*s < alpha);
      ++middle;
    }
  }
  CHECK(kept.size() + noise.size() + middle == et.size());
}

TEST_CASE("noise precision beats the base noise rate") {
  GeneratorConfig cfg;
  cfg.categories = 5;
  cfg.items = 2000;
  cfg.noise_rate = 0.6;
  cfg.seed = 19;
  SyntheticCorpus corpus = generate_corpus(cfg);
  OracleScoreProvider provider(corpus.ground_truth.truth, cfg.score_sharpness,
                               0.0, derive_seed(cfg.seed, 3));
  PhraseMatcher m(corpus.lexicon, MatchMode::word_boundary);
  LabeledDataset et = label_by_web(corpus.items, m).dataset;
  LabeledDataset noise = collect_noise(et, provider, 0.05);

  size_t truly_noisy = 0;
  for (const LabeledImage &img : noise.items)
    truly_noisy += corpus.ground_truth.truth.lookup(img.item_id) !=
                           img.category_id
                       ? 1
                       : 0;
  REQUIRE(noise.size() > 0);
  const double precision =
      static_cast<double>(truly_noisy) / static_cast<double>(noise.size());
  CHECK(precision > cfg.noise_rate);
}

TEST_CASE("the pool path and the filter path agree on every pair") {
  GeneratorConfig cfg;
  cfg.categories = 3;
  cfg.items = 600;
  cfg.seed = 23;
  SyntheticCorpus corpus = generate_corpus(cfg);
  OracleScoreProvider provider(corpus.ground_truth.truth, cfg.score_sharpness,
                               0.0, derive_seed(cfg.seed, 3));

  std::vector<UnlabeledImageRef> pool;
  LabeledDataset all_pairs;
  all_pairs.name = "all";
  for (const WebDataItem &item : corpus.items) {
    pool.push_back({item.item_id, item.image_ref});
    for (int c = 1; c <= cfg.categories; ++c) {
      LabeledImage img;
      img.item_id = item.item_id;
      img.image_ref = item.image_ref;
      img.category_id = c;
      img.provenance = {Provenance::web_match};
      all_pairs.items.push_back(std::move(img));
    }
  }
  finalize_dataset(all_pairs);

  const double alpha = 0.4;
  LabeledDataset ev = label_by_dcnn(pool, provider, alpha, cfg.categories);
  LabeledDataset filtered = filter_by_confidence(all_pairs, provider, alpha);
  CHECK(testutil::pair_set(ev) == testutil::pair_set(filtered));
}

TEST_CASE("provider results do not depend on query order") {
  TruthTable truth;
  truth.labels["a"] = 1;
  truth.labels["b"] = 2;
  truth.labels["c"] = 0;
  OracleScoreProvider provider(truth, 2.0, 0.1, 99);

  std::vector<std::pair<std::string, int>> queries;
  for (const char *id : {"a", "b", "c"})
    for (int c = 1; c <= 2; ++c)
      queries.push_back({id, c});

  std::vector<double> forward, backward;
  for (const auto &[id, c] : queries)
    forward.push_back(*provider.score(id, "", c));
  for (auto it = queries.rbegin(); it != queries.rend(); ++it)
    backward.push_back(*provider.score(it->first, "", it->second));
  std::reverse(backward.begin(), backward.end());
  CHECK(forward == backward);
  for (double s : forward) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
  CHECK(!provider.score("unknown-item", "", 1).has_value());
}

TEST_CASE("score files round-trip and reject malformed rows") {
  testutil::TempDir dir("score_files");
  std::vector<ScoreEntry> entries = {
      {"a", 1, 0.25}, {"a", 2, 1.0}, {"b", 1, 0.0}};
  const std::string path = dir / "scores.jsonl";
  write_score_file(path, entries);
  FileScoreProvider provider = FileScoreProvider::from_file(path);
  CHECK(provider.size() == 3);
  CHECK(*provider.score("a", "", 1) == 0.25);
  CHECK(*provider.score("a", "", 2) == 1.0);
  CHECK(*provider.score("b", "", 1) == 0.0);
  CHECK(!provider.score("b", "", 2).has_value());

  std::ofstream bad(dir / "bad.jsonl");
  bad << R"({"id":"a","category_id":1,"score":1.5})" << "\n";
  bad.close();
  CHECK_THROWS_AS(FileScoreProvider::from_file(dir / "bad.jsonl"),
                  std::runtime_error);
}

TEST_CASE("file provider falls back to the image ref key") {
  FileScoreProvider provider;
  provider.add("http://d.example/a.jpg", 1, 0.5);
  CHECK(*provider.score("item-a", "http://d.example/a.jpg", 1) == 0.5);
  CHECK(!provider.score("item-a", "http://d.example/other.jpg", 1)
             .has_value());
}

TEST_CASE("pair scores stay in range and separate the two regimes") {
  std::mt19937_64 rng(5);
  double true_sum = 0.0, noise_sum = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const double t = draw_pair_score(true, 2.0, rng());
    const double f = draw_pair_score(false, 2.0, rng());
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    true_sum += t;
    noise_sum += f;
  }
  CHECK(true_sum / n > 0.6);
  CHECK(noise_sum / n < 0.1);
}

} // TEST_SUITE
