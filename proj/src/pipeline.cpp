#include "webaug/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "webaug/jsonl.hpp"
#include "webaug/lexicon.hpp"
#include "webaug/rng.hpp"

namespace webaug {

void PipelineConfig::validate() const {
  if (corpus_path.empty() || lexicon_path.empty() || scores_path.empty())
    throw std::invalid_argument("corpus, lexicon and scores paths are required");
  if (out_dir.empty())
    throw std::invalid_argument("out_dir is required");
  thresholds.validate();
  train.validate();
  if (!(predict_threshold > 0.0 && predict_threshold <= 1.0))
    throw std::invalid_argument("predict_threshold must be in (0,1]");
  if (target_cap < 1 || hard_cap < target_cap)
    throw std::invalid_argument("caps must satisfy hard_cap >= target_cap >= 1");
  if (threads < 1)
    throw std::invalid_argument("threads must be at least 1");
}

namespace {

void apply_key(PipelineConfig &c, const std::string &key, const json &v) {
  if (key == "corpus")
    c.corpus_path = v.get<std::string>();
  else if (key == "lexicon")
    c.lexicon_path = v.get<std::string>();
  else if (key == "scores")
    c.scores_path = v.get<std::string>();
  else if (key == "out_dir")
    c.out_dir = v.get<std::string>();
  else if (key == "alpha")
    c.thresholds.alpha = v.get<double>();
  else if (key == "alpha_prime")
    c.thresholds.alpha_prime = v.get<double>();
  else if (key == "beta")
    c.thresholds.beta = v.get<double>();
  else if (key == "mode") {
    auto mode = match_mode_from_string(v.get<std::string>());
    if (!mode)
      throw std::invalid_argument("unknown matcher mode: " +
                                  v.get<std::string>());
    c.mode = *mode;
  } else if (key == "lr0")
    c.train.lr0 = v.get<double>();
  else if (key == "epochs")
    c.train.epochs = v.get<int>();
  else if (key == "train_seed")
    c.train.seed = v.get<uint64_t>();
  else if (key == "d_emb")
    c.train.d_emb = v.get<uint32_t>();
  else if (key == "bigram_buckets")
    c.train.B = v.get<uint32_t>();
  else if (key == "minus_ratio")
    c.train.minus_ratio = v.get<double>();
  else if (key == "predict_threshold")
    c.predict_threshold = v.get<double>();
  else if (key == "hard_cap")
    c.hard_cap = v.get<uint64_t>();
  else if (key == "target_cap")
    c.target_cap = v.get<uint64_t>();
  else if (key == "balance_output")
    c.balance_output = v.get<bool>();
  else if (key == "textclf_enabled")
    c.textclf_enabled = v.get<bool>();
  else if (key == "seed")
    c.seed = v.get<uint64_t>();
  else if (key == "threads")
    c.threads = v.get<int>();
  else
    throw std::invalid_argument("unknown config key: " + key);
}

} // namespace

PipelineConfig PipelineConfig::from_json_text(const std::string &text) {
  json obj = json::parse(text);
  if (!obj.is_object())
    throw std::invalid_argument("pipeline config must be a JSON object");
  PipelineConfig c;
  bool train_seed_set = false;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    apply_key(c, it.key(), it.value());
    if (it.key() == "train_seed")
      train_seed_set = true;
  }
  if (!train_seed_set)
    c.train.seed = c.seed;
  return c;
}

PipelineConfig PipelineConfig::from_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string PipelineConfig::to_json_text() const {
  json obj;
  obj["corpus"] = corpus_path;
  obj["lexicon"] = lexicon_path;
  obj["scores"] = scores_path;
  obj["out_dir"] = out_dir;
  obj["alpha"] = thresholds.alpha;
  obj["alpha_prime"] = thresholds.alpha_prime;
  obj["beta"] = thresholds.beta;
  obj["mode"] = to_string(mode);
  obj["lr0"] = train.lr0;
  obj["epochs"] = train.epochs;
  obj["train_seed"] = train.seed;
  obj["d_emb"] = train.d_emb;
  obj["bigram_buckets"] = train.B;
  obj["minus_ratio"] = train.minus_ratio;
  obj["predict_threshold"] = predict_threshold;
  obj["hard_cap"] = hard_cap;
  obj["target_cap"] = target_cap;
  obj["balance_output"] = balance_output;
  obj["textclf_enabled"] = textclf_enabled;
  obj["seed"] = seed;
  obj["threads"] = threads;
  return obj.dump(2) + "\n";
}

std::string PipelineConfig::config_hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json_text())));
  return buf;
}

LabeledDataset union_datasets(const LabeledDataset &a, const LabeledDataset &b,
                              const std::string &name) {
  auto key_less = [](const LabeledImage &x, const LabeledImage &y) {
    return x.category_id != y.category_id ? x.category_id < y.category_id
                                          : x.item_id < y.item_id;
  };
  LabeledDataset out;
  out.name = name;
  out.items.reserve(a.items.size() + b.items.size());
  size_t i = 0, j = 0;
  while (i < a.items.size() || j < b.items.size()) {
    if (j == b.items.size() ||
        (i < a.items.size() && key_less(a.items[i], b.items[j]))) {
      out.items.push_back(a.items[i++]);
    } else if (i == a.items.size() || key_less(b.items[j], a.items[i])) {
      out.items.push_back(b.items[j++]);
    } else {
      // Same pair on both sides: higher confidence wins, provenances merge.
      const LabeledImage &x = a.items[i++];
      const LabeledImage &y = b.items[j++];
      const double cx = x.confidence.value_or(-1.0);
      const double cy = y.confidence.value_or(-1.0);
      LabeledImage merged = cy > cx ? y : x;
      const LabeledImage &loser = cy > cx ? x : y;
      for (Provenance p : loser.provenance)
        if (std::find(merged.provenance.begin(), merged.provenance.end(), p) ==
            merged.provenance.end())
          merged.provenance.push_back(p);
      out.items.push_back(std::move(merged));
    }
  }
  finalize_dataset(out);
  return out;
}

namespace {

// One balancing pass: every category above cap is subsampled to exactly cap
// with a per-category stream, so thread count and category order are
// irrelevant.
LabeledDataset cap_categories(const LabeledDataset &in, uint64_t cap,
                              uint64_t pass_seed) {
  LabeledDataset out;
  out.name = in.name;
  size_t i = 0;
  while (i < in.items.size()) {
    size_t j = i;
    const int cat = in.items[i].category_id;
    while (j < in.items.size() && in.items[j].category_id == cat)
      ++j;
    const uint64_t count = j - i;
    if (count <= cap) {
      for (size_t k = i; k < j; ++k)
        out.items.push_back(in.items[k]);
    } else {
      std::vector<size_t> idx(count);
      for (size_t k = 0; k < count; ++k)
        idx[k] = i + k;
      std::mt19937_64 rng(derive_seed(pass_seed, static_cast<uint64_t>(cat)));
      rng_shuffle(rng, idx);
      idx.resize(cap);
      std::sort(idx.begin(), idx.end());
      for (size_t k : idx)
        out.items.push_back(in.items[k]);
    }
    i = j;
  }
  finalize_dataset(out);
  return out;
}

} // namespace

LabeledDataset balance(const LabeledDataset &dataset, uint64_t hard_cap,
                       uint64_t target_cap, uint64_t seed) {
  if (target_cap < 1 || hard_cap < target_cap)
    throw std::invalid_argument("caps must satisfy hard_cap >= target_cap >= 1");
  LabeledDataset first = cap_categories(dataset, hard_cap, derive_seed(seed, 1));
  return cap_categories(first, target_cap, derive_seed(seed, 2));
}

DatasetStats compute_stats(const LabeledDataset &dataset,
                           const CorpusIndex *corpus,
                           const PhraseMatcher *matcher,
                           const ScoreProvider *provider) {
  DatasetStats stats;
  stats.total = dataset.size();
  for (const LabeledImage &img : dataset.items) {
    ++stats.per_category[img.category_id];

    if (corpus && matcher) {
      const WebDataItem *item = corpus->find(img.item_id);
      if (!item) {
        ++stats.unattributed;
      } else {
        for (const MatchHit &hit : matcher->match_item(*item)) {
          if (hit.category_id != img.category_id)
            continue;
          for (FieldType f : hit.fields_hit)
            ++stats.field_credits[static_cast<size_t>(f)];
        }
      }
    }

    std::optional<double> s;
    if (provider)
      s = provider->score(img.item_id, img.image_ref, img.category_id);
    else
      s = img.confidence;
    if (s) {
      ++stats.scored;
      int bin = static_cast<int>(*s * 20.0);
      bin = std::clamp(bin, 0, 19);
      ++stats.confidence_hist[static_cast<size_t>(bin)];
    }
  }
  uint64_t credit_sum = 0;
  for (uint64_t c : stats.field_credits)
    credit_sum += c;
  if (credit_sum > 0)
    for (size_t f = 0; f < 4; ++f)
      stats.field_proportions[f] =
          static_cast<double>(stats.field_credits[f]) /
          static_cast<double>(credit_sum);
  return stats;
}

void write_stats_file(const DatasetStats &stats, const std::string &path) {
  json obj;
  json per_cat = json::object();
  for (const auto &[cat, n] : stats.per_category)
    per_cat[std::to_string(cat)] = n;
  obj["per_category"] = per_cat;
  obj["field_credits"] = stats.field_credits;
  obj["field_proportions"] = stats.field_proportions;
  obj["confidence_hist"] = stats.confidence_hist;
  obj["scored"] = stats.scored;
  obj["total"] = stats.total;
  obj["unattributed"] = stats.unattributed;
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write stats file: " + path);
  out << obj.dump(2) << "\n";
  if (!out)
    throw std::runtime_error("failed writing stats file: " + path);
}

AccuracyReport estimate_accuracy(const LabeledDataset &dataset,
                                 const TruthTable &truth,
                                 int sample_per_category, uint64_t seed) {
  if (sample_per_category < 1)
    throw std::invalid_argument("sample_per_category must be at least 1");
  AccuracyReport report;
  report.total_n = dataset.size();
  if (dataset.items.empty())
    return report;
  report.defined = true;

  uint64_t sampled_correct = 0;
  bool full_coverage = true;
  uint64_t exact_correct = 0;
  size_t i = 0;
  while (i < dataset.items.size()) {
    size_t j = i;
    const int cat = dataset.items[i].category_id;
    while (j < dataset.items.size() && dataset.items[j].category_id == cat)
      ++j;
    const size_t count = j - i;
    std::vector<size_t> idx(count);
    for (size_t k = 0; k < count; ++k)
      idx[k] = i + k;
    if (count > static_cast<size_t>(sample_per_category)) {
      std::mt19937_64 rng(derive_seed(seed, static_cast<uint64_t>(cat)));
      rng_shuffle(rng, idx);
      idx.resize(static_cast<size_t>(sample_per_category));
    }
    for (size_t k : idx)
      if (truth.lookup(dataset.items[k].item_id) == cat)
        ++sampled_correct;
    report.sampled_n += idx.size();
    for (size_t k = i; k < j; ++k) {
      if (!truth.covers(dataset.items[k].item_id))
        full_coverage = false;
      else if (truth.lookup(dataset.items[k].item_id) == cat)
        ++exact_correct;
    }
    i = j;
  }
  report.sampled = static_cast<double>(sampled_correct) /
                   static_cast<double>(report.sampled_n);
  if (full_coverage)
    report.exact = static_cast<double>(exact_correct) /
                   static_cast<double>(report.total_n);
  return report;
}

const StageInfo *Manifest::find_stage(const std::string &name) const {
  for (const StageInfo &s : stages)
    if (s.name == name)
      return &s;
  return nullptr;
}

bool Manifest::equivalent(const Manifest &other) const {
  if (config_hash != other.config_hash || seed != other.seed ||
      failed != other.failed || failed_stage != other.failed_stage ||
      error != other.error || stages.size() != other.stages.size())
    return false;
  for (size_t i = 0; i < stages.size(); ++i) {
    const StageInfo &a = stages[i];
    const StageInfo &b = other.stages[i];
    if (a.name != b.name || a.count != b.count || a.path != b.path)
      return false;
  }
  return true;
}

void write_manifest(const Manifest &m, const std::string &path) {
  json obj;
  obj["config_hash"] = m.config_hash;
  obj["seed"] = m.seed;
  obj["failed"] = m.failed;
  obj["failed_stage"] = m.failed_stage;
  obj["error"] = m.error;
  json stages = json::array();
  for (const StageInfo &s : m.stages)
    stages.push_back({{"name", s.name},
                      {"count", s.count},
                      {"path", s.path},
                      {"wall_ms", s.wall_ms}});
  obj["stages"] = stages;
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write manifest: " + path);
  out << obj.dump(2) << "\n";
  if (!out)
    throw std::runtime_error("failed writing manifest: " + path);
}

Manifest read_manifest(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open manifest: " + path);
  json obj = json::parse(in);
  Manifest m;
  m.config_hash = obj.at("config_hash").get<std::string>();
  m.seed = obj.at("seed").get<uint64_t>();
  m.failed = obj.at("failed").get<bool>();
  m.failed_stage = obj.at("failed_stage").get<std::string>();
  m.error = obj.at("error").get<std::string>();
  for (const json &s : obj.at("stages")) {
    StageInfo info;
    info.name = s.at("name").get<std::string>();
    info.count = s.at("count").get<uint64_t>();
    info.path = s.at("path").get<std::string>();
    info.wall_ms = s.at("wall_ms").get<double>();
    m.stages.push_back(std::move(info));
  }
  return m;
}

PipelineResult run_full_pipeline(const PipelineConfig &config) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  const std::string manifest_path = config.out_dir + "/manifest.json";

  Manifest manifest;
  manifest.config_hash = config.config_hash();
  manifest.seed = config.seed;

  auto run_stage = [&](const std::string &name, const std::string &path,
                       auto &&fn) -> uint64_t {
    const auto t0 = std::chrono::steady_clock::now();
    uint64_t count = 0;
    try {
      count = fn();
    } catch (const std::exception &e) {
      manifest.failed = true;
      manifest.failed_stage = name;
      manifest.error = e.what();
      write_manifest(manifest, manifest_path);
      throw PipelineError(name, e.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    StageInfo info;
    info.name = name;
    info.count = count;
    info.path = path;
    info.wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    manifest.stages.push_back(std::move(info));
    return count;
  };

  auto stage_file = [&](const char *base) {
    return config.out_dir + "/" + base;
  };

  CorpusIndex corpus;
  Lexicon lexicon;
  FileScoreProvider provider;
  run_stage("load", config.corpus_path, [&]() {
    corpus = CorpusIndex::from_file(config.corpus_path);
    lexicon = load_lexicon(config.lexicon_path);
    provider = FileScoreProvider::from_file(config.scores_path);
    return corpus.size();
  });

  std::optional<PhraseMatcher> matcher;
  auto persist = [&](const LabeledDataset &ds, const std::string &path,
                     const char *stats_base) {
    write_dataset_file(ds, path);
    write_stats_file(
        compute_stats(ds, &corpus, matcher ? &*matcher : nullptr, &provider),
        stage_file(stats_base));
  };

  const int C = lexicon.category_count();

  LabeledDataset e_t;
  run_stage("label_web", stage_file("E_T.jsonl"), [&]() {
    matcher.emplace(lexicon, config.mode);
    WebLabelResult result =
        label_by_web(corpus.items(), *matcher, config.threads);
    e_t = std::move(result.dataset);
    persist(e_t, stage_file("E_T.jsonl"), "stats_E_T.json");
    return e_t.size();
  });

  LabeledDataset e_vtweb;
  run_stage("filter_web", stage_file("E_VTweb.jsonl"), [&]() {
    e_vtweb = filter_by_confidence(e_t, provider, config.thresholds.alpha,
                                   Provenance::web_filtered, nullptr,
                                   config.threads);
    persist(e_vtweb, stage_file("E_VTweb.jsonl"), "stats_E_VTweb.json");
    return e_vtweb.size();
  });

  LabeledDataset n_vtweb;
  run_stage("collect_noise", stage_file("N_VTweb.jsonl"), [&]() {
    n_vtweb = collect_noise(e_t, provider, config.thresholds.beta, nullptr,
                            config.threads);
    persist(n_vtweb, stage_file("N_VTweb.jsonl"), "stats_N_VTweb.json");
    return n_vtweb.size();
  });

  LabeledDataset e_tweb_plus;
  e_tweb_plus.name = "E_Tweb_plus";
  LabeledDataset e_vtweb_plus;
  e_vtweb_plus.name = "E_VTweb_plus";

  if (config.textclf_enabled) {
    TextSets sets;
    run_stage("build_textsets", stage_file("T_plus.jsonl"), [&]() {
      sets = build_textsets(e_vtweb, n_vtweb, corpus, C);
      write_textset_file(stage_file("T_plus.jsonl"), sets.plus);
      write_textset_file(stage_file("T_minus.jsonl"), sets.minus);
      return sets.plus.size() + sets.minus.size();
    });

    // An empty side means there is nothing to train on; the classifier
    // branch degenerates to empty outputs instead of aborting the run.
    if (!sets.plus.empty() && !sets.minus.empty()) {
      TextClassifier model;
      run_stage("train_textclf", stage_file("model.bin"), [&]() {
        TrainResult trained = train_textclf(sets, config.train);
        model = std::move(trained.model);
        save_model(model, stage_file("model.bin"));
        return static_cast<uint64_t>(1);
      });
      run_stage("predict_textclf", stage_file("E_Tweb_plus.jsonl"), [&]() {
        e_tweb_plus = predict_label_set(corpus.items(), model,
                                        config.predict_threshold,
                                        config.threads);
        persist(e_tweb_plus, stage_file("E_Tweb_plus.jsonl"),
                "stats_E_Tweb_plus.json");
        return e_tweb_plus.size();
      });
      run_stage("filter_textclf", stage_file("E_VTweb_plus.jsonl"), [&]() {
        e_vtweb_plus = filter_by_confidence(
            e_tweb_plus, provider, config.thresholds.alpha_prime,
            Provenance::textclf_filtered, nullptr, config.threads);
        persist(e_vtweb_plus, stage_file("E_VTweb_plus.jsonl"),
                "stats_E_VTweb_plus.json");
        return e_vtweb_plus.size();
      });
    } else {
      run_stage("predict_textclf", stage_file("E_Tweb_plus.jsonl"), [&]() {
        persist(e_tweb_plus, stage_file("E_Tweb_plus.jsonl"),
                "stats_E_Tweb_plus.json");
        return e_tweb_plus.size();
      });
      run_stage("filter_textclf", stage_file("E_VTweb_plus.jsonl"), [&]() {
        persist(e_vtweb_plus, stage_file("E_VTweb_plus.jsonl"),
                "stats_E_VTweb_plus.json");
        return e_vtweb_plus.size();
      });
    }
  }

  LabeledDataset e_vt;
  run_stage("assemble", stage_file("E_VT.jsonl"), [&]() {
    e_vt = union_datasets(e_vtweb, e_vtweb_plus, "E_VT");
    persist(e_vt, stage_file("E_VT.jsonl"), "stats_E_VT.json");
    return e_vt.size();
  });

  if (config.balance_output) {
    run_stage("balance", stage_file("E_VT_balanced.jsonl"), [&]() {
      LabeledDataset balanced = balance(e_vt, config.hard_cap,
                                        config.target_cap,
                                        derive_seed(config.seed, 9));
      persist(balanced, stage_file("E_VT_balanced.jsonl"),
              "stats_E_VT_balanced.json");
      return balanced.size();
    });
  }

  write_manifest(manifest, manifest_path);
  PipelineResult result;
  result.manifest = std::move(manifest);
  result.manifest_path = manifest_path;
  return result;
}

} // namespace webaug
