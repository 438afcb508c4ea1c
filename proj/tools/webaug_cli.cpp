// Command-line front end: every pipeline stage runnable standalone from
// persisted files, plus `run` for the whole flow. Exit codes: 0 ok, 1 usage,
// 2 stage failure (stage named on stderr).

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "webaug/evalkit.hpp"
#include "webaug/jsonl.hpp"
#include "webaug/pipeline.hpp"
#include "webaug/syncorpus.hpp"

using namespace webaug;

namespace {

const CLI::Validator InUnitRange = CLI::Validator(
    [](std::string &input) -> std::string {
      double v = 0.0;
      try {
        v = std::stod(input);
      } catch (...) {
        return "value '" + input + "' is not a number";
      }
      if (v < 0.0 || v > 1.0)
        return "value " + input + " must be in [0,1]";
      return {};
    },
    "FLOAT in [0,1]");

std::vector<double> parse_grid(const std::string &csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty())
      continue;
    grid.push_back(std::stod(tok));
  }
  if (grid.empty())
    throw std::runtime_error("empty threshold grid");
  return grid;
}

TruthTable load_truth_table(const std::string &path) {
  return read_truth_file(path).truth;
}

void print_dataset_summary(const LabeledDataset &ds, const std::string &path) {
  std::cout << ds.name << ": " << ds.size() << " pairs -> " << path << "\n";
}

json accuracy_json(const AccuracyReport &r) {
  json obj;
  obj["defined"] = r.defined;
  obj["total_n"] = r.total_n;
  obj["sampled_n"] = r.sampled_n;
  if (r.defined) {
    obj["sampled"] = r.sampled;
    if (r.exact)
      obj["exact"] = *r.exact;
  }
  return obj;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"webaug: augment a labeled image dataset from web-crawl "
               "metadata by string matching, confidence filtering and text "
               "classification"};
  app.require_subcommand(1);
  std::function<void()> action;

  // gen ----------------------------------------------------------------
  {
    auto *cmd = app.add_subcommand(
        "gen", "Generate a synthetic corpus with planted ground truth");
    auto cfg = std::make_shared<GeneratorConfig>();
    auto out_dir = std::make_shared<std::string>();
    cmd->add_option("--out-dir", *out_dir, "Output directory")->required();
    cmd->add_option("--categories", cfg->categories, "Category count");
    cmd->add_option("--items", cfg->items, "Total item count");
    cmd->add_option("--noise-rate", cfg->noise_rate,
                    "Fraction of planted matches that are wrong")
        ->check(InUnitRange);
    cmd->add_option("--field-mix", cfg->field_mix,
                    "Anchor/alt/title/surrounding planting proportions")
        ->expected(4);
    cmd->add_option("--popularity-skew", cfg->popularity_skew,
                    "Power-law exponent for category sizes");
    cmd->add_option("--score-sharpness", cfg->score_sharpness,
                    "Separation of true/noise score regimes");
    cmd->add_option("--seed", cfg->seed, "Generator seed")->required();
    cmd->callback([cfg, out_dir, &action] {
      action = [cfg, out_dir] {
        GeneratedPaths paths = generate_to_dir(*cfg, *out_dir);
        std::cout << "corpus: " << paths.corpus << "\n"
                  << "lexicon: " << paths.lexicon << "\n"
                  << "scores: " << paths.scores << "\n"
                  << "truth: " << paths.truth << "\n";
      };
    });
  }

  // label-web ----------------------------------------------------------
  {
    auto *cmd = app.add_subcommand(
        "label-web", "Label a corpus by lexicon string matching (E_T)");
    auto corpus = std::make_shared<std::string>();
    auto lexicon = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto stats_out = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("word-boundary");
    auto threads = std::make_shared<int>(1);
    cmd->add_option("--corpus", *corpus, "Corpus file")->required();
    cmd->add_option("--lexicon", *lexicon, "Lexicon file")->required();
    cmd->add_option("--out", *out, "Output dataset file")->required();
    cmd->add_option("--stats", *stats_out, "Match statistics JSON output");
    cmd->add_option("--mode", *mode, "Match mode")
        ->check(CLI::IsMember({"substring", "word-boundary"}));
    cmd->add_option("--threads", *threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    cmd->callback([=, &action] {
      action = [=] {
        PhraseMatcher matcher(load_lexicon(*lexicon),
                              *match_mode_from_string(*mode));
        CorpusFileReader reader(*corpus);
        WebLabelResult result = label_by_web(reader, matcher, *threads);
        write_dataset_file(result.dataset, *out);
        for (const auto &msg : reader.skip_messages())
          std::cerr << "skipped " << msg << "\n";
        if (!stats_out->empty()) {
          json obj;
          obj["items_processed"] = result.items_processed;
          obj["items_matched"] = result.items_matched;
          obj["field_pair_credits"] = result.field_pair_credits;
          std::ofstream f(*stats_out, std::ios::trunc);
          f << obj.dump(2) << "\n";
          if (!f)
            throw std::runtime_error("cannot write " + *stats_out);
        }
        print_dataset_summary(result.dataset, *out);
      };
    });
  }

  // label-dcnn ---------------------------------------------------------
  {
    auto *cmd = app.add_subcommand(
        "label-dcnn", "Label an unlabeled pool by visual confidence (E_V)");
    auto unlabeled = std::make_shared<std::string>();
    auto scores = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto alpha = std::make_shared<double>(0.1);
    auto categories = std::make_shared<int>(0);
    auto threads = std::make_shared<int>(1);
    cmd->add_option("--unlabeled", *unlabeled, "Unlabeled image list")
        ->required();
    cmd->add_option("--scores", *scores, "Score file")->required();
    cmd->add_option("--out", *out, "Output dataset file")->required();
    cmd->add_option("--alpha", *alpha, "Confidence threshold")
        ->check(InUnitRange);
    cmd->add_option("--categories", *categories, "Category count")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threads", *threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    cmd->callback([=, &action] {
      action = [=] {
        auto provider = FileScoreProvider::from_file(*scores);
        FilterCounters counters;
        LabeledDataset ds =
            label_by_dcnn(read_unlabeled_file(*unlabeled), provider, *alpha,
                          *categories, &counters, *threads);
        write_dataset_file(ds, *out);
        std::cout << "kept " << counters.kept << ", below threshold "
                  << counters.dropped_below << ", unknown "
                  << counters.dropped_unknown << "\n";
        print_dataset_summary(ds, *out);
      };
    });
  }

  // filter ---------------------------------------------------------------
  {
    auto *cmd = app.add_subcommand(
        "filter", "Keep dataset pairs with confidence >= threshold");
    auto in = std::make_shared<std::string>();
    auto scores = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto alpha = std::make_shared<double>(0.1);
    auto stamp = std::make_shared<std::string>("web-filtered");
    auto threads = std::make_shared<int>(1);
    cmd->add_option("--in", *in, "Input dataset")->required();
    cmd->add_option("--scores", *scores, "Score file")->required();
    cmd->add_option("--out", *out, "Output dataset file")->required();
    cmd->add_option("--alpha", *alpha, "Confidence threshold")
        ->check(InUnitRange);
    cmd->add_option("--stamp", *stamp, "Provenance stamp for survivors")
        ->check(CLI::IsMember({"web-filtered", "textclf-filtered"}));
    cmd->add_option("--threads", *threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    cmd->callback([=, &action] {
      action = [=] {
        auto provider = FileScoreProvider::from_file(*scores);
        FilterCounters counters;
        LabeledDataset ds = filter_by_confidence(
            read_dataset_file(*in), provider, *alpha,
            *stamp == "textclf-filtered" ? Provenance::textclf_filtered
                                         : Provenance::web_filtered,
            &counters, *threads);
        write_dataset_file(ds, *out);
        std::cout << "kept " << counters.kept << ", below threshold "
                  << counters.dropped_below << ", unknown "
                  << counters.dropped_unknown << "\n";
        print_dataset_summary(ds, *out);
      };
    });
  }

  // collect-noise ----------------------------------------------------------
  {
    auto *cmd = app.add_subcommand(
        "collect-noise", "Collect pairs with confidence < beta (N_VTweb)");
    auto in = std::make_shared<std::string>();
    auto scores = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto beta = std::make_shared<double>(0.01);
    auto threads = std::make_shared<int>(1);
    cmd->add_option("--in", *in, "Input dataset (E_T)")->required();
    cmd->add_option("--scores", *scores, "Score file")->required();
    cmd->add_option("--out", *out, "Output dataset file")->required();
    cmd->add_option("--beta", *beta, "Noise threshold")->check(InUnitRange);
    cmd->add_option("--threads", *threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    cmd->callback([=, &action] {
      action = [=] {
        auto provider = FileScoreProvider::from_file(*scores);
        LabeledDataset ds = collect_noise(read_dataset_file(*in), provider,
                                          *beta, nullptr, *threads);
        write_dataset_file(ds, *out);
        print_dataset_summary(ds, *out);
      };
    });
  }

  // build-textsets -----------------------------------------------------
  {
    auto *cmd = app.add_subcommand(
        "build-textsets", "Build T+/T- text sets from E_VTweb and N_VTweb");
    auto evtweb = std::make_shared<std::string>();
    auto nvtweb = std::make_shared<std::string>();
    auto corpus = std::make_shared<std::string>();
    auto plus_out = std::make_shared<std::string>();
    auto minus_out = std::make_shared<std::string>();
    auto categories = std::make_shared<int>(0);
    cmd->add_option("--evtweb", *evtweb, "Filtered web dataset")->required();
    cmd->add_option("--nvtweb", *nvtweb, "Noise dataset")->required();
    cmd->add_option("--corpus", *corpus, "Corpus file")->required();
    cmd->add_option("--categories", *categories, "Category count")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--plus-out", *plus_out, "T+ output")->required();
    cmd->add_option("--minus-out", *minus_out, "T- output")->required();
    cmd->callback([=, &action] {
      action = [=] {
        TextSets sets =
            build_textsets(read_dataset_file(*evtweb),
                           read_dataset_file(*nvtweb),
                           CorpusIndex::from_file(*corpus), *categories);
        write_textset_file(*plus_out, sets.plus);
        write_textset_file(*minus_out, sets.minus);
        std::cout << "T+: " << sets.plus.size() << " records -> " << *plus_out
                  << "\nT-: " << sets.minus.size() << " records -> "
                  << *minus_out << "\n";
      };
    });
  }

  // train-textclf --------------------------------------------------------
  {
    auto *cmd = app.add_subcommand("train-textclf",
                                   "Train the text classifier on T+/T-");
    auto plus = std::make_shared<std::string>();
    auto minus = std::make_shared<std::string>();
    auto model_out = std::make_shared<std::string>();
    auto categories = std::make_shared<int>(0);
    auto cfg = std::make_shared<TrainConfig>();
    cmd->add_option("--plus", *plus, "T+ file")->required();
    cmd->add_option("--minus", *minus, "T- file")->required();
    cmd->add_option("--categories", *categories, "Category count")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--model-out", *model_out, "Model output path")
        ->required();
    cmd->add_option("--lr0", cfg->lr0, "Initial learning rate");
    cmd->add_option("--epochs", cfg->epochs, "Training epochs")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--d-emb", cfg->d_emb, "Embedding dimension")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--buckets", cfg->B, "Bigram hash buckets")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--minus-ratio", cfg->minus_ratio,
                    "Subsample T- to this multiple of |T+| (0 keeps all)");
    cmd->add_option("--seed", cfg->seed, "Training seed")->required();
    cmd->callback([=, &action] {
      action = [=] {
        TextSets sets;
        sets.plus = read_textset_file(*plus);
        sets.minus = read_textset_file(*minus);
        sets.category_count = *categories;
        TrainResult result = train_textclf(sets, *cfg);
        save_model(result.model, *model_out);
        for (size_t e = 0; e < result.epoch_loss.size(); ++e)
          std::cout << "epoch " << e << " loss " << result.epoch_loss[e]
                    << "\n";
        std::cout << "model -> " << *model_out << "\n";
      };
    });
  }

  // predict-textclf ------------------------------------------------------
  {
    auto *cmd = app.add_subcommand(
        "predict-textclf", "Label a corpus with the text classifier");
    auto corpus = std::make_shared<std::string>();
    auto model_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto threshold = std::make_shared<double>(0.5);
    auto threads = std::make_shared<int>(1);
    cmd->add_option("--corpus", *corpus, "Corpus file")->required();
    cmd->add_option("--model", *model_path, "Trained model")->required();
    cmd->add_option("--out", *out, "Output dataset file")->required();
    cmd->add_option("--threshold", *threshold,
                    "Probability threshold (strict)")
        ->check(InUnitRange);
    cmd->add_option("--threads", *threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    cmd->callback([=, &action] {
      action = [=] {
        TextClassifier model = load_model(*model_path);
        LabeledDataset ds = predict_label_set(
            read_corpus_file(*corpus), model, *threshold, *threads);
        write_dataset_file(ds, *out);
        print_dataset_summary(ds, *out);
      };
    });
  }

  // assemble -------------------------------------------------------------
  {
    auto *cmd = app.add_subcommand("assemble",
                                   "Union two datasets (E_VT = a ∪ b)");
    auto a = std::make_shared<std::string>();
    auto b = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto name = std::make_shared<std::string>("E_VT");
    cmd->add_option("--a", *a, "First dataset")->required();
    cmd->add_option("--b", *b, "Second dataset")->required();
    cmd->add_option("--out", *out, "Output dataset file")->required();
    cmd->add_option("--name", *name, "Output dataset name");
    cmd->callback([=, &action] {
      action = [=] {
        LabeledDataset ds =
            union_datasets(read_dataset_file(*a), read_dataset_file(*b), *name);
        write_dataset_file(ds, *out);
        print_dataset_summary(ds, *out);
      };
    });
  }

  // balance --------------------------------------------------------------
  {
    auto *cmd = app.add_subcommand(
        "balance", "Subsample oversized categories to the configured caps");
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto hard_cap = std::make_shared<uint64_t>(15000);
    auto target_cap = std::make_shared<uint64_t>(6000);
    auto seed = std::make_shared<uint64_t>(0);
    cmd->add_option("--in", *in, "Input dataset")->required();
    cmd->add_option("--out", *out, "Output dataset file")->required();
    cmd->add_option("--hard-cap", *hard_cap, "First-stage cap");
    cmd->add_option("--target-cap", *target_cap, "Second-stage cap");
    cmd->add_option("--seed", *seed, "Sampling seed")->required();
    cmd->callback([=, &action] {
      action = [=] {
        LabeledDataset ds =
            balance(read_dataset_file(*in), *hard_cap, *target_cap, *seed);
        write_dataset_file(ds, *out);
        print_dataset_summary(ds, *out);
      };
    });
  }

  // stats ---------------------------------------------------------------
  {
    auto *cmd = app.add_subcommand("stats",
                                   "Dataset statistics: per-category counts, "
                                   "field attribution, confidence histogram");
    auto in = std::make_shared<std::string>();
    auto corpus = std::make_shared<std::string>();
    auto lexicon = std::make_shared<std::string>();
    auto scores = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("word-boundary");
    cmd->add_option("--in", *in, "Input dataset")->required();
    cmd->add_option("--out", *out, "Stats JSON output")->required();
    cmd->add_option("--corpus", *corpus, "Corpus for field attribution");
    cmd->add_option("--lexicon", *lexicon, "Lexicon for field attribution");
    cmd->add_option("--scores", *scores, "Score file for the histogram");
    cmd->add_option("--mode", *mode, "Match mode")
        ->check(CLI::IsMember({"substring", "word-boundary"}));
    cmd->callback([=, &action] {
      action = [=] {
        LabeledDataset ds = read_dataset_file(*in);
        std::optional<CorpusIndex> index;
        std::optional<PhraseMatcher> matcher;
        if (!corpus->empty() && !lexicon->empty()) {
          index.emplace(CorpusIndex::from_file(*corpus));
          matcher.emplace(load_lexicon(*lexicon),
                          *match_mode_from_string(*mode));
        }
        std::optional<FileScoreProvider> provider;
        if (!scores->empty())
          provider.emplace(FileScoreProvider::from_file(*scores));
        DatasetStats stats =
            compute_stats(ds, index ? &*index : nullptr,
                          matcher ? &*matcher : nullptr,
                          provider ? &*provider : nullptr);
        write_stats_file(stats, *out);
        std::cout << "stats -> " << *out << "\n";
      };
    });
  }

  // accuracy ---------------------------------------------------------------
  {
    auto *cmd = app.add_subcommand(
        "accuracy", "Estimate dataset accuracy against a truth table");
    auto in = std::make_shared<std::string>();
    auto truth = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto sample = std::make_shared<int>(10);
    auto seed = std::make_shared<uint64_t>(0);
    cmd->add_option("--in", *in, "Input dataset")->required();
    cmd->add_option("--truth", *truth, "Ground-truth file")->required();
    cmd->add_option("--sample", *sample, "Items sampled per category")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", *seed, "Sampling seed")->required();
    cmd->add_option("--out", *out, "Report JSON output");
    cmd->callback([=, &action] {
      action = [=] {
        AccuracyReport report = estimate_accuracy(
            read_dataset_file(*in), load_truth_table(*truth), *sample, *seed);
        json obj = accuracy_json(report);
        std::cout << obj.dump(2) << "\n";
        if (!out->empty()) {
          std::ofstream f(*out, std::ios::trunc);
          f << obj.dump(2) << "\n";
          if (!f)
            throw std::runtime_error("cannot write " + *out);
        }
      };
    });
  }

  // sweep ----------------------------------------------------------------
  {
    auto *cmd = app.add_subcommand(
        "sweep", "Quantity/accuracy across a threshold grid");
    auto kind = std::make_shared<std::string>("e_vtweb");
    auto in = std::make_shared<std::string>();
    auto unlabeled = std::make_shared<std::string>();
    auto scores = std::make_shared<std::string>();
    auto truth = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto grid_csv = std::make_shared<std::string>(
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9");
    auto categories = std::make_shared<int>(0);
    auto threads = std::make_shared<int>(1);
    cmd->add_option("--kind", *kind, "What to sweep")
        ->check(CLI::IsMember({"e_v", "e_vtweb"}));
    cmd->add_option("--in", *in, "E_T dataset (for e_vtweb)");
    cmd->add_option("--unlabeled", *unlabeled, "Unlabeled pool (for e_v)");
    cmd->add_option("--scores", *scores, "Score file")->required();
    cmd->add_option("--truth", *truth, "Ground-truth file for accuracy");
    cmd->add_option("--out", *out, "TSV output")->required();
    cmd->add_option("--grid", *grid_csv, "Comma-separated thresholds");
    cmd->add_option("--categories", *categories,
                    "Category count (for e_v)");
    cmd->add_option("--threads", *threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    cmd->callback([=, &action] {
      action = [=] {
        auto provider = FileScoreProvider::from_file(*scores);
        std::vector<double> grid = parse_grid(*grid_csv);
        std::optional<TruthTable> truth_table;
        if (!truth->empty())
          truth_table = load_truth_table(*truth);

        std::function<LabeledDataset(double)> builder;
        if (*kind == "e_v") {
          if (unlabeled->empty() || *categories < 1)
            throw std::runtime_error(
                "e_v sweep needs --unlabeled and --categories");
          auto pool = read_unlabeled_file(*unlabeled);
          builder = [&, pool](double t) {
            return label_by_dcnn(pool, provider, t, *categories, nullptr,
                                 *threads);
          };
        } else {
          if (in->empty())
            throw std::runtime_error("e_vtweb sweep needs --in");
          auto e_t = read_dataset_file(*in);
          builder = [&, e_t](double t) {
            return filter_by_confidence(e_t, provider, t,
                                        Provenance::web_filtered, nullptr,
                                        *threads);
          };
        }
        auto points = sweep(builder, grid,
                            truth_table ? &*truth_table : nullptr);
        write_sweep_tsv(*out, points);
        std::cout << "sweep -> " << *out << "\n";
      };
    });
  }

  // ndcg ------------------------------------------------------------------
  {
    auto *cmd = app.add_subcommand(
        "ndcg", "NDCG@d for ranked relevance lists (grades 0/2/3)");
    auto in = std::make_shared<std::string>();
    auto depth = std::make_shared<int>(0);
    cmd->add_option("--in", *in, "Batch file, one comma-separated list per "
                                 "line")
        ->required();
    cmd->add_option("--depth", *depth, "Evaluation depth d")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->callback([=, &action] {
      action = [=] {
        for (const RankedList &list : read_ndcg_batch(*in)) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.12f",
                        ndcg(list.relevances, *depth));
          std::cout << buf << "\n";
        }
      };
    });
  }

  // run -------------------------------------------------------------------
  {
    auto *cmd = app.add_subcommand("run", "Run the full augmentation pipeline");
    auto config_path = std::make_shared<std::string>();
    auto corpus = std::make_shared<std::string>();
    auto lexicon = std::make_shared<std::string>();
    auto scores = std::make_shared<std::string>();
    auto out_dir = std::make_shared<std::string>();
    auto alpha = std::make_shared<double>(0.0);
    auto alpha_prime = std::make_shared<double>(0.0);
    auto beta = std::make_shared<double>(0.0);
    auto mode = std::make_shared<std::string>();
    auto hard_cap = std::make_shared<uint64_t>(0);
    auto target_cap = std::make_shared<uint64_t>(0);
    auto seed = std::make_shared<uint64_t>(0);
    auto threads = std::make_shared<int>(1);
    auto no_textclf = std::make_shared<bool>(false);
    auto do_balance = std::make_shared<bool>(false);

    auto *o_corpus = cmd->add_option("--corpus", *corpus, "Corpus file");
    auto *o_lexicon = cmd->add_option("--lexicon", *lexicon, "Lexicon file");
    auto *o_scores = cmd->add_option("--scores", *scores, "Score file");
    auto *o_out = cmd->add_option("--out-dir", *out_dir, "Output directory");
    auto *o_alpha = cmd->add_option("--alpha", *alpha, "Web filter threshold")
                        ->check(InUnitRange);
    auto *o_ap = cmd->add_option("--alpha-prime", *alpha_prime,
                                 "Classifier filter threshold")
                     ->check(InUnitRange);
    auto *o_beta =
        cmd->add_option("--beta", *beta, "Noise threshold")->check(InUnitRange);
    auto *o_mode = cmd->add_option("--mode", *mode, "Match mode")
                       ->check(CLI::IsMember({"substring", "word-boundary"}));
    auto *o_hard = cmd->add_option("--hard-cap", *hard_cap, "Balance hard cap");
    auto *o_target =
        cmd->add_option("--target-cap", *target_cap, "Balance target cap");
    auto *o_threads = cmd->add_option("--threads", *threads, "Worker threads")
                          ->check(CLI::PositiveNumber);
    auto *o_no_clf = cmd->add_flag("--no-textclf", *no_textclf,
                                   "Disable the text classifier branch");
    auto *o_balance = cmd->add_flag("--balance", *do_balance,
                                    "Balance the final dataset");
    cmd->add_option("--config", *config_path, "Pipeline config JSON");
    cmd->add_option("--seed", *seed, "Pipeline seed")->required();

    cmd->callback([=, &action] {
      action = [=] {
        PipelineConfig config;
        if (!config_path->empty())
          config = PipelineConfig::from_json_file(*config_path);
        // flags win over the config file
        if (*o_corpus)
          config.corpus_path = *corpus;
        if (*o_lexicon)
          config.lexicon_path = *lexicon;
        if (*o_scores)
          config.scores_path = *scores;
        if (*o_out)
          config.out_dir = *out_dir;
        if (*o_alpha)
          config.thresholds.alpha = *alpha;
        if (*o_ap)
          config.thresholds.alpha_prime = *alpha_prime;
        if (*o_beta)
          config.thresholds.beta = *beta;
        if (*o_mode)
          config.mode = *match_mode_from_string(*mode);
        if (*o_hard)
          config.hard_cap = *hard_cap;
        if (*o_target)
          config.target_cap = *target_cap;
        if (*o_threads)
          config.threads = *threads;
        if (*o_no_clf)
          config.textclf_enabled = false;
        if (*o_balance)
          config.balance_output = true;
        config.seed = *seed;
        config.train.seed = *seed;

        PipelineResult result = run_full_pipeline(config);
        for (const StageInfo &s : result.manifest.stages)
          std::cout << s.name << ": " << s.count << " (" << s.path << ")\n";
        std::cout << "manifest -> " << result.manifest_path << "\n";
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help();
    return 1;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    action();
  } catch (const PipelineError &e) {
    std::cerr << "stage " << e.stage << " failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "stage " << stage << " failed: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
