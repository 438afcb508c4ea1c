#include "webaug/syncorpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <stdexcept>

#include "webaug/jsonl.hpp"
#include "webaug/rng.hpp"
#include "webaug/textclf.hpp" // fnv1a64, shared pair-seed convention

namespace webaug {

void GeneratorConfig::validate() const {
  if (categories < 1 || categories > 99)
    throw std::invalid_argument("categories must be in 1..99");
  if (items < 1)
    throw std::invalid_argument("items must be positive");
  if (noise_rate < 0.0 || noise_rate >= 1.0)
    throw std::invalid_argument("noise_rate must be in [0,1)");
  double mix_sum = 0.0;
  for (double m : field_mix) {
    if (m < 0.0)
      throw std::invalid_argument("field_mix entries must be non-negative");
    mix_sum += m;
  }
  if (std::abs(mix_sum - 1.0) > 1e-9)
    throw std::invalid_argument("field_mix must sum to 1");
  if (popularity_skew < 0.0)
    throw std::invalid_argument("popularity_skew must be non-negative");
  if (!(score_sharpness > 0.0))
    throw std::invalid_argument("score_sharpness must be positive");
}

namespace {

// Largest-remainder apportionment: counts sum to total exactly, ties go to
// the lowest index. Uniform weights come out equal within one.
std::vector<uint64_t> quota_counts(uint64_t total,
                                   const std::vector<double> &weights) {
  double wsum = 0.0;
  for (double w : weights)
    wsum += w;
  if (!(wsum > 0.0))
    throw std::invalid_argument("quota weights must have positive sum");
  std::vector<uint64_t> counts(weights.size(), 0);
  std::vector<std::pair<double, size_t>> remainders;
  uint64_t assigned = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / wsum;
    counts[i] = static_cast<uint64_t>(exact);
    assigned += counts[i];
    remainders.push_back({exact - static_cast<double>(counts[i]), i});
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto &a, const auto &b) {
              return a.first != b.first ? a.first > b.first
                                        : a.second < b.second;
            });
  for (size_t k = 0; assigned < total; ++k, ++assigned)
    ++counts[remainders[k % remainders.size()].second];
  return counts;
}

std::string fmt(const char *pattern, unsigned long long v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

struct Role {
  int category = 0;      // 0 = background
  bool noise = false;    // planted with the ambiguous phrase, truth = none
  FieldType field = FieldType::anchor;
};

// Token pools share no string and no token contains another, so the planted
// occurrences are the only matches in either matcher mode.
std::string filler_token(uint64_t i) { return fmt("w%04llu", i); }
std::string sig_token(int category, int k) {
  return fmt("sig%02llu", static_cast<unsigned long long>(category)) +
         static_cast<char>('a' + k);
}
// Two tokens, like the signature phrases: the phrase-internal bigram is then
// a stable feature the text classifier can tie to the noise class instead of
// leaking through one-off (filler, phrase) bigrams.
std::string amb_phrase(int category) {
  const std::string stem =
      fmt("amb%02llu", static_cast<unsigned long long>(category));
  return stem + "a " + stem + "b";
}

constexpr uint64_t kFillerVocab = 2000;
constexpr int kDomainPool = 16;

std::string filler_text(std::mt19937_64 &rng, uint64_t n_tokens) {
  std::string text;
  for (uint64_t k = 0; k < n_tokens; ++k) {
    if (!text.empty())
      text.push_back(' ');
    text += filler_token(rng_below(rng, kFillerVocab));
  }
  return text;
}

std::string planted_text(std::mt19937_64 &rng, const std::string &phrase) {
  std::string text = filler_text(rng, 1 + rng_below(rng, 3));
  text.push_back(' ');
  text += phrase;
  text.push_back(' ');
  text += filler_text(rng, 1 + rng_below(rng, 3));
  return text;
}

} // namespace

SyntheticCorpus generate_corpus(const GeneratorConfig &config) {
  config.validate();
  const int C = config.categories;
  const uint64_t n_items = config.items;
  const uint64_t n_background = n_items / 10;
  const uint64_t n_planted = n_items - n_background;

  SyntheticCorpus out;

  // Lexicon: two two-token signature phrases per category plus one
  // ambiguous phrase that noise items reuse.
  std::vector<Category> cats;
  for (int c = 1; c <= C; ++c) {
    Category cat;
    cat.id = c;
    cat.name = fmt("topic%02llu", static_cast<unsigned long long>(c));
    cat.phrases.push_back({sig_token(c, 0) + " " + sig_token(c, 1), "en"});
    cat.phrases.push_back({sig_token(c, 2) + " " + sig_token(c, 3), "de"});
    cat.phrases.push_back({amb_phrase(c), "en"});
    cats.push_back(std::move(cat));
  }
  out.lexicon = build_lexicon(std::move(cats));

  // Planted items per category follow the configured power law exactly.
  std::vector<double> cat_weights(static_cast<size_t>(C));
  for (int c = 1; c <= C; ++c)
    cat_weights[static_cast<size_t>(c - 1)] =
        std::pow(static_cast<double>(c), -config.popularity_skew);
  const std::vector<uint64_t> cat_counts = quota_counts(n_planted, cat_weights);

  std::mt19937_64 assembly_rng(derive_seed(config.seed, 0));

  std::vector<FieldType> planted_fields;
  planted_fields.reserve(n_planted);
  {
    std::vector<double> mix(config.field_mix.begin(), config.field_mix.end());
    const std::vector<uint64_t> field_counts = quota_counts(n_planted, mix);
    for (size_t f = 0; f < 4; ++f)
      planted_fields.insert(planted_fields.end(), field_counts[f],
                            kAllFields[f]);
    rng_shuffle(assembly_rng, planted_fields);
  }

  std::vector<Role> roles;
  roles.reserve(n_items);
  for (uint64_t i = 0; i < n_background; ++i)
    roles.push_back({});
  {
    size_t field_at = 0;
    for (int c = 1; c <= C; ++c) {
      const uint64_t block = cat_counts[static_cast<size_t>(c - 1)];
      const std::vector<uint64_t> split =
          quota_counts(block, {config.noise_rate, 1.0 - config.noise_rate});
      for (uint64_t k = 0; k < block; ++k) {
        Role r;
        r.category = c;
        r.noise = k < split[0];
        r.field = planted_fields[field_at++];
        roles.push_back(r);
      }
    }
  }
  rng_shuffle(assembly_rng, roles);

  std::mt19937_64 text_rng(derive_seed(config.seed, 1));
  out.items.reserve(n_items);
  for (uint64_t i = 0; i < n_items; ++i) {
    const Role &role = roles[i];
    WebDataItem item;
    item.item_id = fmt("i%08llu", i);
    item.domain = fmt("site%02llu.example", rng_below(text_rng, kDomainPool));
    item.image_ref = "http://" + item.domain + "/img/" + item.item_id + ".jpg";

    std::array<std::string, 4> texts;
    if (role.category > 0) {
      std::string phrase;
      if (role.noise) {
        phrase = amb_phrase(role.category);
      } else {
        const Category *cat = out.lexicon.find(role.category);
        const std::string amb = amb_phrase(role.category);
        std::vector<const std::string *> sigs;
        for (const Phrase &p : cat->phrases)
          if (p.text != amb)
            sigs.push_back(&p.text);
        phrase = *sigs[rng_below(text_rng, sigs.size())];
      }
      texts[static_cast<size_t>(role.field)] = planted_text(text_rng, phrase);
      for (FieldType f : kAllFields) {
        if (f == role.field)
          continue;
        if (rng_real(text_rng) < 0.4)
          texts[static_cast<size_t>(f)] =
              filler_text(text_rng, 3 + rng_below(text_rng, 5));
      }
      out.ground_truth.truth.labels[item.item_id] =
          role.noise ? 0 : role.category;
      out.ground_truth.planted.push_back(
          {item.item_id, role.category, role.field});
    } else {
      const size_t sure = rng_below(text_rng, 4);
      for (size_t f = 0; f < 4; ++f) {
        if (f == sure || rng_real(text_rng) < 0.3)
          texts[f] = filler_text(text_rng, 3 + rng_below(text_rng, 5));
      }
      out.ground_truth.truth.labels[item.item_id] = 0;
    }
    item.anchor_text = std::move(texts[0]);
    item.alt_text = std::move(texts[1]);
    item.page_title = std::move(texts[2]);
    item.surrounding_text = std::move(texts[3]);
    out.items.push_back(std::move(item));
  }

  std::sort(out.ground_truth.planted.begin(), out.ground_truth.planted.end(),
            [](const PlantedMatch &a, const PlantedMatch &b) {
              return a.category_id != b.category_id
                         ? a.category_id < b.category_id
                         : a.item_id < b.item_id;
            });

  // Score every (item, category) pair. The per-pair seed convention matches
  // OracleScoreProvider seeded with derive_seed(config.seed, 3), so the file
  // table and the oracle provider are interchangeable.
  const uint64_t score_seed = derive_seed(config.seed, 3);
  out.scores.reserve(n_items * static_cast<uint64_t>(C));
  for (const WebDataItem &item : out.items) {
    const int truth = out.ground_truth.truth.labels[item.item_id];
    for (int c = 1; c <= C; ++c) {
      const uint64_t pair_tag =
          fnv1a64(item.item_id) * 1000003ULL + static_cast<uint64_t>(c);
      out.scores.push_back(
          {item.item_id, c,
           draw_pair_score(truth == c, config.score_sharpness,
                           derive_seed(score_seed, pair_tag))});
    }
  }
  return out;
}

void write_truth_file(const std::string &path, const GroundTruth &gt) {
  std::map<std::string, std::vector<const PlantedMatch *>> by_item;
  for (const PlantedMatch &m : gt.planted)
    by_item[m.item_id].push_back(&m);

  std::vector<std::string> ids;
  ids.reserve(gt.truth.labels.size());
  for (const auto &[id, cat] : gt.truth.labels)
    ids.push_back(id);
  std::sort(ids.begin(), ids.end());

  JsonlWriter out(path);
  for (const std::string &id : ids) {
    json obj;
    obj["id"] = id;
    obj["true_category"] = gt.truth.labels.at(id);
    json planted = json::array();
    auto it = by_item.find(id);
    if (it != by_item.end())
      for (const PlantedMatch *m : it->second)
        planted.push_back(
            {{"category", m->category_id}, {"field", to_string(m->field)}});
    obj["planted"] = planted;
    out.write(obj);
  }
  out.close();
}

GroundTruth read_truth_file(const std::string &path) {
  GroundTruth gt;
  for_each_line(path, [&](size_t line_no, std::string_view line) {
    auto fail = [&](const std::string &why) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": " + why);
    };
    json obj = json::parse(line, nullptr, false);
    if (!obj.is_object())
      fail("not a JSON object");
    if (!obj.contains("id") || !obj.contains("true_category"))
      fail("truth entries need id and true_category");
    const std::string id = obj["id"].get<std::string>();
    gt.truth.labels[id] = obj["true_category"].get<int>();
    if (obj.contains("planted")) {
      for (const json &p : obj["planted"]) {
        auto field = field_type_from_string(p.at("field").get<std::string>());
        if (!field)
          fail("unknown planted field");
        gt.planted.push_back({id, p.at("category").get<int>(), *field});
      }
    }
  });
  std::sort(gt.planted.begin(), gt.planted.end(),
            [](const PlantedMatch &a, const PlantedMatch &b) {
              return a.category_id != b.category_id
                         ? a.category_id < b.category_id
                         : a.item_id < b.item_id;
            });
  return gt;
}

GeneratedPaths generate_to_dir(const GeneratorConfig &config,
                               const std::string &out_dir) {
  std::filesystem::create_directories(out_dir);
  SyntheticCorpus corpus = generate_corpus(config);
  GeneratedPaths paths;
  paths.corpus = out_dir + "/corpus.jsonl";
  paths.lexicon = out_dir + "/lexicon.json";
  paths.scores = out_dir + "/scores.jsonl";
  paths.truth = out_dir + "/truth.jsonl";
  write_corpus_file(paths.corpus, corpus.items);
  save_lexicon(corpus.lexicon, paths.lexicon);
  write_score_file(paths.scores, corpus.scores);
  write_truth_file(paths.truth, corpus.ground_truth);
  return paths;
}

} // namespace webaug
