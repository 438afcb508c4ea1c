#include "webaug/textclf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "webaug/jsonl.hpp"
#include "webaug/lexicon.hpp"
#include "webaug/parallel.hpp"
#include "webaug/rng.hpp"

namespace webaug {

DomainVocab DomainVocab::build(std::vector<std::string> domains) {
  std::sort(domains.begin(), domains.end());
  domains.erase(std::unique(domains.begin(), domains.end()), domains.end());
  DomainVocab v;
  v.sorted_ = std::move(domains);
  return v;
}

uint32_t DomainVocab::id_of(std::string_view domain) const {
  auto it = std::lower_bound(sorted_.begin(), sorted_.end(), domain);
  if (it == sorted_.end() || *it != domain)
    return 0;
  return static_cast<uint32_t>(it - sorted_.begin()) + 1;
}

TextFeatures featurize(const TextRecord &record, uint32_t B,
                       const DomainVocab &vocab) {
  if (B == 0)
    throw std::invalid_argument("B must be positive");
  TextFeatures f;
  f.type_id = static_cast<int>(record.field_type);
  f.domain_id = vocab.id_of(record.domain);

  const std::string norm = normalize_phrase(record.text);
  std::vector<std::string_view> tokens;
  size_t pos = 0;
  while (pos < norm.size()) {
    size_t sp = norm.find(' ', pos);
    if (sp == std::string::npos)
      sp = norm.size();
    if (sp > pos)
      tokens.push_back(std::string_view(norm).substr(pos, sp - pos));
    pos = sp + 1;
  }
  if (tokens.empty())
    return f;
  if (tokens.size() == 1) {
    f.bigram_ids.push_back(static_cast<uint32_t>(fnv1a64(tokens[0]) % B));
    return f;
  }
  std::string key;
  for (size_t i = 0; i + 1 < tokens.size(); ++i) {
    key.assign(tokens[i]);
    key.push_back('\x1f');
    key.append(tokens[i + 1]);
    f.bigram_ids.push_back(static_cast<uint32_t>(fnv1a64(key) % B));
  }
  return f;
}

void TextClassifier::init(uint32_t B_, uint32_t D_, uint32_t C_,
                          uint32_t d_emb_, uint64_t seed) {
  if (B_ == 0 || D_ == 0 || C_ == 0 || d_emb_ == 0)
    throw std::invalid_argument("model dimensions must be positive");
  B = B_;
  D = D_;
  C = C_;
  d_emb = d_emb_;
  E.assign(embed_rows() * d_emb, 0.0);
  W.assign(static_cast<size_t>(C + 1) * d_emb, 0.0);
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / static_cast<double>(d_emb);
  for (double &e : E)
    e = (2.0 * rng_real(rng) - 1.0) * scale;
}

namespace {

// Every embedding row an example touches, bigrams with multiplicity.
template <typename Fn>
void for_each_row(const TextClassifier &m, const TextFeatures &f, Fn &&fn) {
  for (uint32_t id : f.bigram_ids)
    fn(m.bigram_row(id));
  fn(m.type_row(f.type_id));
  fn(m.domain_row(f.domain_id));
}

std::vector<double> softmax(std::vector<double> logits) {
  double mx = logits[0];
  for (double v : logits)
    mx = std::max(mx, v);
  double sum = 0.0;
  for (double &v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double &v : logits)
    v /= sum;
  return logits;
}

} // namespace

std::vector<double> TextClassifier::hidden(const TextFeatures &f) const {
  std::vector<double> h(d_emb, 0.0);
  for_each_row(*this, f, [&](size_t row) {
    const double *e = E.data() + row * d_emb;
    for (uint32_t j = 0; j < d_emb; ++j)
      h[j] += e[j];
  });
  const double inv = 1.0 / static_cast<double>(f.n_bigrams() + 2);
  for (double &v : h)
    v *= inv;
  return h;
}

std::vector<double> TextClassifier::forward(const TextFeatures &f) const {
  const std::vector<double> h = hidden(f);
  std::vector<double> logits(C + 1, 0.0);
  for (uint32_t k = 0; k <= C; ++k) {
    const double *w = W.data() + static_cast<size_t>(k) * d_emb;
    double dot = 0.0;
    for (uint32_t j = 0; j < d_emb; ++j)
      dot += w[j] * h[j];
    logits[k] = dot;
  }
  return softmax(std::move(logits));
}

double loss_and_grad(const TextClassifier &model,
                     const std::vector<LabeledText> &batch, Gradients *grads) {
  if (batch.empty())
    throw std::invalid_argument("loss over an empty batch");
  if (grads) {
    grads->dE.assign(model.E.size(), 0.0);
    grads->dW.assign(model.W.size(), 0.0);
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  std::vector<double> dh(model.d_emb);
  for (const LabeledText &ex : batch) {
    if (ex.label < 1 || ex.label > static_cast<int>(model.C) + 1)
      throw std::invalid_argument("label outside 1..C+1");
    const std::vector<double> h = model.hidden(ex.features);
    std::vector<double> logits(model.C + 1, 0.0);
    for (uint32_t k = 0; k <= model.C; ++k) {
      const double *w = model.W.data() + static_cast<size_t>(k) * model.d_emb;
      double dot = 0.0;
      for (uint32_t j = 0; j < model.d_emb; ++j)
        dot += w[j] * h[j];
      logits[k] = dot;
    }
    std::vector<double> p = softmax(std::move(logits));
    loss -= std::log(p[ex.label - 1]) * inv_n;
    if (!grads)
      continue;
    // dlogits = (p - onehot(y)) / N; chain through W then into the touched
    // embedding rows.
    std::fill(dh.begin(), dh.end(), 0.0);
    for (uint32_t k = 0; k <= model.C; ++k) {
      const double dk =
          (p[k] - (static_cast<int>(k) == ex.label - 1 ? 1.0 : 0.0)) * inv_n;
      double *dw = grads->dW.data() + static_cast<size_t>(k) * model.d_emb;
      const double *w = model.W.data() + static_cast<size_t>(k) * model.d_emb;
      for (uint32_t j = 0; j < model.d_emb; ++j) {
        dw[j] += dk * h[j];
        dh[j] += dk * w[j];
      }
    }
    const double inv_rows =
        1.0 / static_cast<double>(ex.features.n_bigrams() + 2);
    for_each_row(model, ex.features, [&](size_t row) {
      double *de = grads->dE.data() + row * model.d_emb;
      for (uint32_t j = 0; j < model.d_emb; ++j)
        de[j] += dh[j] * inv_rows;
    });
  }
  return loss;
}

void TrainConfig::validate() const {
  if (lr0 < 0.0)
    throw std::invalid_argument("lr0 must be non-negative");
  if (epochs < 1)
    throw std::invalid_argument("epochs must be at least 1");
  if (d_emb == 0 || B == 0)
    throw std::invalid_argument("d_emb and B must be positive");
  if (minus_ratio < 0.0)
    throw std::invalid_argument("minus_ratio must be non-negative");
}

TextSets build_textsets(const LabeledDataset &e_vtweb,
                        const LabeledDataset &n_vtweb,
                        const CorpusIndex &corpus, int category_count) {
  if (category_count <= 0)
    throw std::invalid_argument("category_count must be positive");
  TextSets sets;
  sets.category_count = category_count;
  auto emit = [&](const LabeledDataset &src, int label_override,
                  std::vector<TextSetRecord> &dst) {
    for (const LabeledImage &img : src.items) {
      const WebDataItem *item = corpus.find(img.item_id);
      if (!item)
        continue;
      const int label =
          label_override > 0 ? label_override : img.category_id;
      for (const TextRecord &rec : expand_records(*item))
        dst.push_back({rec.item_id, rec.field_type, rec.text, rec.domain,
                       label});
    }
  };
  emit(e_vtweb, 0, sets.plus);
  emit(n_vtweb, category_count + 1, sets.minus);
  return sets;
}

void write_textset_file(const std::string &path,
                        const std::vector<TextSetRecord> &records) {
  JsonlWriter out(path);
  for (const TextSetRecord &r : records) {
    json obj;
    obj["id"] = r.item_id;
    obj["field"] = to_string(r.field_type);
    obj["text"] = r.text;
    obj["domain"] = r.domain;
    obj["label"] = r.label;
    out.write(obj);
  }
  out.close();
}

std::vector<TextSetRecord> read_textset_file(const std::string &path) {
  std::vector<TextSetRecord> records;
  for_each_line(path, [&](size_t line_no, std::string_view line) {
    auto fail = [&](const std::string &why) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": " + why);
    };
    json obj = json::parse(line, nullptr, false);
    if (!obj.is_object())
      fail("not a JSON object");
    for (const char *key : {"id", "field", "text", "domain", "label"})
      if (!obj.contains(key))
        fail(std::string("missing ") + key);
    auto field = field_type_from_string(obj["field"].get<std::string>());
    if (!field)
      fail("unknown field type");
    int label = obj["label"].get<int>();
    if (label < 1)
      fail("label must be positive");
    records.push_back({obj["id"].get<std::string>(), *field,
                       obj["text"].get<std::string>(),
                       obj["domain"].get<std::string>(), label});
  });
  return records;
}

TrainResult train_textclf(const TextSets &sets, const TrainConfig &config) {
  config.validate();
  if (sets.plus.empty() || sets.minus.empty())
    throw std::runtime_error(
        "training needs both positive and noise-class text records");
  if (sets.category_count <= 0)
    throw std::runtime_error("text sets carry no category count");
  const uint32_t C = static_cast<uint32_t>(sets.category_count);

  std::vector<const TextSetRecord *> records;
  records.reserve(sets.plus.size() + sets.minus.size());
  for (const TextSetRecord &r : sets.plus)
    records.push_back(&r);
  if (config.minus_ratio > 0.0) {
    size_t target = static_cast<size_t>(config.minus_ratio *
                                        static_cast<double>(sets.plus.size()));
    target = std::max<size_t>(target, 1);
    if (target >= sets.minus.size()) {
      for (const TextSetRecord &r : sets.minus)
        records.push_back(&r);
    } else {
      std::vector<size_t> idx(sets.minus.size());
      for (size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
      std::mt19937_64 pick(derive_seed(config.seed, 2));
      rng_shuffle(pick, idx);
      idx.resize(target);
      std::sort(idx.begin(), idx.end());
      for (size_t i : idx)
        records.push_back(&sets.minus[i]);
    }
  } else {
    for (const TextSetRecord &r : sets.minus)
      records.push_back(&r);
  }

  std::vector<std::string> domains;
  domains.reserve(records.size());
  for (const TextSetRecord *r : records)
    domains.push_back(r->domain);
  DomainVocab vocab = DomainVocab::build(std::move(domains));

  std::vector<LabeledText> examples;
  examples.reserve(records.size());
  for (const TextSetRecord *r : records) {
    if (r->label < 1 || r->label > static_cast<int>(C) + 1)
      throw std::runtime_error("text set label outside 1..C+1");
    TextRecord rec{r->item_id, r->field_type, r->text, r->domain};
    examples.push_back({featurize(rec, config.B, vocab), r->label});
  }

  TrainResult result;
  TextClassifier &m = result.model;
  m.init(config.B, vocab.size(), C, config.d_emb, derive_seed(config.seed, 0));
  m.vocab = std::move(vocab);

  const size_t n = examples.size();
  const double total_steps = static_cast<double>(config.epochs) *
                             static_cast<double>(n);
  std::mt19937_64 order_rng(derive_seed(config.seed, 1));
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i)
    order[i] = i;

  std::vector<double> h(m.d_emb), dh(m.d_emb), p;
  size_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng_shuffle(order_rng, order);
    double epoch_loss = 0.0;
    for (size_t i : order) {
      const LabeledText &ex = examples[i];
      const double lr =
          config.lr0 * (1.0 - static_cast<double>(step) / total_steps);
      ++step;

      h = m.hidden(ex.features);
      std::vector<double> logits(m.C + 1, 0.0);
      for (uint32_t k = 0; k <= m.C; ++k) {
        const double *w = m.W.data() + static_cast<size_t>(k) * m.d_emb;
        double dot = 0.0;
        for (uint32_t j = 0; j < m.d_emb; ++j)
          dot += w[j] * h[j];
        logits[k] = dot;
      }
      p = softmax(std::move(logits));
      epoch_loss -= std::log(p[ex.label - 1]);

      // dh must use the pre-update W.
      std::fill(dh.begin(), dh.end(), 0.0);
      for (uint32_t k = 0; k <= m.C; ++k) {
        const double dk =
            p[k] - (static_cast<int>(k) == ex.label - 1 ? 1.0 : 0.0);
        double *w = m.W.data() + static_cast<size_t>(k) * m.d_emb;
        for (uint32_t j = 0; j < m.d_emb; ++j) {
          dh[j] += dk * w[j];
          w[j] -= lr * dk * h[j];
        }
      }
      const double inv_rows =
          1.0 / static_cast<double>(ex.features.n_bigrams() + 2);
      for_each_row(m, ex.features, [&](size_t row) {
        double *e = m.E.data() + row * m.d_emb;
        for (uint32_t j = 0; j < m.d_emb; ++j)
          e[j] -= lr * dh[j] * inv_rows;
      });
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
  }
  return result;
}

LabeledDataset predict_label_set(const std::vector<WebDataItem> &corpus,
                                 const TextClassifier &model, double threshold,
                                 int threads) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw std::invalid_argument("threshold must be in (0,1]");
  auto picked = parallel_map_chunks<WebDataItem, LabeledImage>(
      corpus, threads, 512,
      [&](const WebDataItem &item, std::vector<LabeledImage> &out) {
        // best[c-1] = max p(y=c) over the item's records, noise class ignored
        std::vector<double> best(model.C, 0.0);
        for (const TextRecord &rec : expand_records(item)) {
          TextFeatures f = featurize(rec, model.B, model.vocab);
          std::vector<double> p = model.forward(f);
          for (uint32_t c = 0; c < model.C; ++c)
            best[c] = std::max(best[c], p[c]);
        }
        for (uint32_t c = 0; c < model.C; ++c) {
          if (best[c] > threshold) {
            LabeledImage img;
            img.item_id = item.item_id;
            img.image_ref = item.image_ref;
            img.category_id = static_cast<int>(c) + 1;
            img.confidence = best[c];
            img.provenance = {Provenance::textclf};
            out.push_back(std::move(img));
          }
        }
      });
  LabeledDataset result;
  result.name = "E_Tweb_plus";
  result.items = std::move(picked);
  finalize_dataset(result);
  return result;
}

namespace {

constexpr char kModelMagic[9] = "WAUGTXT1";

void put_u32(std::ofstream &out, uint32_t v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof v);
}
void put_u64(std::ofstream &out, uint64_t v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof v);
}
uint32_t get_u32(std::ifstream &in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char *>(&v), sizeof v);
  return v;
}
uint64_t get_u64(std::ifstream &in) {
  uint64_t v = 0;
  in.read(reinterpret_cast<char *>(&v), sizeof v);
  return v;
}

} // namespace

void save_model(const TextClassifier &model, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write model file: " + path);
  out.write(kModelMagic, 8);
  put_u32(out, model.B);
  put_u32(out, model.D);
  put_u32(out, model.C);
  put_u32(out, model.d_emb);
  put_u64(out, kFnvOffset);
  put_u64(out, kFnvPrime);
  put_u32(out, static_cast<uint32_t>(model.vocab.domains().size()));
  for (const std::string &d : model.vocab.domains()) {
    put_u32(out, static_cast<uint32_t>(d.size()));
    out.write(d.data(), static_cast<std::streamsize>(d.size()));
  }
  out.write(reinterpret_cast<const char *>(model.E.data()),
            static_cast<std::streamsize>(model.E.size() * sizeof(double)));
  out.write(reinterpret_cast<const char *>(model.W.data()),
            static_cast<std::streamsize>(model.W.size() * sizeof(double)));
  out.close();
  if (!out)
    throw std::runtime_error("failed writing model file: " + path);
}

TextClassifier load_model(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open model file: " + path);
  char magic[8] = {};
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kModelMagic, 8) != 0)
    throw std::runtime_error(path + ": not a recognized model file");
  TextClassifier m;
  m.B = get_u32(in);
  m.D = get_u32(in);
  m.C = get_u32(in);
  m.d_emb = get_u32(in);
  const uint64_t offset = get_u64(in);
  const uint64_t prime = get_u64(in);
  if (offset != kFnvOffset || prime != kFnvPrime)
    throw std::runtime_error(
        path + ": model was built with different hash constants");
  const uint32_t n_domains = get_u32(in);
  std::vector<std::string> domains(n_domains);
  for (std::string &d : domains) {
    const uint32_t len = get_u32(in);
    d.resize(len);
    in.read(d.data(), len);
  }
  m.vocab = DomainVocab::build(std::move(domains));
  if (m.B == 0 || m.C == 0 || m.d_emb == 0 || m.D != m.vocab.size())
    throw std::runtime_error(path + ": corrupt model dimensions");
  m.E.resize(m.embed_rows() * m.d_emb);
  m.W.resize(static_cast<size_t>(m.C + 1) * m.d_emb);
  in.read(reinterpret_cast<char *>(m.E.data()),
          static_cast<std::streamsize>(m.E.size() * sizeof(double)));
  in.read(reinterpret_cast<char *>(m.W.data()),
          static_cast<std::streamsize>(m.W.size() * sizeof(double)));
  if (!in)
    throw std::runtime_error(path + ": truncated model file");
  return m;
}

} // namespace webaug
