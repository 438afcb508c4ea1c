#include "webaug/corpus.hpp"

#include <algorithm>
#include <stdexcept>

#include "webaug/jsonl.hpp"

namespace webaug {

const char *to_string(FieldType f) {
  switch (f) {
  case FieldType::anchor:
    return "anchor";
  case FieldType::alt:
    return "alt";
  case FieldType::title:
    return "title";
  default:
    return "surrounding";
  }
}

std::optional<FieldType> field_type_from_string(std::string_view s) {
  if (s == "anchor")
    return FieldType::anchor;
  if (s == "alt")
    return FieldType::alt;
  if (s == "title")
    return FieldType::title;
  if (s == "surrounding")
    return FieldType::surrounding;
  return std::nullopt;
}

namespace {

std::string ascii_lower(std::string s) {
  for (char &c : s)
    if (c >= 'A' && c <= 'Z')
      c = static_cast<char>(c - 'A' + 'a');
  return s;
}

} // namespace

std::optional<WebDataItem> parse_corpus_line(const std::string &line,
                                             std::string *err) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    if (err)
      *err = "not a JSON object";
    return std::nullopt;
  }
  WebDataItem item;
  item.item_id = json_string_or(obj, "id");
  if (item.item_id.empty()) {
    if (err)
      *err = "missing id";
    return std::nullopt;
  }
  item.image_ref = json_string_or(obj, "image_ref");
  item.anchor_text = json_string_or(obj, "anchor");
  item.alt_text = json_string_or(obj, "alt");
  item.page_title = json_string_or(obj, "title");
  item.surrounding_text = json_string_or(obj, "surrounding");
  // Declared domains are folded to lowercase at ingest so the invariant
  // holds for every constructed item.
  item.domain = ascii_lower(json_string_or(obj, "domain"));
  if (item.domain.empty()) {
    if (err)
      *err = "missing domain";
    return std::nullopt;
  }
  if (!item.has_any_text()) {
    if (err)
      *err = "all four text fields empty";
    return std::nullopt;
  }
  return item;
}

std::string corpus_line(const WebDataItem &item) {
  json obj;
  obj["id"] = item.item_id;
  obj["image_ref"] = item.image_ref;
  obj["domain"] = item.domain;
  if (!item.anchor_text.empty())
    obj["anchor"] = item.anchor_text;
  if (!item.alt_text.empty())
    obj["alt"] = item.alt_text;
  if (!item.page_title.empty())
    obj["title"] = item.page_title;
  if (!item.surrounding_text.empty())
    obj["surrounding"] = item.surrounding_text;
  return obj.dump();
}

std::optional<WebDataItem> CorpusReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::string err;
    auto item = parse_corpus_line(line, &err);
    if (item)
      return item;
    ++skipped_;
    skip_messages_.push_back("line " + std::to_string(line_no_) + ": " + err);
  }
  return std::nullopt;
}

CorpusFileReader::CorpusFileReader(const std::string &path)
    : file_(path, std::ios::binary) {
  if (!file_)
    throw std::runtime_error("cannot open corpus file " + path);
  reader_ = std::make_unique<CorpusReader>(file_);
}

std::vector<WebDataItem> read_corpus_file(const std::string &path,
                                          size_t *skipped) {
  CorpusFileReader reader(path);
  std::vector<WebDataItem> items;
  while (auto item = reader.next())
    items.push_back(std::move(*item));
  if (skipped)
    *skipped = reader.skipped();
  return items;
}

void write_corpus_file(const std::string &path,
                       const std::vector<WebDataItem> &items) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto &item : items)
    out << corpus_line(item) << '\n';
  out.close();
  if (out.fail())
    throw std::runtime_error("write failed: " + path);
}

std::vector<UnlabeledImageRef> read_unlabeled_file(const std::string &path) {
  std::vector<UnlabeledImageRef> refs;
  for_each_line(path, [&](size_t line_no, const std::string &line) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("id"))
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": bad unlabeled record");
    refs.push_back({obj["id"].get<std::string>(), json_string_or(obj, "image_ref")});
  });
  return refs;
}

void write_unlabeled_file(const std::string &path,
                          const std::vector<UnlabeledImageRef> &refs) {
  JsonlWriter out(path);
  for (const auto &r : refs) {
    json obj;
    obj["id"] = r.item_id;
    obj["image_ref"] = r.image_ref;
    out.write(obj);
  }
  out.close();
}

std::vector<TextRecord> expand_records(const WebDataItem &item) {
  std::vector<TextRecord> records;
  for (FieldType f : kAllFields) {
    const std::string &text = item.field(f);
    if (!text.empty())
      records.push_back({item.item_id, f, text, item.domain});
  }
  return records;
}

CorpusIndex::CorpusIndex(std::vector<WebDataItem> items)
    : items_(std::move(items)) {
  by_id_.reserve(items_.size());
  for (size_t i = 0; i < items_.size(); ++i)
    by_id_.emplace(items_[i].item_id, i);
}

CorpusIndex CorpusIndex::from_file(const std::string &path) {
  return CorpusIndex(read_corpus_file(path));
}

const WebDataItem *CorpusIndex::find(const std::string &item_id) const {
  auto it = by_id_.find(item_id);
  return it == by_id_.end() ? nullptr : &items_[it->second];
}

} // namespace webaug
