#include "webaug/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "webaug/jsonl.hpp"

namespace webaug {

const char *to_string(Provenance p) {
  switch (p) {
  case Provenance::web_match:
    return "web_match";
  case Provenance::dcnn:
    return "dcnn";
  case Provenance::web_filtered:
    return "web_filtered";
  case Provenance::textclf:
    return "textclf";
  default:
    return "textclf_filtered";
  }
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "web_match")
    return Provenance::web_match;
  if (s == "dcnn")
    return Provenance::dcnn;
  if (s == "web_filtered")
    return Provenance::web_filtered;
  if (s == "textclf")
    return Provenance::textclf;
  if (s == "textclf_filtered")
    return Provenance::textclf_filtered;
  return std::nullopt;
}

namespace {

std::string provenance_field(const std::vector<Provenance> &ps) {
  std::string s;
  for (size_t i = 0; i < ps.size(); ++i) {
    if (i)
      s += '+';
    s += to_string(ps[i]);
  }
  return s;
}

std::vector<Provenance> parse_provenance_field(const std::string &s) {
  std::vector<Provenance> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t end = s.find('+', start);
    if (end == std::string::npos)
      end = s.size();
    auto p = provenance_from_string(std::string_view(s).substr(start, end - start));
    if (!p)
      throw std::runtime_error("unknown provenance '" + s + "'");
    out.push_back(*p);
    if (end == s.size())
      break;
    start = end + 1;
  }
  return out;
}

} // namespace

bool LabeledDataset::contains(const std::string &item_id,
                              int category_id) const {
  auto it = std::lower_bound(
      items.begin(), items.end(), std::make_pair(category_id, item_id),
      [](const LabeledImage &a, const std::pair<int, std::string> &key) {
        return a.category_id != key.first ? a.category_id < key.first
                                          : a.item_id < key.second;
      });
  return it != items.end() && it->category_id == category_id &&
         it->item_id == item_id;
}

void finalize_dataset(LabeledDataset &ds) {
  std::sort(ds.items.begin(), ds.items.end(),
            [](const LabeledImage &a, const LabeledImage &b) {
              return a.category_id != b.category_id
                         ? a.category_id < b.category_id
                         : a.item_id < b.item_id;
            });
  for (size_t i = 1; i < ds.items.size(); ++i)
    if (ds.items[i].category_id == ds.items[i - 1].category_id &&
        ds.items[i].item_id == ds.items[i - 1].item_id)
      throw std::runtime_error("dataset " + ds.name + ": duplicate pair (" +
                               ds.items[i].item_id + ", " +
                               std::to_string(ds.items[i].category_id) + ")");
}

std::string dataset_line(const LabeledImage &img) {
  json obj;
  obj["id"] = img.item_id;
  obj["image_ref"] = img.image_ref;
  obj["category"] = img.category_id;
  if (img.confidence)
    obj["confidence"] = *img.confidence;
  obj["provenance"] = provenance_field(img.provenance);
  return obj.dump();
}

void write_dataset_file(const LabeledDataset &ds, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto &img : ds.items)
    out << dataset_line(img) << '\n';
  out.close();
  if (out.fail())
    throw std::runtime_error("write failed: " + path);
}

LabeledDataset read_dataset_file(const std::string &path,
                                 const std::string &name) {
  LabeledDataset ds;
  ds.name = name;
  for_each_line(path, [&](size_t line_no, const std::string &line) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("id") ||
        !obj.contains("category"))
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": bad dataset record");
    LabeledImage img;
    img.item_id = obj["id"].get<std::string>();
    img.image_ref = json_string_or(obj, "image_ref");
    img.category_id = obj["category"].get<int>();
    if (obj.contains("confidence") && !obj["confidence"].is_null())
      img.confidence = obj["confidence"].get<double>();
    img.provenance = parse_provenance_field(json_string_or(obj, "provenance"));
    ds.items.push_back(std::move(img));
  });
  finalize_dataset(ds);
  return ds;
}

} // namespace webaug
