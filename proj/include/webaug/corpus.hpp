#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace webaug {

// The four textual metadata fields carried by a crawled image, in their
// canonical order: anchor text, alt text, page title, surrounding text.
enum class FieldType : int { anchor = 0, alt = 1, title = 2, surrounding = 3 };

inline constexpr std::array<FieldType, 4> kAllFields = {
    FieldType::anchor, FieldType::alt, FieldType::title, FieldType::surrounding};

const char *to_string(FieldType f);
std::optional<FieldType> field_type_from_string(std::string_view s);

// One crawled image together with its metadata. Text fields may be empty,
// but a valid item has at least one non-empty field. The domain is the
// record's declared registrable domain, lowercase and non-empty; it is taken
// as given, never re-derived from image_ref.
struct WebDataItem {
  std::string item_id;
  std::string image_ref;
  std::string anchor_text;
  std::string alt_text;
  std::string page_title;
  std::string surrounding_text;
  std::string domain;

  const std::string &field(FieldType f) const {
    switch (f) {
    case FieldType::anchor:
      return anchor_text;
    case FieldType::alt:
      return alt_text;
    case FieldType::title:
      return page_title;
    default:
      return surrounding_text;
    }
  }

  bool has_any_text() const {
    return !anchor_text.empty() || !alt_text.empty() || !page_title.empty() ||
           !surrounding_text.empty();
  }
};

// One non-empty metadata field, decoupled from its item for text
// classification. text is never empty.
struct TextRecord {
  std::string item_id;
  FieldType field_type;
  std::string text;
  std::string domain;
};

struct UnlabeledImageRef {
  std::string item_id;
  std::string image_ref;
};

// Streaming reader over a line-delimited corpus. Memory per item is constant;
// malformed lines are skipped and counted, with one message per skip.
class CorpusReader {
public:
  explicit CorpusReader(std::istream &in) : in_(in) {}

  std::optional<WebDataItem> next();

  size_t lines_read() const { return line_no_; }
  size_t skipped() const { return skipped_; }
  const std::vector<std::string> &skip_messages() const { return skip_messages_; }

private:
  std::istream &in_;
  size_t line_no_ = 0;
  size_t skipped_ = 0;
  std::vector<std::string> skip_messages_;
};

// File-backed CorpusReader. Throws std::runtime_error if the file cannot be
// opened.
class CorpusFileReader {
public:
  explicit CorpusFileReader(const std::string &path);

  std::optional<WebDataItem> next() { return reader_->next(); }
  size_t skipped() const { return reader_->skipped(); }
  const std::vector<std::string> &skip_messages() const {
    return reader_->skip_messages();
  }

private:
  std::ifstream file_;
  std::unique_ptr<CorpusReader> reader_;
};

// Parses one corpus line. Returns nullopt and fills *err for malformed
// records (bad JSON, missing id or domain, all four text fields empty).
std::optional<WebDataItem> parse_corpus_line(const std::string &line,
                                             std::string *err);
std::string corpus_line(const WebDataItem &item);

std::vector<WebDataItem> read_corpus_file(const std::string &path,
                                          size_t *skipped = nullptr);
void write_corpus_file(const std::string &path,
                       const std::vector<WebDataItem> &items);

std::vector<UnlabeledImageRef> read_unlabeled_file(const std::string &path);
void write_unlabeled_file(const std::string &path,
                          const std::vector<UnlabeledImageRef> &refs);

// One TextRecord per non-empty field, in canonical field order.
std::vector<TextRecord> expand_records(const WebDataItem &item);

// In-memory id -> item index for stat attribution and text-set building.
class CorpusIndex {
public:
  CorpusIndex() = default;
  explicit CorpusIndex(std::vector<WebDataItem> items);
  static CorpusIndex from_file(const std::string &path);

  const WebDataItem *find(const std::string &item_id) const;
  const std::vector<WebDataItem> &items() const { return items_; }
  size_t size() const { return items_.size(); }

private:
  std::vector<WebDataItem> items_;
  std::unordered_map<std::string, size_t> by_id_;
};

} // namespace webaug
