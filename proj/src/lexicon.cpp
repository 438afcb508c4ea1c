#include "webaug/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "webaug/jsonl.hpp"

namespace webaug {

namespace {

// Decodes one UTF-8 scalar at s[i]. Returns (codepoint, length); an invalid
// sequence is reported as the single raw byte with length 1 so that
// normalization is a total, idempotent function on arbitrary bytes.
std::pair<uint32_t, size_t> decode_utf8(std::string_view s, size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80)
    return {b0, 1};
  auto cont = [&](size_t k) {
    return i + k < s.size() &&
           (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  auto cb = [&](size_t k) {
    return static_cast<uint32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F);
  };
  if ((b0 & 0xE0) == 0xC0 && cont(1))
    return {(static_cast<uint32_t>(b0 & 0x1F) << 6) | cb(1), 2};
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2))
    return {(static_cast<uint32_t>(b0 & 0x0F) << 12) | (cb(1) << 6) | cb(2), 3};
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3))
    return {(static_cast<uint32_t>(b0 & 0x07) << 18) | (cb(1) << 12) |
                (cb(2) << 6) | cb(3),
            4};
  return {b0, 1}; // invalid lead or truncated sequence: pass the byte through
}

void encode_utf8(uint32_t cp, std::string &out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Case folding over the cased scripts of the lexicon's twelve languages
// (Latin, Greek, Cyrillic). Uncased scripts map to themselves.
uint32_t fold_codepoint(uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z')
    return cp + 32;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) // Latin-1 capitals, not x
    return cp + 32;
  if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) // Greek capitals
    return cp + 32;
  if (cp == 0x03C2) // final sigma folds to sigma
    return 0x03C3;
  if (cp >= 0x0410 && cp <= 0x042F) // Cyrillic capitals
    return cp + 32;
  if (cp >= 0x0400 && cp <= 0x040F) // Cyrillic supplements
    return cp + 80;
  return cp;
}

bool is_space_codepoint(uint32_t cp) {
  switch (cp) {
  case ' ':
  case '\t':
  case '\n':
  case '\r':
  case '\f':
  case '\v':
  case 0x00A0:
  case 0x1680:
  case 0x2028:
  case 0x2029:
  case 0x202F:
  case 0x205F:
  case 0x3000:
    return true;
  default:
    return cp >= 0x2000 && cp <= 0x200A;
  }
}

} // namespace

std::string normalize_phrase(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  bool seen_any = false;
  size_t i = 0;
  while (i < raw.size()) {
    auto [cp, len] = decode_utf8(raw, i);
    i += len;
    if (is_space_codepoint(cp)) {
      pending_space = seen_any;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    encode_utf8(fold_codepoint(cp), out);
    seen_any = true;
  }
  return out;
}

const Category *Lexicon::find(int category_id) const {
  auto it = std::lower_bound(
      categories.begin(), categories.end(), category_id,
      [](const Category &c, int id) { return c.id < id; });
  if (it == categories.end() || it->id != category_id)
    return nullptr;
  return &*it;
}

Lexicon build_lexicon(std::vector<Category> raw_categories) {
  Lexicon lex;
  lex.categories = std::move(raw_categories);
  std::sort(lex.categories.begin(), lex.categories.end(),
            [](const Category &a, const Category &b) { return a.id < b.id; });

  for (size_t i = 0; i < lex.categories.size(); ++i) {
    Category &cat = lex.categories[i];
    if (i > 0 && cat.id == lex.categories[i - 1].id)
      throw std::runtime_error("duplicate category id " +
                               std::to_string(cat.id));
    if (cat.id != static_cast<int>(i) + 1)
      throw std::runtime_error("category ids must be contiguous 1..C; got " +
                               std::to_string(cat.id) + " at position " +
                               std::to_string(i + 1));

    std::set<std::pair<std::string, std::string>> seen;
    std::vector<Phrase> kept;
    for (Phrase &p : cat.phrases) {
      std::string normalized = normalize_phrase(p.text);
      if (normalized.empty())
        continue;
      if (seen.emplace(normalized, p.lang).second)
        kept.push_back({std::move(normalized), p.lang});
    }
    if (kept.empty())
      throw std::runtime_error("category " + std::to_string(cat.id) + " (" +
                               cat.name + ") has no usable phrases");
    std::sort(kept.begin(), kept.end(), [](const Phrase &a, const Phrase &b) {
      return a.text != b.text ? a.text < b.text : a.lang < b.lang;
    });
    cat.phrases = std::move(kept);
  }
  return lex;
}

Lexicon parse_lexicon(const std::string &text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded())
    throw std::runtime_error("lexicon: invalid JSON");
  const json *cats = nullptr;
  if (doc.is_array())
    cats = &doc;
  else if (doc.is_object() && doc.contains("categories"))
    cats = &doc["categories"];
  else
    throw std::runtime_error("lexicon: expected an array of categories");

  std::vector<Category> raw;
  for (const json &c : *cats) {
    Category cat;
    if (!c.contains("id") || !c["id"].is_number_integer())
      throw std::runtime_error("lexicon: category without integer id");
    cat.id = c["id"].get<int>();
    cat.name = json_string_or(c, "name");
    if (c.contains("phrases"))
      for (const json &p : c["phrases"])
        cat.phrases.push_back(
            {json_string_or(p, "text"), json_string_or(p, "lang")});
    raw.push_back(std::move(cat));
  }
  return build_lexicon(std::move(raw));
}

Lexicon load_lexicon(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open lexicon file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lexicon(buf.str());
}

void save_lexicon(const Lexicon &lexicon, const std::string &path) {
  json cats = json::array();
  for (const Category &c : lexicon.categories) {
    json phrases = json::array();
    for (const Phrase &p : c.phrases)
      phrases.push_back({{"text", p.text}, {"lang", p.lang}});
    cats.push_back({{"id", c.id}, {"name", c.name}, {"phrases", phrases}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  out << cats.dump(2) << '\n';
  out.close();
  if (out.fail())
    throw std::runtime_error("write failed: " + path);
}

} // namespace webaug
