#pragma once

#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace webaug {

using json = nlohmann::json;

// Calls fn(line_number, line) for every line of the file, skipping a
// trailing empty line. Throws std::runtime_error if the file cannot be read.
inline void for_each_line(const std::string &path,
                          const std::function<void(size_t, const std::string &)> &fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    fn(line_no, line);
  }
}

class JsonlWriter {
public:
  explicit JsonlWriter(const std::string &path) : out_(path, std::ios::binary) {
    if (!out_)
      throw std::runtime_error("cannot open " + path + " for writing");
    path_ = path;
  }

  void write(const json &obj) {
    out_ << obj.dump() << '\n';
    if (!out_)
      throw std::runtime_error("write failed: " + path_);
  }

  void close() {
    out_.close();
    if (out_.fail())
      throw std::runtime_error("close failed: " + path_);
  }

private:
  std::ofstream out_;
  std::string path_;
};

inline std::string json_string_or(const json &obj, const char *key,
                                  const std::string &fallback = "") {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null())
    return fallback;
  return it->get<std::string>();
}

} // namespace webaug
