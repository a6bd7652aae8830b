#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include "json.hpp"
#include "lobbylink/error.hpp"

namespace lobbylink::corpus::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Position of a record, carried into every validation message.
struct Where {
  const std::filesystem::path* path;
  std::size_t line;

  std::string str() const { return path->string() + ":" + std::to_string(line); }
};

[[noreturn]] inline void fail(ErrorKind kind, const Where& w, const std::string& msg) {
  throw Error(kind, w.str() + ": " + msg);
}

/// Calls `fn(record, where)` for every non-blank line of a JSONL file.
inline void for_each_record(const std::filesystem::path& path,
                            const std::function<void(const json&, const Where&)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Where where{&path, lineno};
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::parse, where, std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) fail(ErrorKind::parse, where, "record is not an object");
    fn(record, where);
  }
}

inline std::string req_string(const json& j, const char* key, const Where& w) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    fail(ErrorKind::parse, w, std::string("missing or non-string field '") + key + "'");
  return it->get<std::string>();
}

inline std::optional<std::string> opt_string(const json& j, const char* key, const Where& w) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) fail(ErrorKind::parse, w, std::string("field '") + key + "' is not a string");
  return it->get<std::string>();
}

inline double req_number(const json& j, const char* key, const Where& w) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number())
    fail(ErrorKind::parse, w, std::string("missing or non-numeric field '") + key + "'");
  return it->get<double>();
}

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorKind::io, "cannot write " + path.string());
  }
  void write(const ordered_json& j) { out_ << j.dump() << '\n'; }

 private:
  std::ofstream out_;
};

}  // namespace lobbylink::corpus::detail
