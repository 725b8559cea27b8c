#pragma once

#include <fstream>
#include <functional>
#include <string>

#include "json.hpp"

#include "dxtk/errors.hpp"

namespace dxtk {

// Calls fn(record, line_number) for every non-blank line. Parse failures name
// the file and 1-based line.
inline void read_jsonl(const std::string& path,
                       const std::function<void(nlohmann::json&&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": invalid JSON record");
    }
    fn(std::move(record), lineno);
  }
}

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path) : out_(path) {
    if (!out_) throw DataError("cannot open file for writing: " + path);
  }

  void write(const nlohmann::json& record) { out_ << record.dump() << '\n'; }

  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

}  // namespace dxtk
