#pragma once

#include <functional>
#include <istream>
#include <string>

#include <json.hpp>

namespace taskdisc {

using json = nlohmann::json;

// Streams one parsed JSON object per non-blank line. `on_bad_json` builds the
// exception to throw when a line fails to parse; records are handed to `fn`
// together with their 1-based line number.
inline void for_each_jsonl(std::istream& in,
                           const std::function<void(size_t, const json&)>& fn,
                           const std::function<void(size_t, const std::string&)>& on_bad_json) {
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      on_bad_json(line_no, line);
      continue;
    }
    fn(line_no, record);
  }
}

}  // namespace taskdisc
