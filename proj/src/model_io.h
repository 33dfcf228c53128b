//
// Copyright 2026 The mtboot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef MTBOOT_SRC_MODEL_IO_H_
#define MTBOOT_SRC_MODEL_IO_H_

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mtboot/error.h"
#include "mtboot/strings.h"

namespace mtboot::internal {

// Line reader that tracks line numbers for error messages.
class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::string Line() {
    std::string line;
    ++line_number_;
    if (!std::getline(in_, line)) throw FormatError("truncated model file", line_number_);
    return line;
  }

  // Reads `<key> <value>` and returns the value.
  std::string Field(const std::string& key) {
    const std::string line = Line();
    if (line.rfind(key + " ", 0) != 0) {
      throw FormatError("expected '" + key + "'", line_number_);
    }
    return line.substr(key.size() + 1);
  }

  size_t Count(const std::string& key) {
    long long value = 0;
    if (!ParseInt(Field(key), &value) || value < 0) {
      throw FormatError("bad count for '" + key + "'", line_number_);
    }
    return static_cast<size_t>(value);
  }

  double Number(const std::string& key) { return ParseNumber(Field(key)); }

  double ParseNumber(const std::string& text) {
    double value = 0.0;
    if (!ParseDouble(text, &value)) {
      throw FormatError("bad number '" + text + "'", line_number_);
    }
    return value;
  }

  std::vector<std::string> Lines(const std::string& key) {
    const size_t count = Count(key);
    std::vector<std::string> lines;
    lines.reserve(count);
    for (size_t i = 0; i < count; ++i) lines.push_back(Line());
    return lines;
  }

  std::vector<double> Numbers(const std::string& key) {
    const size_t count = Count(key);
    std::vector<double> values;
    values.reserve(count);
    for (size_t i = 0; i < count; ++i) values.push_back(ParseNumber(Line()));
    return values;
  }

  int* line_number() { return &line_number_; }
  std::istream& stream() { return in_; }

 private:
  std::istream& in_;
  int line_number_ = 0;
};

inline void WriteLines(std::ostream& out, const std::string& key,
                       std::span<const std::string> lines) {
  out << key << ' ' << lines.size() << '\n';
  for (const std::string& line : lines) out << line << '\n';
}

inline void WriteNumbers(std::ostream& out, const std::string& key,
                         std::span<const double> values) {
  out << key << ' ' << values.size() << '\n';
  for (double value : values) out << FormatDouble(value) << '\n';
}

}  // namespace mtboot::internal

#endif  // MTBOOT_SRC_MODEL_IO_H_
