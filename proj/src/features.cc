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

#include "mtboot/features.h"

#include <algorithm>
#include <istream>
#include <ostream>

#include "mtboot/error.h"
#include "mtboot/strings.h"

namespace mtboot {
namespace {

constexpr const char* kBos = "<s>";
constexpr const char* kEos = "</s>";

const std::string& TokenAt(const Tokens& tokens, long position) {
  static const std::string bos = kBos;
  static const std::string eos = kEos;
  if (position < 0) return bos;
  if (position >= static_cast<long>(tokens.size())) return eos;
  return tokens[position];
}

}  // namespace

Gazetteer::Gazetteer(const CatalogMap& catalogs) {
  for (const auto& [type, catalog] : catalogs) {
    for (const CatalogEntry& entry : catalog.entries) Add(type, entry.tokens);
  }
}

void Gazetteer::Add(const std::string& slot_type, const Tokens& entry) {
  if (entry.empty()) return;
  auto [it, inserted] = entries_.emplace(slot_type, entry);
  if (inserted) by_first_token_[entry.front()].push_back(*it);
}

std::vector<std::set<std::string>> Gazetteer::Match(const Tokens& tokens) const {
  std::vector<std::set<std::string>> out(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    auto it = by_first_token_.find(tokens[i]);
    if (it == by_first_token_.end()) continue;
    for (const auto& [type, words] : it->second) {
      if (i + words.size() > tokens.size()) continue;
      if (!std::equal(words.begin(), words.end(), tokens.begin() + i)) continue;
      for (size_t k = i; k < i + words.size(); ++k) out[k].insert(type);
    }
  }
  return out;
}

void Gazetteer::Write(std::ostream& out) const {
  out << "gazetteer " << entries_.size() << '\n';
  for (const auto& [type, tokens] : entries_) {
    out << type << '\t' << Join(tokens, " ") << '\n';
  }
}

Gazetteer Gazetteer::Read(std::istream& in, int* line_number) {
  std::string line;
  ++*line_number;
  long long count = 0;
  if (!std::getline(in, line) || line.rfind("gazetteer ", 0) != 0 ||
      !ParseInt(line.substr(10), &count) || count < 0) {
    throw FormatError("expected 'gazetteer <count>'", *line_number);
  }
  Gazetteer gazetteer;
  for (long long i = 0; i < count; ++i) {
    ++*line_number;
    if (!std::getline(in, line)) throw FormatError("truncated gazetteer", *line_number);
    const std::vector<std::string> fields = Split(line, '\t');
    if (fields.size() != 2) throw FormatError("bad gazetteer entry", *line_number);
    gazetteer.Add(fields[0], SplitWhitespace(fields[1]));
  }
  return gazetteer;
}

std::vector<std::vector<std::string>> ExtractSequenceFeatures(
    const Tokens& tokens, const Gazetteer& gazetteer) {
  const std::vector<std::set<std::string>> matches = gazetteer.Match(tokens);
  std::vector<std::vector<std::string>> out(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    std::vector<std::string>& features = out[i];
    features.reserve(16);
    features.push_back("bias");
    const long pos = static_cast<long>(i);
    features.push_back("w0=" + tokens[i]);
    features.push_back("w-1=" + TokenAt(tokens, pos - 1));
    features.push_back("w+1=" + TokenAt(tokens, pos + 1));
    features.push_back("w-2=" + TokenAt(tokens, pos - 2));
    features.push_back("w+2=" + TokenAt(tokens, pos + 2));
    const std::string& token = tokens[i];
    const size_t length = Utf8Length(token);
    for (size_t k = 1; k <= 3 && k <= length; ++k) {
      features.push_back("p" + std::to_string(k) + "=" +
                         token.substr(0, Utf8PrefixBytes(token, k)));
      features.push_back("s" + std::to_string(k) + "=" +
                         token.substr(Utf8PrefixBytes(token, length - k)));
    }
    for (const std::string& type : matches[i]) features.push_back("gaz:" + type);
  }
  return out;
}

std::vector<std::string> ExtractFeatures(const Tokens& tokens, size_t position,
                                         const Gazetteer& gazetteer) {
  if (position >= tokens.size()) throw InvariantError("position out of range");
  return ExtractSequenceFeatures(tokens, gazetteer)[position];
}

std::vector<std::string> ExtractFeatures(const Tokens& tokens, size_t position,
                                         const CatalogMap& gazetteers) {
  return ExtractFeatures(tokens, position, Gazetteer(gazetteers));
}

std::vector<std::string> ExtractIntentFeatures(const Tokens& tokens,
                                               const Gazetteer& gazetteer) {
  std::vector<std::string> features;
  features.push_back("bias");
  for (size_t i = 0; i < tokens.size(); ++i) {
    features.push_back("w=" + tokens[i]);
  }
  for (long i = -1; i < static_cast<long>(tokens.size()); ++i) {
    features.push_back("bi=" + TokenAt(tokens, i) + "|" + TokenAt(tokens, i + 1));
  }
  for (const std::set<std::string>& types : gazetteer.Match(tokens)) {
    for (const std::string& type : types) features.push_back("gaz=" + type);
  }
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  return features;
}

int FeatureIndex::Add(const std::string& feature) {
  auto [it, inserted] = ids_.emplace(feature, static_cast<int>(names_.size()));
  if (inserted) names_.push_back(feature);
  return it->second;
}

std::optional<int> FeatureIndex::Find(const std::string& feature) const {
  auto it = ids_.find(feature);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> FeatureIndex::Lookup(
    const std::vector<std::string>& features) const {
  std::vector<int> ids;
  ids.reserve(features.size());
  for (const std::string& feature : features) {
    auto it = ids_.find(feature);
    if (it != ids_.end()) ids.push_back(it->second);
  }
  return ids;
}

}  // namespace mtboot
