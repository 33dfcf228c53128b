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

#ifndef MTBOOT_FEATURES_H_
#define MTBOOT_FEATURES_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtboot/corpus.h"

namespace mtboot {

// Catalog entries indexed for n-gram lookup inside token sequences.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(const CatalogMap& catalogs);

  void Add(const std::string& slot_type, const Tokens& entry);

  // For each position, the slot types of every entry n-gram that covers it.
  std::vector<std::set<std::string>> Match(const Tokens& tokens) const;

  bool empty() const { return entries_.empty(); }

  void Write(std::ostream& out) const;
  // Reads what Write produced; `line_number` tracks the enclosing file.
  static Gazetteer Read(std::istream& in, int* line_number);

  bool operator==(const Gazetteer& other) const {
    return entries_ == other.entries_;
  }

 private:
  // (slot type, entry tokens), sorted and unique.
  std::set<std::pair<std::string, Tokens>> entries_;
  // First token -> (slot type, entry tokens).
  std::map<std::string, std::vector<std::pair<std::string, Tokens>>>
      by_first_token_;
};

// Token-level features at `position`: identities at offsets -2..+2 (padded
// past the edges), prefixes and suffixes up to 3 characters, and one
// `gaz:<type>` indicator per catalog n-gram covering the token.
std::vector<std::string> ExtractFeatures(const Tokens& tokens, size_t position,
                                         const Gazetteer& gazetteer);
std::vector<std::string> ExtractFeatures(const Tokens& tokens, size_t position,
                                         const CatalogMap& gazetteers);

// Features for every position, sharing one gazetteer match.
std::vector<std::vector<std::string>> ExtractSequenceFeatures(
    const Tokens& tokens, const Gazetteer& gazetteer);

// Bag of features for intent classification: bias, unigrams, bigrams with
// boundary markers, and gazetteer types present. Sorted, unique.
std::vector<std::string> ExtractIntentFeatures(const Tokens& tokens,
                                               const Gazetteer& gazetteer);

// Interns feature strings in first-seen order.
class FeatureIndex {
 public:
  int Add(const std::string& feature);
  std::optional<int> Find(const std::string& feature) const;
  size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  // Ids of known features; unknown ones are dropped.
  std::vector<int> Lookup(const std::vector<std::string>& features) const;

  bool operator==(const FeatureIndex& other) const {
    return names_ == other.names_;
  }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> names_;
};

}  // namespace mtboot

#endif  // MTBOOT_FEATURES_H_
