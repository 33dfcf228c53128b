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

#ifndef MTBOOT_CORPUS_H_
#define MTBOOT_CORPUS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mtboot {

using Tokens = std::vector<std::string>;

// A typed, contiguous token range [start, end) of an utterance. `value` is
// the space-joined surface form of the covered tokens.
struct SlotSpan {
  std::string slot_type;
  int start = 0;
  int end = 0;
  std::string value;

  int length() const { return end - start; }
  bool operator==(const SlotSpan&) const = default;
};

// One annotated utterance. Spans are sorted, non-overlapping, and their
// values agree with the tokens they cover; see Validate().
struct Utterance {
  std::string id;
  std::string language;
  std::string domain;
  std::string intent;
  Tokens tokens;
  std::vector<SlotSpan> slots;
  // Id of the utterance this one was translated from, if any.
  std::optional<std::string> source_id;

  // Throws InvariantError describing the first violated invariant.
  void Validate() const;

  // Id of the source-language utterance this one descends from; itself when
  // no provenance is recorded.
  const std::string& origin_id() const {
    return source_id ? *source_id : id;
  }

  bool operator==(const Utterance&) const = default;
};

// Builds a span over `tokens[start, end)` with its value filled in.
SlotSpan MakeSlot(const Tokens& tokens, std::string slot_type, int start,
                  int end);

std::string SpanValue(const Tokens& tokens, int start, int end);

// Replaces the tokens of `slots[slot_index]` by `replacement` and shifts every
// later span so the result stays consistent.
Utterance ReplaceSlotTokens(const Utterance& utterance, size_t slot_index,
                            std::span<const std::string> replacement);

// Corpus line: `id TAB domain TAB intent TAB markup`, where markup writes a
// slot as `[value tokens](SlotType)`. `line_number` only decorates errors.
Utterance ParseAnnotatedLine(std::string_view line, int line_number = 0,
                             std::string_view language = "");
std::string SerializeUtterance(const Utterance& utterance);
std::string FormatMarkup(const Utterance& utterance);

// Whole-corpus I/O. Blank lines and lines starting with '#' are skipped.
// Duplicate ids are a parse error.
std::vector<Utterance> ReadCorpus(std::istream& in,
                                  std::string_view language = "");
std::vector<Utterance> LoadCorpus(const std::string& path,
                                  std::string_view language = "");
void WriteCorpus(std::ostream& out, std::span<const Utterance> corpus);
void SaveCorpus(const std::string& path, std::span<const Utterance> corpus);

struct CatalogEntry {
  Tokens tokens;
  double weight = 1.0;
  bool operator==(const CatalogEntry&) const = default;
};

// Weighted list of known values for one slot type.
struct Catalog {
  std::string slot_type;
  std::vector<CatalogEntry> entries;

  void Validate() const;
  std::vector<double> weights() const;
};

using CatalogMap = std::map<std::string, Catalog>;

// Catalog file: first line `#slot_type=<name>`, then `<value> [TAB <weight>]`
// lines. Values are lowercased and whitespace-tokenized to match the
// spoken-form corpora.
Catalog ReadCatalog(std::istream& in);
Catalog LoadCatalog(const std::string& path);
void WriteCatalog(std::ostream& out, const Catalog& catalog);
CatalogMap LoadCatalogs(std::span<const std::string> paths);

// Grammar template: literal tokens and `{SlotType}` placeholders.
struct GrammarTemplate {
  std::string intent;
  std::string domain;
  Tokens pattern;
  double weight = 1.0;
};

// Returns the slot type if `token` is a `{SlotType}` placeholder.
std::optional<std::string> PlaceholderType(std::string_view token);

// Grammar file line: `intent TAB domain TAB weight TAB pattern`.
GrammarTemplate ParseGrammarLine(std::string_view line, int line_number = 0);
std::vector<GrammarTemplate> ReadGrammar(std::istream& in);
std::vector<GrammarTemplate> LoadGrammar(const std::string& path);

// Draws `n` annotated utterances: a template proportional to its weight, then
// each placeholder filled from its catalog proportional to entry weight. Ids
// are `<id_prefix><index>`. Throws ConfigError on unresolvable placeholders.
std::vector<Utterance> SampleGrammar(
    std::span<const GrammarTemplate> templates, const CatalogMap& catalogs,
    size_t n, uint64_t seed, std::string_view language = "",
    std::string_view id_prefix = "g");

}  // namespace mtboot

#endif  // MTBOOT_CORPUS_H_
