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

#include "mtboot/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "mtboot/error.h"
#include "mtboot/random.h"
#include "mtboot/strings.h"

namespace mtboot {
namespace {

bool IsValidToken(std::string_view token) {
  return !token.empty() && !ContainsWhitespace(token) &&
         token.find_first_of("[]") == std::string_view::npos;
}

bool IsValidSlotType(std::string_view type) {
  return !type.empty() && !ContainsWhitespace(type) &&
         type.find_first_of("[](){}") == std::string_view::npos;
}

bool IsValidField(std::string_view field) {
  return !field.empty() && field.find_first_of("\t\n\r") == std::string_view::npos;
}

std::ifstream OpenForRead(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

}  // namespace

void Utterance::Validate() const {
  if (!IsValidField(id)) throw InvariantError("utterance id is empty");
  if (!IsValidField(domain) || !IsValidField(intent)) {
    throw InvariantError(id + ": domain and intent must be non-empty");
  }
  if (tokens.empty()) throw InvariantError(id + ": no tokens");
  for (const std::string& token : tokens) {
    if (!IsValidToken(token)) {
      throw InvariantError(id + ": invalid token '" + token + "'");
    }
  }
  int previous_end = 0;
  for (const SlotSpan& slot : slots) {
    if (!IsValidSlotType(slot.slot_type)) {
      throw InvariantError(id + ": invalid slot type '" + slot.slot_type + "'");
    }
    if (slot.start < previous_end || slot.start >= slot.end ||
        slot.end > static_cast<int>(tokens.size())) {
      throw InvariantError(id + ": slot spans overlap, are unsorted, or out of range");
    }
    if (slot.value != SpanValue(tokens, slot.start, slot.end)) {
      throw InvariantError(id + ": slot value '" + slot.value +
                           "' disagrees with its tokens");
    }
    previous_end = slot.end;
  }
}

std::string SpanValue(const Tokens& tokens, int start, int end) {
  return Join(std::span<const std::string>(tokens).subspan(start, end - start),
              " ");
}

SlotSpan MakeSlot(const Tokens& tokens, std::string slot_type, int start,
                  int end) {
  if (start < 0 || start >= end || end > static_cast<int>(tokens.size())) {
    throw InvariantError("slot span out of range");
  }
  return SlotSpan{std::move(slot_type), start, end,
                  SpanValue(tokens, start, end)};
}

Utterance ReplaceSlotTokens(const Utterance& utterance, size_t slot_index,
                            std::span<const std::string> replacement) {
  if (slot_index >= utterance.slots.size() || replacement.empty()) {
    throw InvariantError("bad slot replacement");
  }
  Utterance out = utterance;
  const SlotSpan& old = utterance.slots[slot_index];
  const int delta = static_cast<int>(replacement.size()) - old.length();
  out.tokens.clear();
  out.tokens.insert(out.tokens.end(), utterance.tokens.begin(),
                    utterance.tokens.begin() + old.start);
  out.tokens.insert(out.tokens.end(), replacement.begin(), replacement.end());
  out.tokens.insert(out.tokens.end(), utterance.tokens.begin() + old.end,
                    utterance.tokens.end());
  SlotSpan& slot = out.slots[slot_index];
  slot.end = slot.start + static_cast<int>(replacement.size());
  slot.value = SpanValue(out.tokens, slot.start, slot.end);
  for (size_t i = slot_index + 1; i < out.slots.size(); ++i) {
    out.slots[i].start += delta;
    out.slots[i].end += delta;
  }
  return out;
}

Utterance ParseAnnotatedLine(std::string_view line, int line_number,
                             std::string_view language) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const std::vector<std::string> fields = Split(line, '\t');
  if (fields.size() != 4) {
    throw ParseError("expected 4 tab-separated fields, got " +
                         std::to_string(fields.size()),
                     line_number);
  }
  Utterance u;
  u.id = fields[0];
  u.domain = fields[1];
  u.intent = fields[2];
  u.language = std::string(language);
  if (u.id.empty() || u.domain.empty() || u.intent.empty()) {
    throw ParseError("empty id, domain or intent", line_number);
  }

  int open_start = -1;  // token index of the pending '['
  for (std::string word : SplitWhitespace(fields[3])) {
    if (!word.empty() && word.front() == '[') {
      if (open_start >= 0) throw ParseError("nested '['", line_number);
      word.erase(0, 1);
      open_start = static_cast<int>(u.tokens.size());
    }
    std::optional<std::string> closes;
    const size_t close = word.find("](");
    if (close != std::string::npos) {
      if (open_start < 0) throw ParseError("']' without '['", line_number);
      if (word.back() != ')') throw ParseError("malformed slot label", line_number);
      closes = word.substr(close + 2, word.size() - close - 3);
      word.resize(close);
      if (!IsValidSlotType(*closes)) {
        throw ParseError("invalid slot type '" + *closes + "'", line_number);
      }
    }
    if (word.empty()) {
      // "[](X)", "[ a](X)" or "a ](X)"
      throw ParseError("empty token inside slot brackets", line_number);
    }
    if (!IsValidToken(word)) {
      throw ParseError("stray bracket in token '" + word + "'", line_number);
    }
    u.tokens.push_back(std::move(word));
    if (closes) {
      const int end = static_cast<int>(u.tokens.size());
      u.slots.push_back(SlotSpan{std::move(*closes), open_start, end,
                                 SpanValue(u.tokens, open_start, end)});
      open_start = -1;
    }
  }
  if (open_start >= 0) throw ParseError("unclosed '['", line_number);
  if (u.tokens.empty()) throw ParseError("no tokens", line_number);
  return u;
}

std::string FormatMarkup(const Utterance& utterance) {
  std::string out;
  size_t next_slot = 0;
  for (size_t i = 0; i < utterance.tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    const SlotSpan* slot = next_slot < utterance.slots.size()
                               ? &utterance.slots[next_slot]
                               : nullptr;
    if (slot != nullptr && static_cast<int>(i) == slot->start) out.push_back('[');
    out.append(utterance.tokens[i]);
    if (slot != nullptr && static_cast<int>(i) + 1 == slot->end) {
      out.append("](").append(slot->slot_type).push_back(')');
      ++next_slot;
    }
  }
  return out;
}

std::string SerializeUtterance(const Utterance& utterance) {
  return utterance.id + '\t' + utterance.domain + '\t' + utterance.intent +
         '\t' + FormatMarkup(utterance);
}

std::vector<Utterance> ReadCorpus(std::istream& in, std::string_view language) {
  std::vector<Utterance> corpus;
  std::set<std::string> seen;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (StripAsciiWhitespace(line).empty() || line.front() == '#') continue;
    Utterance u = ParseAnnotatedLine(line, line_number, language);
    if (!seen.insert(u.id).second) {
      throw ParseError("duplicate id '" + u.id + "'", line_number);
    }
    corpus.push_back(std::move(u));
  }
  return corpus;
}

std::vector<Utterance> LoadCorpus(const std::string& path,
                                  std::string_view language) {
  std::ifstream in = OpenForRead(path);
  return ReadCorpus(in, language);
}

void WriteCorpus(std::ostream& out, std::span<const Utterance> corpus) {
  for (const Utterance& u : corpus) out << SerializeUtterance(u) << '\n';
}

void SaveCorpus(const std::string& path, std::span<const Utterance> corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  WriteCorpus(out, corpus);
}

void Catalog::Validate() const {
  if (!IsValidSlotType(slot_type)) {
    throw InvariantError("catalog has invalid slot type '" + slot_type + "'");
  }
  bool any_positive = false;
  for (const CatalogEntry& entry : entries) {
    if (entry.tokens.empty()) throw InvariantError("empty catalog entry");
    if (!(entry.weight >= 0.0) || std::isinf(entry.weight)) {
      throw InvariantError("catalog weight must be finite and >= 0");
    }
    any_positive = any_positive || entry.weight > 0.0;
  }
  if (!any_positive) {
    throw InvariantError("catalog " + slot_type + " has no positive weight");
  }
}

std::vector<double> Catalog::weights() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const CatalogEntry& entry : entries) out.push_back(entry.weight);
  return out;
}

Catalog ReadCatalog(std::istream& in) {
  Catalog catalog;
  std::string line;
  int line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      constexpr std::string_view kPrefix = "#slot_type=";
      if (line.rfind(kPrefix, 0) != 0) {
        throw FormatError("expected '#slot_type=<name>' header", line_number);
      }
      catalog.slot_type = std::string(StripAsciiWhitespace(
          std::string_view(line).substr(kPrefix.size())));
      if (!IsValidSlotType(catalog.slot_type)) {
        throw FormatError("invalid slot type in header", line_number);
      }
      have_header = true;
      continue;
    }
    if (StripAsciiWhitespace(line).empty()) continue;
    const std::vector<std::string> fields = Split(line, '\t');
    if (fields.size() > 2) throw FormatError("too many fields", line_number);
    CatalogEntry entry;
    entry.tokens = SplitWhitespace(AsciiLower(fields[0]));
    if (entry.tokens.empty()) throw FormatError("empty value", line_number);
    for (const std::string& token : entry.tokens) {
      if (!IsValidToken(token)) {
        throw FormatError("invalid token '" + token + "'", line_number);
      }
    }
    if (fields.size() == 2) {
      if (!ParseDouble(fields[1], &entry.weight) || std::isinf(entry.weight)) {
        throw FormatError("unparsable weight '" + fields[1] + "'", line_number);
      }
      if (entry.weight < 0.0) throw FormatError("negative weight", line_number);
    }
    catalog.entries.push_back(std::move(entry));
  }
  if (!have_header) throw FormatError("empty catalog file", 0);
  if (catalog.entries.empty()) throw FormatError("catalog has no entries", 0);
  try {
    catalog.Validate();
  } catch (const InvariantError& e) {
    throw FormatError(e.what(), 0);
  }
  return catalog;
}

Catalog LoadCatalog(const std::string& path) {
  std::ifstream in = OpenForRead(path);
  try {
    return ReadCatalog(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what(), e.line());
  }
}

void WriteCatalog(std::ostream& out, const Catalog& catalog) {
  out << "#slot_type=" << catalog.slot_type << '\n';
  for (const CatalogEntry& entry : catalog.entries) {
    out << Join(entry.tokens, " ") << '\t' << FormatDouble(entry.weight) << '\n';
  }
}

CatalogMap LoadCatalogs(std::span<const std::string> paths) {
  CatalogMap catalogs;
  for (const std::string& path : paths) {
    Catalog catalog = LoadCatalog(path);
    const std::string type = catalog.slot_type;
    if (!catalogs.emplace(type, std::move(catalog)).second) {
      throw ConfigError("two catalogs for slot type " + type);
    }
  }
  return catalogs;
}

std::optional<std::string> PlaceholderType(std::string_view token) {
  if (token.size() < 3 || token.front() != '{' || token.back() != '}') {
    return std::nullopt;
  }
  return std::string(token.substr(1, token.size() - 2));
}

GrammarTemplate ParseGrammarLine(std::string_view line, int line_number) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const std::vector<std::string> fields = Split(line, '\t');
  if (fields.size() != 4) {
    throw ParseError("expected 4 tab-separated fields", line_number);
  }
  GrammarTemplate t;
  t.intent = fields[0];
  t.domain = fields[1];
  if (!ParseDouble(fields[2], &t.weight) || !(t.weight > 0.0) ||
      std::isinf(t.weight)) {
    throw ParseError("template weight must be a positive number", line_number);
  }
  t.pattern = SplitWhitespace(fields[3]);
  if (t.intent.empty() || t.domain.empty() || t.pattern.empty()) {
    throw ParseError("empty intent, domain or pattern", line_number);
  }
  for (const std::string& token : t.pattern) {
    if (PlaceholderType(token)) continue;
    if (!IsValidToken(token)) {
      throw ParseError("invalid token '" + token + "'", line_number);
    }
  }
  return t;
}

std::vector<GrammarTemplate> ReadGrammar(std::istream& in) {
  std::vector<GrammarTemplate> templates;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (StripAsciiWhitespace(line).empty() || line.front() == '#') continue;
    templates.push_back(ParseGrammarLine(line, line_number));
  }
  return templates;
}

std::vector<GrammarTemplate> LoadGrammar(const std::string& path) {
  std::ifstream in = OpenForRead(path);
  return ReadGrammar(in);
}

std::vector<Utterance> SampleGrammar(std::span<const GrammarTemplate> templates,
                                     const CatalogMap& catalogs, size_t n,
                                     uint64_t seed, std::string_view language,
                                     std::string_view id_prefix) {
  std::vector<Utterance> out;
  if (n == 0) return out;
  if (templates.empty()) throw ConfigError("no grammar templates");

  std::map<std::string, WeightedSampler> entry_samplers;
  std::vector<double> template_weights;
  for (const GrammarTemplate& t : templates) {
    template_weights.push_back(t.weight);
    for (const std::string& token : t.pattern) {
      std::optional<std::string> type = PlaceholderType(token);
      if (!type || entry_samplers.count(*type)) continue;
      auto it = catalogs.find(*type);
      if (it == catalogs.end()) {
        throw ConfigError("placeholder {" + *type + "} has no catalog");
      }
      it->second.Validate();
      entry_samplers.emplace(*type, WeightedSampler(it->second.weights()));
    }
  }
  const WeightedSampler template_sampler(template_weights);
  const size_t width = std::to_string(n - 1).size();

  Rng rng(seed);
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const GrammarTemplate& t = templates[template_sampler.Sample(rng)];
    Utterance u;
    std::string index = std::to_string(i);
    u.id = std::string(id_prefix) + std::string(width - index.size(), '0') + index;
    u.language = std::string(language);
    u.domain = t.domain;
    u.intent = t.intent;
    for (const std::string& token : t.pattern) {
      std::optional<std::string> type = PlaceholderType(token);
      if (!type) {
        u.tokens.push_back(token);
        continue;
      }
      const Catalog& catalog = catalogs.at(*type);
      const CatalogEntry& entry =
          catalog.entries[entry_samplers.at(*type).Sample(rng)];
      const int start = static_cast<int>(u.tokens.size());
      u.tokens.insert(u.tokens.end(), entry.tokens.begin(), entry.tokens.end());
      u.slots.push_back(MakeSlot(u.tokens, *type, start,
                                 static_cast<int>(u.tokens.size())));
    }
    u.Validate();
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace mtboot
