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

#include "mtboot/eval.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "mtboot/error.h"
#include "mtboot/strings.h"

namespace mtboot {
namespace {

constexpr char kHeader[] = "# mtboot semer report v1";
constexpr char kColumns[] =
    "scope\tinsertions\tdeletions\tsubstitutions\tintent_errors\t"
    "reference_count\tutterances\tsemer";

void WriteRow(std::ostream& out, const std::string& scope,
              const SemerCounts& c) {
  out << scope << '\t' << c.insertions << '\t' << c.deletions << '\t'
      << c.substitutions << '\t' << c.intent_errors << '\t'
      << c.reference_count << '\t' << c.utterances << '\t'
      << FormatFixed(c.semer(), 4) << '\n';
}

}  // namespace

SemerCounts& SemerCounts::operator+=(const SemerCounts& other) {
  insertions += other.insertions;
  deletions += other.deletions;
  substitutions += other.substitutions;
  intent_errors += other.intent_errors;
  reference_count += other.reference_count;
  utterances += other.utterances;
  return *this;
}

SlotAlignment AlignSlots(std::span<const SlotSpan> reference,
                         std::span<const SlotSpan> hypothesis) {
  SlotAlignment result;
  std::vector<bool> ref_used(reference.size(), false);
  std::vector<bool> hyp_used(hypothesis.size(), false);
  for (size_t r = 0; r < reference.size(); ++r) {
    const std::string value = AsciiLower(reference[r].value);
    for (size_t h = 0; h < hypothesis.size(); ++h) {
      if (hyp_used[h] || hypothesis[h].slot_type != reference[r].slot_type ||
          AsciiLower(hypothesis[h].value) != value) {
        continue;
      }
      ref_used[r] = hyp_used[h] = true;
      ++result.matches;
      break;
    }
  }
  for (size_t r = 0; r < reference.size(); ++r) {
    if (ref_used[r]) continue;
    for (size_t h = 0; h < hypothesis.size(); ++h) {
      if (hyp_used[h] || hypothesis[h].slot_type != reference[r].slot_type) {
        continue;
      }
      ref_used[r] = hyp_used[h] = true;
      ++result.substitutions;
      break;
    }
    if (!ref_used[r]) ++result.deletions;
  }
  for (size_t h = 0; h < hypothesis.size(); ++h) {
    if (!hyp_used[h]) ++result.insertions;
  }
  return result;
}

SemerReport ComputeSemer(std::span<const Utterance> references,
                         const HypothesisMap& hypotheses) {
  std::string missing;
  for (const Utterance& ref : references) {
    if (!hypotheses.count(ref.id)) missing += (missing.empty() ? "" : ", ") + ref.id;
  }
  if (!missing.empty()) throw InvariantError("no hypothesis for: " + missing);

  SemerReport report;
  report.test_set = TestSetFingerprint(references);
  for (const Utterance& ref : references) {
    const NluHypothesis& hyp = hypotheses.at(ref.id);
    const SlotAlignment alignment = AlignSlots(ref.slots, hyp.slots);
    SemerCounts counts;
    counts.insertions = alignment.insertions;
    counts.deletions = alignment.deletions;
    counts.substitutions = alignment.substitutions;
    counts.intent_errors = hyp.intent == ref.intent ? 0 : 1;
    counts.reference_count = static_cast<long>(ref.slots.size()) + 1;
    counts.utterances = 1;
    report.overall += counts;
    report.per_domain[ref.domain] += counts;
  }
  return report;
}

HypothesisMap Recognize(const NluModels& models,
                        std::span<const Utterance> references) {
  HypothesisMap hypotheses;
  for (const Utterance& ref : references) {
    hypotheses.emplace(ref.id, models.Recognize(ref.tokens));
  }
  return hypotheses;
}

std::string TestSetFingerprint(std::span<const Utterance> references) {
  std::string all;
  for (const Utterance& ref : references) {
    all += SerializeUtterance(ref);
    all += '\n';
  }
  return FingerprintHex(all);
}

void WriteSemerReport(std::ostream& out, const SemerReport& report) {
  out << kHeader << '\n';
  out << "test_set\t" << report.test_set << '\n';
  out << kColumns << '\n';
  WriteRow(out, "overall", report.overall);
  for (const auto& [domain, counts] : report.per_domain) {
    WriteRow(out, "domain:" + domain, counts);
  }
}

SemerReport ReadSemerReport(std::istream& in) {
  SemerReport report;
  std::string line;
  int line_number = 0;
  bool have_overall = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (line_number == 1) {
      if (line != kHeader) throw FormatError("not a SemER report", line_number);
      continue;
    }
    if (line.empty() || line == kColumns) continue;
    const std::vector<std::string> fields = Split(line, '\t');
    if (fields[0] == "test_set" && fields.size() == 2) {
      report.test_set = fields[1];
      continue;
    }
    if (fields.size() != 8) throw FormatError("bad report row", line_number);
    SemerCounts counts;
    long* targets[] = {&counts.insertions,    &counts.deletions,
                       &counts.substitutions, &counts.intent_errors,
                       &counts.reference_count, &counts.utterances};
    for (int i = 0; i < 6; ++i) {
      long long value = 0;
      if (!ParseInt(fields[1 + i], &value) || value < 0) {
        throw FormatError("bad count '" + fields[1 + i] + "'", line_number);
      }
      *targets[i] = static_cast<long>(value);
    }
    if (fields[0] == "overall") {
      report.overall = counts;
      have_overall = true;
    } else if (fields[0].rfind("domain:", 0) == 0) {
      report.per_domain[fields[0].substr(7)] = counts;
    } else {
      throw FormatError("unknown scope '" + fields[0] + "'", line_number);
    }
  }
  if (!have_overall) throw FormatError("report has no overall row", 0);
  return report;
}

void SaveSemerReport(const std::string& path, const SemerReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  WriteSemerReport(out, report);
}

SemerReport LoadSemerReport(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return ReadSemerReport(in);
}

}  // namespace mtboot
