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

#include "mtboot/translate.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "mtboot/error.h"

namespace mtboot {
namespace {

TEST(CombinedScore, HandDotProduct) {
  const std::vector<double> c = {-1, -2, -3, 1};
  EXPECT_DOUBLE_EQ(CombinedScore(c, std::vector<double>{1, 1, 1, -1}), -7.0);
  EXPECT_EQ(CombinedScore(c, std::vector<double>{0, 0, 0, 0}), 0.0);
  EXPECT_EQ(CombinedScore(c, std::vector<double>{1, 0, 0, 0}), -1.0);
  EXPECT_THROW(CombinedScore(c, std::vector<double>{1, 1}), InvariantError);
}

TEST(ReadTranslations, DirectRead) {
  std::istringstream in(
      "u1\twie geht es\t0-0 1-1 2-2\t-1.0\t-2.0\t0.0\t-3\t-6.3\n");
  const TranslationFile file = ReadTranslations(in);
  ASSERT_EQ(file.translations.size(), 1u);
  const TranslationResult& r = file.translations.at("u1");
  EXPECT_EQ(r.target_tokens, (Tokens{"wie", "geht", "es"}));
  EXPECT_EQ(r.alignment.size(), 3u);
  EXPECT_EQ(r.scores.tm, -1.0);
  EXPECT_EQ(r.scores.word_penalty, -3.0);
  EXPECT_EQ(r.scores.weighted_total, -6.3);
  EXPECT_EQ(file.duplicate_ids, 0);
}

TEST(ReadTranslations, EmptyAndErrors) {
  std::istringstream empty("");
  EXPECT_TRUE(ReadTranslations(empty).translations.empty());
  std::istringstream range("u1\twie geht\t0-0 1-2\t0\t0\t0\t-2\t0\n");
  EXPECT_THROW(ReadTranslations(range), FormatError);
  std::istringstream fields("u1\twie geht\t0-0\t0\t0\n");
  EXPECT_THROW(ReadTranslations(fields), FormatError);
  std::istringstream number("u1\twie\t0-0\tx\t0\t0\t-1\t0\n");
  EXPECT_THROW(ReadTranslations(number), FormatError);
  std::istringstream pair("u1\twie\t0:0\t0\t0\t0\t-1\t0\n");
  EXPECT_THROW(ReadTranslations(pair), FormatError);
}

TEST(ReadTranslations, DuplicatesCountedLastWins) {
  std::istringstream in(
      "u1\ta\t0-0\t0\t0\t0\t-1\t-1\nu1\tb\t0-0\t0\t0\t0\t-1\t-1\n");
  const TranslationFile file = ReadTranslations(in);
  EXPECT_EQ(file.duplicate_ids, 1);
  EXPECT_EQ(file.translations.at("u1").target_tokens, Tokens{"b"});
}

TEST(WriteTranslations, RoundTripsDoublesExactly) {
  TranslationMap map;
  TranslationResult r;
  r.source_id = "x";
  r.target_tokens = {"p", "q"};
  r.alignment = {{0, 1}, {1, 0}};
  r.scores = {-0.1, -1.0 / 3.0, -2.5e-7, -2.0, 0.0};
  r.scores.Reweight({1, 1, 0.5, 0.3});
  map.emplace("x", r);
  std::ostringstream out;
  WriteTranslations(out, map);
  std::istringstream in(out.str());
  EXPECT_EQ(ReadTranslations(in).translations, map);
}

Utterance Weather() {
  return ParseAnnotatedLine(
      "w1\tWeather\tGetWeather\thow is the weather in [new york](City)");
}

TEST(ProjectAnnotations, IdentityAlignment) {
  const Utterance u = ParseAnnotatedLine("u\tD\tI\ta [b c](X) d [e](Y)");
  TranslationResult r;
  r.source_id = "u";
  r.target_tokens = {"A", "B", "C", "D", "E"};
  for (int i = 0; i < 5; ++i) r.alignment.emplace_back(i, i);
  const Projection p = ProjectAnnotations(u, r, "tgt");
  ASSERT_TRUE(p.utterance);
  EXPECT_EQ(FormatMarkup(*p.utterance), "A [B C](X) D [E](Y)");
  EXPECT_EQ(p.utterance->source_id, "u");
  EXPECT_EQ(p.utterance->language, "tgt");
  EXPECT_EQ(p.utterance->intent, "I");
}

TEST(ProjectAnnotations, WeatherExample) {
  TranslationResult r;
  r.source_id = "w1";
  r.target_tokens = {"wie", "ist", "das", "wetter", "heute", "in", "new", "york"};
  r.alignment = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 5}, {5, 6}, {6, 7}};
  const Projection p = ProjectAnnotations(Weather(), r);
  ASSERT_TRUE(p.utterance);
  ASSERT_EQ(p.utterance->slots.size(), 1u);
  EXPECT_EQ(p.utterance->slots[0], (SlotSpan{"City", 6, 8, "new york"}));
}

TEST(ProjectAnnotations, UnalignedSlot) {
  TranslationResult r;
  r.source_id = "w1";
  r.target_tokens = {"wie", "ist", "das", "wetter"};
  r.alignment = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  const Projection p = ProjectAnnotations(Weather(), r);
  EXPECT_FALSE(p.utterance);
  EXPECT_EQ(p.error, ProjectionError::kUnalignedSlot);
  EXPECT_STREQ(ProjectionErrorName(p.error), "UNALIGNED_SLOT");
}

TEST(ProjectAnnotations, Overlap) {
  const Utterance u = ParseAnnotatedLine("u\tD\tI\t[a](X) [b](Y)");
  TranslationResult r;
  r.source_id = "u";
  r.target_tokens = {"p", "q", "r"};
  r.alignment = {{0, 0}, {0, 2}, {1, 1}};
  EXPECT_EQ(ProjectAnnotations(u, r).error, ProjectionError::kOverlap);
}

TEST(ProjectAnnotations, WrongIdIsAnInvariantError) {
  TranslationResult r;
  r.source_id = "other";
  r.target_tokens = {"x"};
  EXPECT_THROW(ProjectAnnotations(Weather(), r), InvariantError);
}

// Oracle: the smallest contiguous target span containing every target index
// aligned to the slot, found by scanning all spans.
TEST(ProjectAnnotations, MatchesMinimalCoverOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const int m = 1 + static_cast<int>(rng() % 6);
    Utterance u;
    u.id = "t";
    u.domain = "D";
    u.intent = "I";
    for (int i = 0; i < n; ++i) u.tokens.push_back("s" + std::to_string(i));
    const int start = static_cast<int>(rng() % n);
    const int end = start + 1 + static_cast<int>(rng() % (n - start));
    u.slots.push_back(MakeSlot(u.tokens, "X", start, end));
    TranslationResult r;
    r.source_id = "t";
    for (int j = 0; j < m; ++j) r.target_tokens.push_back("t" + std::to_string(j));
    std::set<AlignmentPoint> points;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) {
        if (rng() % 4 == 0) points.emplace(i, j);
      }
    }
    r.alignment.assign(points.begin(), points.end());

    std::set<int> covered;
    for (const auto& [s, t] : points) {
      if (s >= start && s < end) covered.insert(t);
    }
    const Projection p = ProjectAnnotations(u, r);
    if (covered.empty()) {
      EXPECT_EQ(p.error, ProjectionError::kUnalignedSlot);
      continue;
    }
    int best_a = -1, best_b = -1;
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b <= m; ++b) {
        bool ok = true;
        for (int t : covered) ok = ok && t >= a && t < b;
        if (ok && (best_a < 0 || b - a < best_b - best_a)) {
          best_a = a;
          best_b = b;
        }
      }
    }
    ASSERT_TRUE(p.utterance);
    EXPECT_EQ(p.utterance->slots[0].start, best_a);
    EXPECT_EQ(p.utterance->slots[0].end, best_b);
  }
}

}  // namespace
}  // namespace mtboot
