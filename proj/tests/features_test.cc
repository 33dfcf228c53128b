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

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

namespace mtboot {
namespace {

bool Has(const std::vector<std::string>& features, const std::string& f) {
  return std::find(features.begin(), features.end(), f) != features.end();
}

Gazetteer Cities() {
  Gazetteer g;
  g.Add("City", {"berlin"});
  g.Add("City", {"new", "york"});
  g.Add("ArtistName", {"queen"});
  return g;
}

TEST(ExtractFeatures, SingleTokenWithPadding) {
  const auto f = ExtractFeatures({"weiter"}, 0, Gazetteer());
  EXPECT_TRUE(Has(f, "bias"));
  EXPECT_TRUE(Has(f, "w0=weiter"));
  EXPECT_TRUE(Has(f, "w-1=<s>"));
  EXPECT_TRUE(Has(f, "w-2=<s>"));
  EXPECT_TRUE(Has(f, "w+1=</s>"));
  EXPECT_TRUE(Has(f, "w+2=</s>"));
  EXPECT_TRUE(Has(f, "p3=wei"));
  EXPECT_TRUE(Has(f, "s3=ter"));
}

TEST(ExtractFeatures, GazetteerMembership) {
  const auto f = ExtractFeatures({"weather", "in", "berlin"}, 2, Cities());
  EXPECT_TRUE(Has(f, "gaz:City"));
  EXPECT_FALSE(Has(f, "gaz:ArtistName"));
  EXPECT_FALSE(Has(ExtractFeatures({"weather", "in", "berlin"}, 0, Cities()),
                   "gaz:City"));
}

TEST(ExtractFeatures, MultiTokenEntriesCoverEveryPosition) {
  const Tokens t = {"in", "new", "york", "new"};
  const auto seq = ExtractSequenceFeatures(t, Cities());
  EXPECT_FALSE(Has(seq[0], "gaz:City"));
  EXPECT_TRUE(Has(seq[1], "gaz:City"));
  EXPECT_TRUE(Has(seq[2], "gaz:City"));
  // A partial match is not a match.
  EXPECT_FALSE(Has(seq[3], "gaz:City"));
}

TEST(ExtractFeatures, CatalogOverloadAgrees) {
  Catalog c;
  c.slot_type = "City";
  c.entries = {CatalogEntry{{"berlin"}, 3.0}};
  const CatalogMap catalogs = {{"City", c}};
  const Tokens t = {"nach", "berlin"};
  Gazetteer g;
  g.Add("City", {"berlin"});
  EXPECT_EQ(ExtractFeatures(t, 1, catalogs), ExtractFeatures(t, 1, g));
}

TEST(ExtractFeatures, Utf8Affixes) {
  const auto f = ExtractFeatures({"müde"}, 0, Gazetteer());
  EXPECT_TRUE(Has(f, "p2=mü"));
  EXPECT_TRUE(Has(f, "s3=üde"));
  const auto shorter = ExtractFeatures({"ü"}, 0, Gazetteer());
  EXPECT_TRUE(Has(shorter, "p1=ü"));
  EXPECT_FALSE(Has(shorter, "p2=ü"));
}

TEST(ExtractFeatures, Deterministic) {
  const Tokens t = {"play", "queen", "in", "berlin"};
  EXPECT_EQ(ExtractSequenceFeatures(t, Cities()),
            ExtractSequenceFeatures(t, Cities()));
  EXPECT_THROW(ExtractFeatures(t, 4, Cities()), std::exception);
}

TEST(ExtractIntentFeatures, SortedUniqueBagWithBigrams) {
  const auto f = ExtractIntentFeatures({"play", "queen", "queen"}, Cities());
  EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
  EXPECT_EQ(std::adjacent_find(f.begin(), f.end()), f.end());
  EXPECT_TRUE(Has(f, "w=queen"));
  EXPECT_TRUE(Has(f, "bi=<s>|play"));
  EXPECT_TRUE(Has(f, "bi=queen|</s>"));
  EXPECT_TRUE(Has(f, "gaz=ArtistName"));
}

TEST(Gazetteer, WriteReadRoundTrip) {
  const Gazetteer g = Cities();
  std::stringstream buffer;
  g.Write(buffer);
  int line = 0;
  const Gazetteer back = Gazetteer::Read(buffer, &line);
  EXPECT_EQ(back, g);
  EXPECT_EQ(line, 4);
  const Tokens t = {"new", "york"};
  EXPECT_EQ(back.Match(t), g.Match(t));
  // A copy keeps working independently of the original.
  Gazetteer copy = g;
  EXPECT_EQ(copy.Match(t)[1].count("City"), 1u);
}

TEST(FeatureIndex, DenseIdsAndLookupDropsUnknowns) {
  FeatureIndex index;
  EXPECT_EQ(index.Add("a"), 0);
  EXPECT_EQ(index.Add("b"), 1);
  EXPECT_EQ(index.Add("a"), 0);
  EXPECT_EQ(index.size(), 2u);
  EXPECT_EQ(index.Lookup({"b", "zzz", "a"}), (std::vector<int>{1, 0}));
  EXPECT_EQ(index.Find("zzz"), std::nullopt);
}

}  // namespace
}  // namespace mtboot
