// Copyright 2026 The sciex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sciex/corpus.h"
#include "sciex/corpus_io.h"
#include "sciex/errors.h"
#include "sciex/utf8.h"
#include "test_support.h"

namespace sciex {
namespace {

using testing::SampleDocument;
using testing::MakeSentence;

std::vector<std::string> TokenTexts(const AnnotatedSentence &s) {
  std::vector<std::string> out;
  for (const auto &t : s.tokens) out.push_back(t.text);
  return out;
}

Document Parse(const std::string &ann, const std::string &text,
               Diagnostics *diag = nullptr) {
  return ParseStandoff(ann, text, "d", {}, diag);
}

TEST(StandoffTest, SampleAbstractMaterialOffsets) {
  const Document doc = SampleDocument();
  const Entity &hx = doc.entities[2];
  EXPECT_EQ(hx.type, EntityType::kMaterial);
  EXPECT_EQ(hx.start, 33);
  EXPECT_EQ(hx.end, 44);
  EXPECT_EQ(hx.surface, "Hastelloy X");
}

TEST(StandoffTest, EmptyAnnotationFile) {
  const Document doc = Parse("", "Some text.");
  EXPECT_TRUE(doc.entities.empty());
  EXPECT_TRUE(doc.relations.empty());
}

TEST(StandoffTest, CorefRelation) {
  const std::string text = "thermal barrier coating (TBC)";
  const Document doc = Parse(
      "T1\tMaterial 0 23\tthermal barrier coating\n"
      "T2\tMaterial 25 28\tTBC\n"
      "R1\tCoref Arg1:T1 Arg2:T2\n",
      text);
  ASSERT_EQ(doc.relations.size(), 1u);
  EXPECT_EQ(doc.relations[0],
            (Relation{"R1", RelationType::kCoref, "T1", "T2"}));
}

TEST(StandoffTest, MalformedLineReportsLineNumber) {
  try {
    Parse("T1\tMaterial 0 3\tabc\nT2\tMaterial 4\tdef\n", "abc def");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(Parse("R1\tCoref Arg1:T1\n", "abc"), ParseError);
  EXPECT_THROW(Parse("T1 Material 0 3 abc\n", "abc"), ParseError);
}

TEST(StandoffTest, OffsetOutOfRange) {
  EXPECT_THROW(Parse("T1\tMaterial 0 30\tabc\n", "abc"), ParseError);
  EXPECT_THROW(Parse("T1\tMaterial 2 1\tabc\n", "abc"), ParseError);
}

TEST(StandoffTest, DiscontinuousSpanRejectedWithId) {
  try {
    Parse("T7\tMaterial 0 3;4 7\tabc def\n", "abc def");
    FAIL() << "expected DiscontinuousSpanError";
  } catch (const DiscontinuousSpanError &e) {
    EXPECT_EQ(e.annotation_id(), "T7");
    EXPECT_EQ(e.line(), 1);
  }
}

TEST(StandoffTest, UnknownLabelListsKnownLabels) {
  try {
    Parse("T1\tGizmo 0 3\tabc\n", "abc");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("Gizmo"), std::string::npos);
    EXPECT_NE(what.find("Participating-Material"), std::string::npos);
  }
}

TEST(StandoffTest, LabelAliasesFold) {
  const std::string text = "aa bb cc dd ee";
  const Document doc = Parse(
      "T1\tParticipating Material 0 2\taa\n"
      "T2\tMesostructure or Macrostructure 3 5\tbb\n"
      "T3\tAmount Unit 6 8\tcc\n"
      "T4\tamount_unit 9 11\tdd\n"
      "T5\tOperation 12 14\tee\n"
      "R1\tNext Opr Arg1:T5 Arg2:T5\n"
      "R2\tFormOf Arg1:T1 Arg2:T2\n",
      text);
  EXPECT_EQ(doc.entities[0].type, EntityType::kParticipatingMaterial);
  EXPECT_EQ(doc.entities[1].type, EntityType::kMStructure);
  EXPECT_EQ(doc.entities[2].type, EntityType::kAmountUnit);
  EXPECT_EQ(doc.entities[3].type, EntityType::kAmountUnit);
  EXPECT_EQ(doc.relations[0].type, RelationType::kNextOpr);
  EXPECT_EQ(doc.relations[1].type, RelationType::kFormOf);
}

TEST(StandoffTest, IgnoredLinesAreCounted) {
  Diagnostics diag;
  const Document doc = Parse(
      "T1\tOperation 0 6\theated\n"
      "E1\tOperation:T1\n"
      "A1\tNegated E1\n"
      "#1\tAnnotatorNotes T1\tnote\n",
      "heated", &diag);
  EXPECT_EQ(doc.entities.size(), 1u);
  EXPECT_EQ(diag.ignored_lines, 3);
  EXPECT_FALSE(diag.warnings.empty());
}

TEST(StandoffTest, SurfaceMismatchTrustsOffsets) {
  Diagnostics diag;
  const Document doc = Parse("T1\tMaterial 0 5\tsteal\n", "steel bar", &diag);
  EXPECT_EQ(doc.entities[0].surface, "steel");
  EXPECT_EQ(diag.surface_mismatches, 1);
}

TEST(StandoffTest, CodepointAndByteOffsets) {
  const std::string text = "γ precipitate";
  const Document cp = Parse("T1\tPhase 0 13\tγ precipitate\n", text);
  EXPECT_EQ(cp.entities[0].surface, "γ precipitate");
  ParseOptions bytes;
  bytes.offsets = OffsetUnit::kByte;
  const Document by =
      ParseStandoff("T1\tPhase 0 14\tγ precipitate\n", text, "d", bytes);
  EXPECT_EQ(by.entities[0].start, 0);
  EXPECT_EQ(by.entities[0].end, 13);
  EXPECT_EQ(by.entities[0].surface, "γ precipitate");
}

TEST(StandoffTest, SampleAbstractParsesAfterNonAsciiText) {
  Diagnostics diag;
  const Document doc = SampleDocument(&diag);
  EXPECT_EQ(diag.surface_mismatches, 0);
  EXPECT_EQ(diag.ignored_lines, 1);
  EXPECT_EQ(doc.entities.back().surface, "plastic buckling");
}

TEST(TokenizerTest, TwoSentences) {
  Document doc;
  doc.id = "d";
  doc.text = "Creep was studied. Grains grew.";
  const auto sentences = SentenceSplitAndTokenize(doc);
  ASSERT_EQ(sentences.size(), 2u);
  EXPECT_EQ(TokenTexts(sentences[0]),
            (std::vector<std::string>{"Creep", "was", "studied", "."}));
  EXPECT_EQ(TokenTexts(sentences[1]),
            (std::vector<std::string>{"Grains", "grew", "."}));
  // Token offsets partition the non-space characters.
  const std::u32string text = DecodeUtf8(doc.text);
  std::vector<bool> covered(text.size(), false);
  for (const auto &s : sentences) {
    for (const auto &t : s.tokens) {
      for (int i = t.start; i < t.end; ++i) {
        EXPECT_FALSE(covered[i]);
        covered[i] = true;
      }
      EXPECT_EQ(EncodeUtf8(text.substr(t.start, t.end - t.start)), t.text);
    }
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    EXPECT_EQ(covered[i], !IsSpace(text[i])) << i;
  }
}

TEST(TokenizerTest, PunctuationAndHyphens) {
  const std::u32string text =
      U"high-density (HEAs) at 0.5 wt% and 1,000 \"K\"; a/b [c]";
  std::vector<std::string> got;
  for (const auto &t : Tokenize(text, {0, static_cast<int>(text.size())})) {
    got.push_back(t.text);
  }
  EXPECT_EQ(got, (std::vector<std::string>{
                     "high-density", "(", "HEAs", ")", "at", "0.5", "wt", "%",
                     "and", "1,000", "\"", "K", "\"", ";", "a", "/", "b", "[",
                     "c", "]"}));
}

TEST(TokenizerTest, AbbreviationGuard) {
  const auto spans = SplitSentences(U"See Fig. 2 for details. Next one.");
  EXPECT_EQ(spans.size(), 2u);
  const auto lower = SplitSentences(U"It grew. then it shrank.");
  EXPECT_EQ(lower.size(), 1u);
}

TEST(TokenizerTest, SingleTokenEntityAligns) {
  Document doc;
  doc.id = "d";
  doc.text = "a high-density part";
  doc.entities = {{"T1", EntityType::kDescriptor, 2, 14, "high-density"}};
  const auto s = SentenceSplitAndTokenize(doc);
  ASSERT_EQ(s[0].entities.size(), 1u);
  EXPECT_EQ(EntityTokenSpan(s[0].tokens, s[0].entities[0]), (TokenSpan{1, 2}));
}

TEST(TokenizerTest, EntityCoversLeadingTokens) {
  Document doc;
  doc.id = "d";
  doc.text = "electron beam melting fusion processes";
  doc.entities = {{"T1", EntityType::kEnvironment, 0, 13, "electron beam"}};
  const auto s = SentenceSplitAndTokenize(doc);
  EXPECT_EQ(EntityTokenSpan(s[0].tokens, s[0].entities[0]), (TokenSpan{0, 2}));
}

TEST(TokenizerTest, PartialTokenEntityExpands) {
  Document doc;
  doc.id = "d";
  doc.text = "the HEAs were cast";
  doc.entities = {{"T1", EntityType::kMaterial, 4, 7, "HEA"}};
  const auto s = SentenceSplitAndTokenize(doc);
  ASSERT_EQ(s[0].entities.size(), 1u);
  EXPECT_EQ(s[0].entities[0].start, 4);
  EXPECT_EQ(s[0].entities[0].end, 8);
  EXPECT_EQ(s[0].entities[0].surface, "HEAs");
}

TEST(TokenizerTest, CrossSentenceRelationDropped) {
  Document doc;
  doc.id = "d";
  doc.text = "Steel was heated. Alloy cooled.";
  doc.entities = {{"T1", EntityType::kMaterial, 0, 5, "Steel"},
                  {"T2", EntityType::kOperation, 10, 16, "heated"},
                  {"T3", EntityType::kMaterial, 18, 23, "Alloy"}};
  doc.relations = {{"R1", RelationType::kInput, "T1", "T2"},
                   {"R2", RelationType::kInput, "T3", "T2"}};
  Diagnostics diag;
  const auto s = SentenceSplitAndTokenize(doc, &diag);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].relations.size(), 1u);
  EXPECT_TRUE(s[1].relations.empty());
  EXPECT_EQ(diag.cross_sentence_relations, 1);
}

TEST(TokenizerTest, SampleAbstract) {
  const auto sentences = testing::SampleSentences();
  EXPECT_EQ(sentences.size(), 9u);
  int entities = 0;
  int relations = 0;
  for (const auto &s : sentences) {
    entities += static_cast<int>(s.entities.size());
    relations += static_cast<int>(s.relations.size());
    for (std::size_t i = 1; i < s.tokens.size(); ++i) {
      EXPECT_LT(s.tokens[i - 1].end, s.tokens[i].start + 1);
    }
    for (const auto &e : s.entities) {
      EXPECT_NO_THROW(EntityTokenSpan(s.tokens, e));
    }
  }
  EXPECT_EQ(entities, 22);
  EXPECT_EQ(relations, 8);
}

TEST(BioTest, HastelloyExample) {
  const auto s = MakeSentence("d", 0, {"Hastelloy", "X", "is"},
                              {{0, 2, EntityType::kMaterial}});
  const TagSequence tags = ToBio(s);
  const Tagset ts = Tagset::Schema();
  EXPECT_EQ(ts.TagName(tags[0]), "B-Material");
  EXPECT_EQ(ts.TagName(tags[1]), "I-Material");
  EXPECT_EQ(ts.TagName(tags[2]), "O");
}

TEST(BioTest, NoEntitiesAllOutside) {
  const auto s = MakeSentence("d", 0, {"a", "b", "c"});
  EXPECT_EQ(ToBio(s), (TagSequence{0, 0, 0}));
}

TEST(BioTest, AdjacentEntitiesDoNotMerge) {
  const auto s = MakeSentence(
      "d", 0, {"a", "b"},
      {{0, 1, EntityType::kNumber}, {1, 2, EntityType::kNumber}});
  const int b = Tagset::Begin(static_cast<int>(EntityType::kNumber));
  EXPECT_EQ(ToBio(s), (TagSequence{b, b}));
  EXPECT_EQ(FromBio(ToBio(s), s.tokens).size(), 2u);
}

TEST(BioTest, OverlapNamesBothIds) {
  auto s = MakeSentence("d", 0, {"a", "b", "c"},
                        {{0, 2, EntityType::kMaterial}, {1, 3, EntityType::kPhase}});
  try {
    ToBio(s);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError &e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("T1"), std::string::npos);
    EXPECT_NE(what.find("T2"), std::string::npos);
  }
}

TEST(BioTest, DecodeExamples) {
  const auto s = MakeSentence("d", 0, {"Hastelloy", "X", "is"});
  const Tagset ts = Tagset::Schema();
  const auto ents = FromBio({*ts.TagIndex("B-Material"), *ts.TagIndex("I-Material"), 0},
                            s.tokens);
  ASSERT_EQ(ents.size(), 1u);
  EXPECT_EQ(ents[0].surface, "Hastelloy X");
  EXPECT_EQ(ents[0].id, "T1");

  const auto repaired = FromBio({0, *ts.TagIndex("I-Phase")},
                                std::span(s.tokens).first(2));
  ASSERT_EQ(repaired.size(), 1u);
  EXPECT_EQ(repaired[0].type, EntityType::kPhase);
  EXPECT_EQ(repaired[0].start, s.tokens[1].start);

  const auto switched = FromBio(
      {*ts.TagIndex("B-Material"), *ts.TagIndex("I-Phase"), 0}, s.tokens);
  EXPECT_EQ(switched.size(), 2u);
}

TEST(BioTest, RoundTripRandomSentences) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const AnnotatedSentence s = testing::RandomSentence(rng, 12, i);
    const TagSequence tags = ToBio(s);
    ASSERT_TRUE(IsWellFormedBio(tags));
    auto decoded = FromBio(tags, s.tokens);
    ASSERT_EQ(decoded.size(), s.entities.size());
    for (std::size_t j = 0; j < decoded.size(); ++j) {
      EXPECT_EQ(decoded[j].type, s.entities[j].type);
      EXPECT_EQ(decoded[j].start, s.entities[j].start);
      EXPECT_EQ(decoded[j].end, s.entities[j].end);
      EXPECT_EQ(decoded[j].surface, s.entities[j].surface);
    }
  }
}

TEST(BioTest, WellFormedLanguage) {
  EXPECT_TRUE(IsWellFormedBio({}));
  EXPECT_TRUE(IsWellFormedBio({0, 1, 2, 2, 3, 0}));
  EXPECT_FALSE(IsWellFormedBio({2}));
  EXPECT_FALSE(IsWellFormedBio({0, 2}));
  EXPECT_FALSE(IsWellFormedBio({1, 4}));
}

TEST(SplitTest, SixtySevenAbstracts) {
  for (std::uint64_t seed : {0ULL, 7ULL, 12345ULL}) {
    const SplitIndices split = SplitCorpusIndices(67, seed);
    EXPECT_EQ(split.train.size(), 33u);
    EXPECT_EQ(split.dev.size(), 17u);
    EXPECT_EQ(split.test.size(), 17u);
    std::set<std::size_t> all;
    for (const auto *part : {&split.train, &split.dev, &split.test}) {
      all.insert(part->begin(), part->end());
    }
    EXPECT_EQ(all.size(), 67u);
  }
}

TEST(SplitTest, FourDocumentsAndDeterminism) {
  const SplitIndices a = SplitCorpusIndices(4, 3);
  EXPECT_EQ(a.train.size(), 2u);
  EXPECT_EQ(a.dev.size(), 1u);
  EXPECT_EQ(a.test.size(), 1u);
  const SplitIndices b = SplitCorpusIndices(4, 3);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.dev, b.dev);
  EXPECT_THROW(SplitCorpusIndices(2, 3), ValidationError);
}

TEST(SplitTest, SentenceSplitKeepsAbstractsTogether) {
  const auto corpus = testing::SeparableCorpus(40, 5, "doc");
  const SentenceSplit split = SplitCorpus(corpus, 9);
  EXPECT_EQ(split.train.size() + split.dev.size() + split.test.size(), corpus.size());
  std::set<std::string> train_docs;
  for (const auto &s : split.train) train_docs.insert(s.doc_id);
  for (const auto &s : split.dev) EXPECT_FALSE(train_docs.contains(s.doc_id));
  for (const auto &s : split.test) EXPECT_FALSE(train_docs.contains(s.doc_id));
}

TEST(StatsTest, EmptyAndSample) {
  const CorpusStats empty = ComputeCorpusStats({});
  EXPECT_EQ(empty.abstracts, 0);
  EXPECT_EQ(empty.sentences, 0);
  EXPECT_EQ(empty.tokens, 0);
  EXPECT_EQ(empty.entities, 0);
  EXPECT_EQ(empty.relations, 0);

  const CorpusStats s = ComputeCorpusStats(testing::SampleSentences());
  EXPECT_EQ(s.abstracts, 1);
  EXPECT_EQ(s.sentences, 9);
  EXPECT_EQ(s.entities, 22);
  EXPECT_EQ(s.relations, 8);
  EXPECT_EQ(s.entity_types.at("Material"), 6);
  EXPECT_EQ(s.relation_types.at("Coref"), 2);
}

TEST(CorpusIoTest, JsonlRoundTrip) {
  const auto sentences = testing::SampleSentences();
  std::stringstream buffer;
  WriteCorpusJsonl(buffer, sentences, {{"tool_version", kToolVersion}});
  const auto back = ReadCorpusJsonl(buffer);
  ASSERT_EQ(back.size(), sentences.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].doc_id, sentences[i].doc_id);
    EXPECT_EQ(back[i].tokens, sentences[i].tokens);
    EXPECT_EQ(back[i].entities, sentences[i].entities);
    EXPECT_EQ(back[i].relations, sentences[i].relations);
  }
}

TEST(CorpusIoTest, MalformedLineCarriesOffset) {
  const std::string good =
      "{\"doc_id\":\"d\",\"sent_index\":0,\"tokens\":[],\"entities\":[],"
      "\"relations\":[]}\n";
  std::stringstream in(good + "{\"doc_id\": oops}\n");
  try {
    ReadCorpusJsonl(in);
    FAIL() << "expected FormatError";
  } catch (const FormatError &e) {
    EXPECT_GE(e.offset(), good.size());
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(CorpusIoTest, ConllExport) {
  const auto s = MakeSentence("d", 0, {"Hastelloy", "X", "is"},
                              {{0, 2, EntityType::kMaterial}});
  std::ostringstream out;
  WriteConll(out, {s, s});
  EXPECT_EQ(out.str(),
            "Hastelloy\tB-Material\nX\tI-Material\nis\tO\n\n"
            "Hastelloy\tB-Material\nX\tI-Material\nis\tO\n\n");
}

}  // namespace
}  // namespace sciex
