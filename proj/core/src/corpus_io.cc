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

#include "sciex/corpus_io.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sciex/errors.h"

namespace sciex {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

ordered_json SentenceToJson(const AnnotatedSentence &sentence) {
  ordered_json j;
  j["doc_id"] = sentence.doc_id;
  j["sent_index"] = sentence.sent_index;
  ordered_json tokens = ordered_json::array();
  for (const auto &t : sentence.tokens) {
    tokens.push_back({{"t", t.text}, {"s", t.start}, {"e", t.end}});
  }
  j["tokens"] = std::move(tokens);
  ordered_json entities = ordered_json::array();
  for (const auto &e : sentence.entities) {
    entities.push_back({{"id", e.id},
                        {"type", EntityTypeName(e.type)},
                        {"start", e.start},
                        {"end", e.end}});
  }
  j["entities"] = std::move(entities);
  ordered_json relations = ordered_json::array();
  for (const auto &r : sentence.relations) {
    relations.push_back({{"id", r.id},
                         {"type", RelationTypeName(r.type)},
                         {"head", r.head},
                         {"tail", r.tail}});
  }
  j["relations"] = std::move(relations);
  return j;
}

AnnotatedSentence SentenceFromJson(const json &j) {
  AnnotatedSentence s;
  s.doc_id = j.at("doc_id").get<std::string>();
  s.sent_index = j.at("sent_index").get<int>();
  for (const auto &t : j.at("tokens")) {
    s.tokens.push_back(
        {t.at("t").get<std::string>(), t.at("s").get<int>(), t.at("e").get<int>()});
  }
  if (j.contains("entities")) {
    for (const auto &e : j.at("entities")) {
      const auto label = e.at("type").get<std::string>();
      const auto type = ParseEntityType(label);
      if (!type) {
        throw ValidationError("unknown entity label '" + label +
                              "'; known labels: " + KnownEntityLabels());
      }
      Entity entity{e.at("id").get<std::string>(), *type, e.at("start").get<int>(),
                    e.at("end").get<int>(), ""};
      const TokenSpan span = EntityTokenSpan(s.tokens, entity);
      entity.surface = JoinTokens(s.tokens, span.begin, span.end);
      s.entities.push_back(std::move(entity));
    }
  }
  if (j.contains("relations")) {
    for (const auto &r : j.at("relations")) {
      const auto label = r.at("type").get<std::string>();
      const auto type = ParseRelationType(label);
      if (!type) {
        throw ValidationError("unknown relation label '" + label +
                              "'; known labels: " + KnownRelationLabels());
      }
      s.relations.push_back({r.at("id").get<std::string>(), *type,
                             r.at("head").get<std::string>(),
                             r.at("tail").get<std::string>()});
    }
  }
  return s;
}

std::vector<AnnotatedSentence> ReadCorpusJsonl(std::istream &in) {
  std::vector<AnnotatedSentence> sentences;
  std::string line;
  std::size_t line_no = 0;
  std::size_t line_start = 0;
  for (; std::getline(in, line); line_start += line.size() + 1) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw FormatError(line_start + (e.byte > 0 ? e.byte - 1 : 0),
                        where + "invalid JSON: " + e.what());
    }
    if (j.contains("meta")) continue;
    try {
      sentences.push_back(SentenceFromJson(j));
    } catch (const json::exception &e) {
      throw FormatError(line_start, where + "invalid sentence: " + e.what());
    } catch (const ValidationError &e) {
      throw FormatError(line_start, where + e.what());
    }
  }
  return sentences;
}

std::vector<AnnotatedSentence> ReadCorpusJsonl(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return ReadCorpusJsonl(in);
}

void WriteCorpusJsonl(std::ostream &out,
                      const std::vector<AnnotatedSentence> &sentences,
                      const ordered_json &meta) {
  if (!meta.is_null()) out << ordered_json{{"meta", meta}}.dump() << '\n';
  for (const auto &s : sentences) out << SentenceToJson(s).dump() << '\n';
}

void WriteCorpusJsonl(const fs::path &path,
                      const std::vector<AnnotatedSentence> &sentences,
                      const ordered_json &meta) {
  std::ostringstream out;
  WriteCorpusJsonl(out, sentences, meta);
  WriteFile(path, out.str());
}

void WriteConll(std::ostream &out,
                const std::vector<AnnotatedSentence> &sentences) {
  const Tagset tagset = Tagset::Schema();
  for (const auto &s : sentences) {
    const TagSequence tags = ToBio(s);
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out << s.tokens[i].text << '\t' << tagset.TagName(tags[i]) << '\n';
    }
    out << '\n';
  }
}

std::vector<StandoffDocument> ReadBratDirectory(const fs::path &dir,
                                                const ParseOptions &options,
                                                Diagnostics *diagnostics) {
  if (!fs::is_directory(dir)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<fs::path> texts;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      texts.push_back(entry.path());
    }
  }
  std::sort(texts.begin(), texts.end());
  std::vector<StandoffDocument> docs;
  for (const auto &txt : texts) {
    fs::path ann = txt;
    ann.replace_extension(".ann");
    const std::string ann_text = fs::exists(ann) ? ReadFile(ann) : "";
    const std::string id = txt.stem().string();
    try {
      docs.push_back(ParseStandoffRaw(ann_text, ReadFile(txt), id, options,
                                      diagnostics));
    } catch (const ParseError &e) {
      throw ParseError(e.line(), ann.filename().string() + ": " +
                                     std::string(e.what()).substr(
                                         std::string(e.what()).find(": ") + 2));
    }
  }
  return docs;
}

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const fs::path &path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace sciex
