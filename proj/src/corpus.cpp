#include "mdr/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mdr {

namespace {

bool is_punct_byte(unsigned char c) {
  return std::ispunct(c) != 0;
}

}  // namespace

std::string lowercase_copy(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string join_tokens(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

TokenSeq tokenize(const std::string& text) {
  TokenSeq out;
  std::istringstream stream(lowercase_copy(text));
  std::string chunk;
  while (stream >> chunk) {
    std::size_t begin = 0;
    std::size_t end = chunk.size();
    while (begin < end && is_punct_byte(chunk[begin])) ++begin;
    while (end > begin && is_punct_byte(chunk[end - 1])) --end;
    if (end > begin) out.push_back(chunk.substr(begin, end - begin));
  }
  return out;
}

Corpus filter_corpus(const std::vector<std::string>& raw_sentences,
                     const std::unordered_set<std::string>& exclusion_set) {
  std::unordered_set<std::string> excluded_lower;
  excluded_lower.reserve(exclusion_set.size());
  for (const auto& s : exclusion_set) excluded_lower.insert(lowercase_copy(s));

  Corpus corpus;
  for (const auto& raw : raw_sentences) {
    TokenSeq tokens = tokenize(raw);
    if (tokens.size() < 4 || tokens.size() > 20) continue;
    if (excluded_lower.count(lowercase_copy(raw))) continue;
    SentenceRecord rec;
    rec.id = static_cast<std::int64_t>(corpus.records.size());
    rec.raw = raw;
    rec.tokens = std::move(tokens);
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

std::vector<std::string> read_sentence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

ConceptSet make_concept_set(const std::vector<std::string>& concepts) {
  TokenSeq lowered;
  lowered.reserve(concepts.size());
  for (const auto& c : concepts) lowered.push_back(lowercase_copy(c));
  std::sort(lowered.begin(), lowered.end());
  lowered.erase(std::unique(lowered.begin(), lowered.end()), lowered.end());
  return ConceptSet{std::move(lowered)};
}

std::vector<DatasetExample> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  std::vector<DatasetExample> examples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": invalid JSON: " + e.what());
    }
    if (!obj.contains("concepts") || !obj["concepts"].is_array()) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": missing \"concepts\" array");
    }
    if (!obj.contains("references") || !obj["references"].is_array()) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": missing \"references\" array");
    }
    DatasetExample ex;
    ex.concept_set =
        make_concept_set(obj["concepts"].get<std::vector<std::string>>());
    if (ex.concept_set.count() == 0) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": empty concept set");
    }
    for (const auto& ref : obj["references"]) {
      if (!ref.is_string()) {
        throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                 ": non-string reference");
      }
      std::string raw = ref.get<std::string>();
      TokenSeq tokens = tokenize(raw);
      if (tokens.empty()) {
        throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                 ": empty reference");
      }
      ex.raw_references.push_back(std::move(raw));
      ex.references.push_back(std::move(tokens));
    }
    if (ex.references.empty()) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": empty references");
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

}  // namespace mdr
