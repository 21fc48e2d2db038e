#include "annembed/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace annembed {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

bool Matrix::all_finite() const {
  for (real v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<std::string> tokenize(const std::string& document) {
  std::vector<std::string> tokens;
  size_t i = 0;
  const size_t n = document.size();
  while (i < n) {
    while (i < n && is_space(document[i])) ++i;
    size_t j = i;
    while (j < n && !is_space(document[j])) ++j;
    size_t b = i, e = j;
    while (b < e && is_punct(document[b])) ++b;
    while (e > b && is_punct(document[e - 1])) --e;
    if (e > b) tokens.emplace_back(document, b, e - b);
    i = j;
  }
  return tokens;
}

void PhraseTable::add(std::vector<std::string> surface, std::string merged) {
  if (surface.empty()) throw DataError("phrase table: empty surface phrase");
  for (const auto& w : surface)
    if (w.empty()) throw DataError("phrase table: empty word in surface phrase");
  if (merged.empty()) throw DataError("phrase table: empty merged token");
  if (merged.find_first_of(" \t\r\n") != std::string::npos)
    throw DataError("phrase table: merged token contains whitespace: " + merged);

  const int id = static_cast<int>(entries_.size());
  entries_.push_back(Entry{std::move(surface), std::move(merged)});
  auto& bucket = by_first_[entries_[id].surface.front()];
  bucket.push_back(id);
  // longest surface first; stable so earlier rules win ties
  std::stable_sort(bucket.begin(), bucket.end(), [this](int a, int b) {
    return entries_[a].surface.size() > entries_[b].surface.size();
  });
}

std::vector<std::string> PhraseTable::apply(const std::vector<std::string>& tokens) const {
  if (entries_.empty()) return tokens;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  size_t i = 0;
  while (i < tokens.size()) {
    const Entry* hit = nullptr;
    auto it = by_first_.find(tokens[i]);
    if (it != by_first_.end()) {
      for (int id : it->second) {
        const Entry& e = entries_[id];
        if (i + e.surface.size() > tokens.size()) continue;
        bool match = true;
        for (size_t k = 1; k < e.surface.size() && match; ++k)
          match = tokens[i + k] == e.surface[k];
        if (match) {
          hit = &e;
          break;
        }
      }
    }
    if (hit) {
      out.push_back(hit->merged);
      i += hit->surface.size();
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

PhraseTable PhraseTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open phrase file: " + path);
  PhraseTable table;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected surface phrase<TAB>merged token");
    std::vector<std::string> surface = tokenize(line.substr(0, tab));
    std::string merged = line.substr(tab + 1);
    if (surface.empty() || merged.empty())
      throw DataError(path + ":" + std::to_string(lineno) + ": empty phrase rule");
    table.add(std::move(surface), std::move(merged));
  }
  return table;
}

int32_t Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents,
                            int64_t min_count) {
  if (min_count < 1) throw DataError("min_count must be >= 1");
  std::unordered_map<std::string, int64_t> counts;
  int64_t total = 0;
  for (const auto& doc : documents)
    for (const auto& tok : doc) {
      ++counts[tok];
      ++total;
    }
  if (total == 0) throw DataError("empty corpus");

  Vocabulary v;
  v.total_tokens_ = total;
  v.entries_.reserve(counts.size());
  for (auto& [surface, count] : counts)
    if (count >= min_count) v.entries_.push_back(VocabEntry{surface, count});
  std::sort(v.entries_.begin(), v.entries_.end(), [](const VocabEntry& a, const VocabEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.surface < b.surface;
  });
  for (int32_t i = 0; i < static_cast<int32_t>(v.entries_.size()); ++i) {
    v.index_[v.entries_[i].surface] = i;
    v.retained_tokens_ += v.entries_[i].count;
  }
  return v;
}

double subsample_keep_probability(int64_t count, int64_t total, double t) {
  if (t <= 0) return 1.0;
  const double f = static_cast<double>(count) / static_cast<double>(total);
  const double p = std::sqrt(t / f) + t / f;
  return p < 1.0 ? p : 1.0;
}

int64_t EncodedCorpus::total_positions() const {
  int64_t n = 0;
  for (const auto& d : documents) n += static_cast<int64_t>(d.size());
  return n;
}

EncodedCorpus encode_corpus(const std::vector<std::vector<std::string>>& documents,
                            Vocabulary vocabulary) {
  EncodedCorpus c;
  c.vocabulary = std::move(vocabulary);
  c.documents.reserve(documents.size());
  for (const auto& doc : documents) {
    std::vector<int32_t> ids;
    ids.reserve(doc.size());
    for (const auto& tok : doc) {
      const int32_t id = c.vocabulary.index_of(tok);
      if (id >= 0) ids.push_back(id);
    }
    c.documents.push_back(std::move(ids));
  }
  c.word_annotations.resize(c.vocabulary.size());
  return c;
}

std::vector<std::string> decode_document(const EncodedCorpus& corpus, size_t doc) {
  std::vector<std::string> out;
  out.reserve(corpus.documents[doc].size());
  for (int32_t id : corpus.documents[doc]) out.push_back(corpus.vocabulary.entry(id).surface);
  return out;
}

std::vector<std::vector<std::string>> load_corpus_file(const std::string& path,
                                                       const PhraseTable* phrases) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  std::vector<std::vector<std::string>> docs;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> toks = tokenize(strip_cr(line));
    if (phrases) toks = phrases->apply(toks);
    docs.push_back(std::move(toks));
  }
  return docs;
}

}  // namespace annembed
