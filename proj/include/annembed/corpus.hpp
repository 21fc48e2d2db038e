#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "annembed/common.hpp"

namespace annembed {

// Splits a document into tokens: maximal runs of non-whitespace with leading
// and trailing ASCII punctuation stripped. Interior punctuation survives, so
// identifiers like TROJ_RANSOM.SMAR or CVE-2016-0101 stay in one piece.
// Case is preserved.
std::vector<std::string> tokenize(const std::string& document);

// Ordered multi-word merge rules. Applied left to right over a token stream;
// at each position the longest matching surface phrase wins and is replaced
// by its merged token.
class PhraseTable {
 public:
  void add(std::vector<std::string> surface, std::string merged);
  std::vector<std::string> apply(const std::vector<std::string>& tokens) const;
  size_t size() const { return entries_.size(); }

  // TSV rows: space-separated surface phrase <TAB> merged token.
  // '#' comment lines and blank lines are skipped.
  static PhraseTable load(const std::string& path);

 private:
  struct Entry {
    std::vector<std::string> surface;
    std::string merged;
  };
  std::vector<Entry> entries_;
  // entry ids per first word, longest surface first
  std::unordered_map<std::string, std::vector<int>> by_first_;
};

struct VocabEntry {
  std::string surface;
  int64_t count = 0;
};

// Token types sorted by descending count, ties broken lexicographically,
// restricted to types with count >= min_count.
class Vocabulary {
 public:
  int32_t size() const { return static_cast<int32_t>(entries_.size()); }
  int32_t index_of(std::string_view token) const;
  const VocabEntry& entry(int32_t index) const { return entries_[index]; }
  int64_t total_tokens() const { return total_tokens_; }
  int64_t retained_tokens() const { return retained_tokens_; }
  int64_t discarded_tokens() const { return total_tokens_ - retained_tokens_; }

  friend Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents,
                                     int64_t min_count);

 private:
  std::vector<VocabEntry> entries_;
  std::unordered_map<std::string, int32_t> index_;
  int64_t total_tokens_ = 0;
  int64_t retained_tokens_ = 0;
};

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents,
                            int64_t min_count);

// Keep probability for frequent-token downsampling:
// min(1, sqrt(t/f) + t/f) with f = count/total. t <= 0 disables (always 1).
double subsample_keep_probability(int64_t count, int64_t total, double t);

// Corpus as word indices, one vector per input document. Out-of-vocabulary
// tokens are dropped. Annotation fields are empty until attach_annotations
// (knowledge module) fills them.
struct EncodedCorpus {
  Vocabulary vocabulary;
  std::vector<std::vector<int32_t>> documents;

  std::vector<std::string> annotation_names;            // dense annotation ids
  std::vector<std::vector<int32_t>> word_annotations;    // per word id, ascending
  std::vector<int64_t> annotation_frequencies;           // sum of carrier counts

  bool has_annotations() const { return !annotation_names.empty(); }
  int64_t total_positions() const;
};

EncodedCorpus encode_corpus(const std::vector<std::vector<std::string>>& documents,
                            Vocabulary vocabulary);

std::vector<std::string> decode_document(const EncodedCorpus& corpus, size_t doc);

// One document per line; tokenization plus optional phrase merging.
std::vector<std::vector<std::string>> load_corpus_file(const std::string& path,
                                                       const PhraseTable* phrases = nullptr);

}  // namespace annembed
