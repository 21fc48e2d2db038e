#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "annembed/common.hpp"
#include "annembed/corpus.hpp"
#include "annembed/model.hpp"

namespace annembed {

// Named embedding rows, as read from or written to a vector file.
struct VectorSet {
  std::vector<std::string> tokens;  // row order
  std::unordered_map<std::string, int32_t> index;
  Matrix vectors;

  int32_t find(const std::string& token) const {
    auto it = index.find(token);
    return it == index.end() ? -1 : it->second;
  }
  void add(std::string token, const real* row);
};

// Text format: "count dim" header, then one row per line as the token
// followed by dim %.9g floats (round-trips binary32 exactly). Paths ending
// in .bin use a packed variant: the same header line, then per row the token,
// one space, dim little-endian 4-byte floats, and a newline.
void write_vectors(const VectorSet& set, const std::string& path);
VectorSet read_vectors(const std::string& path);

VectorSet word_vector_set(const EmbeddingModel& model, const Vocabulary& vocabulary);
VectorSet annotation_vector_set(const EmbeddingModel& model,
                                const std::vector<std::string>& annotation_names);
VectorSet doc_vector_set(const Matrix& doc_vectors);  // rows named doc_<i>

}  // namespace annembed
