#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "annembed/common.hpp"
#include "annembed/knowledge.hpp"
#include "annembed/vector_io.hpp"

namespace annembed {

// Cosine similarity in double precision, clamped to [-1, 1].
// A zero vector is an error.
double cosine(std::span<const real> u, std::span<const real> v);

struct EvalPairSet {
  std::vector<std::string> universe;  // deduplicated, input order
  std::vector<std::pair<std::string, std::string>> pairs;
};

// pairs: token<TAB>token rows. universe: one token per line.
std::vector<std::pair<std::string, std::string>> load_pair_file(const std::string& path);
std::vector<std::string> load_token_list(const std::string& path);
// Tokens carrying the named annotation, in the map's token order.
std::vector<std::string> tokens_with_annotation(const AnnotationMap& map, const std::string& name);

// 1 + the number of universe members (excluding the query and the target)
// whose cosine to the query is strictly greater than the target's.
int rank_of_pair(const VectorSet& vectors, const std::string& query, const std::string& target,
                 std::span<const std::string> universe);

struct MrrRow {
  std::string a, b;
  int rank_ab = 0;  // rank of b among candidates for query a
  int rank_ba = 0;
};

// Normalized mean rank over both directions of every pair:
// sum of ranks / (universe size * 2 * pair count). Lower is better; the
// floor is 1/T and the ceiling (T-1)/T for a universe of size T.
struct MrrReport {
  double value = 0;
  std::vector<MrrRow> rows;
};

MrrReport mrr(const VectorSet& vectors, const EvalPairSet& set);

// Top-k tokens by cosine to the query, ties broken by row order. Candidates
// default to every row; a restriction list keeps only its members (ones
// missing from the vectors, duplicates, and zero vectors are skipped).
std::vector<std::pair<std::string, double>> nearest_neighbors(
    const VectorSet& vectors, const std::string& token, int k,
    const std::vector<std::string>* restrict_to = nullptr);

}  // namespace annembed
