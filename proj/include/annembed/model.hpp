#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "annembed/common.hpp"
#include "annembed/huffman.hpp"
#include "annembed/random.hpp"

namespace annembed {

enum class OutputLayer { HierarchicalSoftmax, NegativeSampling };

// Joint embedding space: word rows, annotation rows, and one output parameter
// set over the combined leaf space. Leaf ids are word ids followed by
// annotation ids shifted by the word count.
struct EmbeddingModel {
  int dim = 0;
  OutputLayer layer = OutputLayer::HierarchicalSoftmax;
  Matrix words;        // input vectors per word
  Matrix annotations;  // input vectors per annotation
  Matrix output;       // softmax tree node vectors, or per-leaf output vectors
  HuffmanTree tree;    // hierarchical softmax only

  int64_t leaf_count() const { return words.rows + annotations.rows; }
  int32_t word_leaf(int32_t w) const { return w; }
  int32_t annotation_leaf(int32_t a) const { return static_cast<int32_t>(words.rows) + a; }
};

// Input rows uniform in [-0.5/dim, 0.5/dim) from one generator seeded with
// seed (words first, then annotations); output parameters all zero.
EmbeddingModel init_matrices(int64_t word_count, int64_t annotation_count, int dim, uint64_t seed,
                             OutputLayer layer);

// Builds the softmax tree over per-leaf frequencies; requires layer == hs.
void attach_huffman(EmbeddingModel& model, const std::vector<int64_t>& leaf_frequencies);

double sigmoid(double x);

// log(1 + e^x); -log sigmoid(x) == softplus(-x).
double softplus(double x);

// P(leaf | h) under the tree: product over the path of sigmoid branch
// probabilities, so each internal node splits its mass and leaves sum to 1.
double hs_probability(const EmbeddingModel& model, const real* h, int32_t leaf);
double hs_loss(const EmbeddingModel& model, const real* h, int32_t leaf);

// One gradient step on -log P(leaf | h). Node vectors are updated in place
// with step size lr; the loss gradient with respect to h is accumulated into
// grad_h using the pre-update node vectors. Returns the pre-update loss.
double hs_update(EmbeddingModel& model, const real* h, int32_t leaf, double lr, double* grad_h);

// One logistic term against a single output row: loss is softplus(-x) for
// label 1 and softplus(x) for label 0. The row moves by -lr * dloss/drow and
// the loss gradient with respect to h is accumulated into grad_h using the
// pre-update row.
double binary_update(EmbeddingModel& model, const real* h, int32_t row, double label, double lr,
                     double* grad_h);
double binary_loss(const EmbeddingModel& model, const real* h, int32_t row, double label);

// Negative-sampling objective on explicit negatives:
// -log s(h.o_t) - sum_i log s(-h.o_ni). Same update/gradient conventions.
double ns_loss(const EmbeddingModel& model, const real* h, int32_t target,
               std::span<const int32_t> negatives);
double ns_update(EmbeddingModel& model, const real* h, int32_t target,
                 std::span<const int32_t> negatives, double lr, double* grad_h);

// Unigram^power sampling table.
class NegativeTable {
 public:
  NegativeTable() = default;
  NegativeTable(std::span<const int64_t> counts, double power, size_t table_size);
  // Restricted to the given ids (counts parallel to ids).
  NegativeTable(std::span<const int32_t> ids, std::span<const int64_t> counts, double power,
                size_t table_size);

  bool empty() const { return table_.empty(); }
  size_t size() const { return table_.size(); }
  int32_t sample(Rng& rng) const { return table_[rng.below(table_.size())]; }
  // Redraws while the sample equals excluded; -1 if no other id exists.
  int32_t sample_excluding(Rng& rng, int32_t excluded) const;

 private:
  std::vector<int32_t> table_;
};

}  // namespace annembed
