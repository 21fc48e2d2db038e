#include "annembed/model.hpp"

#include <cmath>

namespace annembed {

namespace {

double dot(const real* a, const real* b, int dim) {
  double s = 0;
  for (int j = 0; j < dim; ++j) s += static_cast<double>(a[j]) * b[j];
  return s;
}

// One logistic update against output row `row` with the given label.
// Shared by the tree and negative-sampling paths.
double logistic_term(EmbeddingModel& m, const real* h, real* row, double label, double lr,
                     double* grad_h) {
  const double x = dot(h, row, m.dim);
  const double loss = label > 0.5 ? softplus(-x) : softplus(x);
  const double g = sigmoid(x) - label;
  for (int j = 0; j < m.dim; ++j) grad_h[j] += g * row[j];
  if (lr != 0.0)
    for (int j = 0; j < m.dim; ++j) row[j] -= static_cast<real>(lr * g * h[j]);
  return loss;
}

}  // namespace

EmbeddingModel init_matrices(int64_t word_count, int64_t annotation_count, int dim, uint64_t seed,
                             OutputLayer layer) {
  if (dim < 1) throw DataError("model: dimension must be >= 1");
  if (word_count < 1) throw DataError("model: need at least one word");
  if (annotation_count < 0) throw DataError("model: negative annotation count");

  EmbeddingModel m;
  m.dim = dim;
  m.layer = layer;
  m.words = Matrix(word_count, dim);
  m.annotations = Matrix(annotation_count, dim);
  Rng rng(seed);
  auto fill = [&](Matrix& mat) {
    for (real& v : mat.data) v = static_cast<real>((rng.real01() - 0.5) / dim);
  };
  fill(m.words);
  fill(m.annotations);

  const int64_t leaves = m.leaf_count();
  const int64_t out_rows = layer == OutputLayer::HierarchicalSoftmax ? leaves - 1 : leaves;
  m.output = Matrix(out_rows, dim);  // zero
  return m;
}

void attach_huffman(EmbeddingModel& model, const std::vector<int64_t>& leaf_frequencies) {
  if (model.layer != OutputLayer::HierarchicalSoftmax)
    throw DataError("model: softmax tree on a negative-sampling model");
  if (static_cast<int64_t>(leaf_frequencies.size()) != model.leaf_count())
    throw DataError("model: leaf frequency count does not match the leaf space");
  model.tree = build_huffman(leaf_frequencies);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double hs_probability(const EmbeddingModel& model, const real* h, int32_t leaf) {
  const auto& code = model.tree.codes[leaf];
  const auto& path = model.tree.paths[leaf];
  double p = 1.0;
  for (size_t i = 0; i < code.size(); ++i) {
    const double x = dot(h, model.output.row(path[i]), model.dim);
    p *= sigmoid(code[i] ? -x : x);
  }
  return p;
}

double hs_loss(const EmbeddingModel& model, const real* h, int32_t leaf) {
  const auto& code = model.tree.codes[leaf];
  const auto& path = model.tree.paths[leaf];
  double loss = 0;
  for (size_t i = 0; i < code.size(); ++i) {
    const double x = dot(h, model.output.row(path[i]), model.dim);
    loss += code[i] ? softplus(x) : softplus(-x);
  }
  return loss;
}

double hs_update(EmbeddingModel& model, const real* h, int32_t leaf, double lr, double* grad_h) {
  const auto& code = model.tree.codes[leaf];
  const auto& path = model.tree.paths[leaf];
  double loss = 0;
  for (size_t i = 0; i < code.size(); ++i)
    loss += logistic_term(model, h, model.output.row(path[i]), code[i] ? 0.0 : 1.0, lr, grad_h);
  return loss;
}

double binary_update(EmbeddingModel& model, const real* h, int32_t row, double label, double lr,
                     double* grad_h) {
  return logistic_term(model, h, model.output.row(row), label, lr, grad_h);
}

double binary_loss(const EmbeddingModel& model, const real* h, int32_t row, double label) {
  const double x = dot(h, model.output.row(row), model.dim);
  return label > 0.5 ? softplus(-x) : softplus(x);
}

double ns_loss(const EmbeddingModel& model, const real* h, int32_t target,
               std::span<const int32_t> negatives) {
  double loss = binary_loss(model, h, target, 1.0);
  for (int32_t n : negatives) loss += binary_loss(model, h, n, 0.0);
  return loss;
}

double ns_update(EmbeddingModel& model, const real* h, int32_t target,
                 std::span<const int32_t> negatives, double lr, double* grad_h) {
  double loss = binary_update(model, h, target, 1.0, lr, grad_h);
  for (int32_t n : negatives) loss += binary_update(model, h, n, 0.0, lr, grad_h);
  return loss;
}

NegativeTable::NegativeTable(std::span<const int64_t> counts, double power, size_t table_size) {
  std::vector<int32_t> ids(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) ids[i] = static_cast<int32_t>(i);
  *this = NegativeTable(ids, counts, power, table_size);
}

NegativeTable::NegativeTable(std::span<const int32_t> ids, std::span<const int64_t> counts,
                             double power, size_t table_size) {
  if (ids.empty()) return;
  if (ids.size() != counts.size()) throw DataError("negative table: ids/counts size mismatch");
  double total = 0;
  for (int64_t c : counts) {
    if (c <= 0) throw DataError("negative table: counts must be positive");
    total += std::pow(static_cast<double>(c), power);
  }
  table_.resize(table_size);
  size_t k = 0;
  double cum = 0;
  for (size_t i = 0; i < ids.size(); ++i) {
    cum += std::pow(static_cast<double>(counts[i]), power) / total;
    size_t end = static_cast<size_t>(std::llround(cum * static_cast<double>(table_size)));
    if (end > table_size || i + 1 == ids.size()) end = table_size;
    while (k < end) table_[k++] = ids[i];
  }
}

int32_t NegativeTable::sample_excluding(Rng& rng, int32_t excluded) const {
  for (int attempt = 0; attempt < 128; ++attempt) {
    const int32_t s = sample(rng);
    if (s != excluded) return s;
  }
  // the table is (almost) all the excluded id; scan for any other entry
  const size_t start = rng.below(table_.size());
  for (size_t i = 0; i < table_.size(); ++i) {
    const int32_t s = table_[(start + i) % table_.size()];
    if (s != excluded) return s;
  }
  return -1;
}

}  // namespace annembed
