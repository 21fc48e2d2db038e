#include "annembed/huffman.hpp"

#include <algorithm>
#include <numeric>

namespace annembed {

HuffmanTree build_huffman(const std::vector<int64_t>& frequencies) {
  const int64_t n = static_cast<int64_t>(frequencies.size());
  if (n < 2) throw DataError("huffman: need at least 2 leaves");
  for (int64_t f : frequencies)
    if (f <= 0) throw DataError("huffman: frequencies must be positive");

  // two sorted queues: leaves (ascending frequency, stable) and merged nodes
  // (created in ascending weight order, so already sorted)
  std::vector<int64_t> leaf_order(n);
  std::iota(leaf_order.begin(), leaf_order.end(), 0);
  std::stable_sort(leaf_order.begin(), leaf_order.end(),
                   [&](int64_t a, int64_t b) { return frequencies[a] < frequencies[b]; });

  // nodes 0..n-1 are leaves, n..2n-2 merged in creation order
  std::vector<int64_t> weight(2 * n - 1);
  std::vector<int64_t> parent(2 * n - 1, -1);
  std::vector<uint8_t> branch(2 * n - 1, 0);
  for (int64_t i = 0; i < n; ++i) weight[i] = frequencies[i];

  int64_t li = 0;       // cursor into leaf_order
  int64_t mi = n;       // cursor into merged nodes
  int64_t next = n;     // next merged node id
  auto take = [&]() -> int64_t {
    const bool have_leaf = li < n;
    const bool have_merged = mi < next;
    if (have_leaf && (!have_merged || weight[leaf_order[li]] <= weight[mi]))
      return leaf_order[li++];
    return mi++;
  };
  for (int64_t m = 0; m < n - 1; ++m) {
    const int64_t a = take();
    const int64_t b = take();
    const int64_t p = next++;
    weight[p] = weight[a] + weight[b];
    parent[a] = p;
    branch[a] = 0;
    parent[b] = p;
    branch[b] = 1;
  }

  HuffmanTree t;
  t.leaf_count = n;
  t.codes.resize(n);
  t.paths.resize(n);
  for (int64_t leaf = 0; leaf < n; ++leaf) {
    auto& code = t.codes[leaf];
    auto& path = t.paths[leaf];
    for (int64_t node = leaf; parent[node] >= 0; node = parent[node]) {
      code.push_back(branch[node]);
      path.push_back(static_cast<int32_t>(parent[node] - n));  // internal row id
    }
    std::reverse(code.begin(), code.end());
    std::reverse(path.begin(), path.end());
  }
  return t;
}

}  // namespace annembed
