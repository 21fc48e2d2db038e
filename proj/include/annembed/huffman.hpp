#pragma once

#include <cstdint>
#include <vector>

#include "annembed/common.hpp"

namespace annembed {

// Binary prefix code over leaves, built greedily by merging the two lightest
// nodes. Leaves are first stably sorted by ascending frequency; ties between
// merge candidates prefer the earlier-created node, with all leaves counting
// as created before any merged node. Internal node k is the k-th merge, so
// the root is leaf_count - 2.
struct HuffmanTree {
  int64_t leaf_count = 0;
  std::vector<std::vector<uint8_t>> codes;   // branch bits, root to leaf
  std::vector<std::vector<int32_t>> paths;   // internal node of each decision

  int64_t internal_count() const { return leaf_count - 1; }
};

// frequencies[i] > 0; needs at least 2 leaves.
HuffmanTree build_huffman(const std::vector<int64_t>& frequencies);

}  // namespace annembed
