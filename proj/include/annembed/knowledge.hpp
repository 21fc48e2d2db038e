#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "annembed/common.hpp"
#include "annembed/corpus.hpp"

namespace annembed {

// Directed labeled graph over named concept nodes, with optional node
// categories and an optional domain-vocabulary node list.
class KnowledgeGraph {
 public:
  struct Node {
    std::string name;
    std::string category;  // empty = uncategorized
  };
  struct Edge {
    int32_t source;
    std::string relation;
    int32_t target;
  };

  int32_t find(std::string_view name) const;
  // Returns the node id, declaring the node on first sight.
  int32_t declare(const std::string& name);

  void add_edge(const std::string& source, const std::string& relation, const std::string& target);
  // The node must already exist. Conflicting reassignment is an error.
  void set_category(const std::string& name, const std::string& category);
  void add_domain_token(const std::string& name);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int32_t>& domain_vocabulary() const { return domain_; }
  const std::vector<int32_t>& categorized_nodes() const { return categorized_; }

  // Distinct neighbors per node, in first-edge order, both edge directions.
  std::vector<std::vector<int32_t>> neighbor_lists() const;

 private:
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int32_t> index_;
  std::vector<Edge> edges_;
  std::vector<int32_t> domain_;       // file order, deduplicated
  std::vector<int32_t> categorized_;  // assignment order
};

// triples: subject<TAB>relation<TAB>object, one edge per line.
// types: node<TAB>category. domain: one node name per line (declared if new).
// Pass "" to skip the optional files. '#' comments and blank lines skipped.
KnowledgeGraph parse_graph(const std::string& triples_path, const std::string& types_path,
                           const std::string& domain_path);

struct Predicate {
  std::string name;
  std::vector<std::string> arguments;
};

struct PredicateArgumentSet {
  std::vector<Predicate> predicates;
};

// Removes whitespace and '_' so concept text can be embedded in a predicate
// name; case is preserved.
std::string compact_for_name(std::string_view text);

// Voc over the domain vocabulary, TYPE_<category> per category, one numbered
// R_D_<relation>_<i> per edge, and R_I_<node> per node with >= 2 distinct
// neighbors (arguments = its neighbors).
PredicateArgumentSet derive_predicates(const KnowledgeGraph& graph);

// Token -> annotation ids; annotation ids are dense and ordered by first
// appearance of the predicate name, a namespace disjoint from word ids.
struct AnnotationMap {
  std::vector<std::string> names;
  std::unordered_map<std::string, int32_t> name_index;
  std::vector<std::string> token_order;  // first-appearance order
  std::unordered_map<std::string, std::vector<int32_t>> token_annotations;  // ascending ids
  std::vector<std::string> skipped;  // "token<TAB>predicate" for out-of-vocabulary arguments

  bool empty() const { return token_annotations.empty(); }
};

// Tokens are predicate arguments. With a vocabulary, arguments missing from it
// go to the skipped list instead of the map; pass nullptr to keep everything.
AnnotationMap assign_annotations(const PredicateArgumentSet& pas, const Vocabulary* vocabulary);

// token<TAB>name1,name2,... rows in token_order.
void save_annotation_map(const AnnotationMap& map, const std::string& path);
AnnotationMap load_annotation_map(const std::string& path);

// One line per document; annotated tokens rendered as token[name1,name2].
std::string render_annotated_text(const std::vector<std::vector<std::string>>& documents,
                                  const AnnotationMap& map);

// Binds the map to the corpus vocabulary: annotations carried by at least one
// in-vocabulary word get dense ids (original order kept), per-word annotation
// lists and per-annotation frequencies (sum of carrier counts) are filled in.
void attach_annotations(EncodedCorpus& corpus, const AnnotationMap& map);

}  // namespace annembed
