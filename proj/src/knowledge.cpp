#include "annembed/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace annembed {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  for (;;) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string loc(const std::string& path, int64_t lineno) {
  return path + ":" + std::to_string(lineno) + ": ";
}

}  // namespace

int32_t KnowledgeGraph::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

int32_t KnowledgeGraph::declare(const std::string& name) {
  if (name.empty()) throw DataError("knowledge graph: empty node name");
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  const int32_t id = static_cast<int32_t>(nodes_.size());
  nodes_.push_back(Node{name, ""});
  index_[name] = id;
  return id;
}

void KnowledgeGraph::add_edge(const std::string& source, const std::string& relation,
                              const std::string& target) {
  if (relation.empty()) throw DataError("knowledge graph: empty relation label");
  const int32_t s = declare(source);
  const int32_t t = declare(target);
  edges_.push_back(Edge{s, relation, t});
}

void KnowledgeGraph::set_category(const std::string& name, const std::string& category) {
  if (category.empty()) throw DataError("knowledge graph: empty category");
  const int32_t id = find(name);
  if (id < 0) throw DataError("knowledge graph: category for undeclared node: " + name);
  if (!nodes_[id].category.empty()) {
    if (nodes_[id].category != category)
      throw DataError("knowledge graph: conflicting categories for node " + name + ": " +
                      nodes_[id].category + " vs " + category);
    return;
  }
  nodes_[id].category = category;
  categorized_.push_back(id);
}

void KnowledgeGraph::add_domain_token(const std::string& name) {
  const int32_t id = declare(name);
  if (std::find(domain_.begin(), domain_.end(), id) == domain_.end()) domain_.push_back(id);
}

std::vector<std::vector<int32_t>> KnowledgeGraph::neighbor_lists() const {
  std::vector<std::vector<int32_t>> nb(nodes_.size());
  auto link = [&](int32_t a, int32_t b) {
    if (std::find(nb[a].begin(), nb[a].end(), b) == nb[a].end()) nb[a].push_back(b);
  };
  for (const Edge& e : edges_) {
    link(e.source, e.target);
    link(e.target, e.source);
  }
  return nb;
}

KnowledgeGraph parse_graph(const std::string& triples_path, const std::string& types_path,
                           const std::string& domain_path) {
  KnowledgeGraph g;

  std::ifstream triples(triples_path);
  if (!triples) throw DataError("cannot open triples file: " + triples_path);
  std::string line;
  int64_t lineno = 0;
  while (std::getline(triples, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty())
      throw DataError(loc(triples_path, lineno) + "expected subject<TAB>relation<TAB>object");
    g.add_edge(fields[0], fields[1], fields[2]);
  }

  if (!types_path.empty()) {
    std::ifstream types(types_path);
    if (!types) throw DataError("cannot open node-type file: " + types_path);
    lineno = 0;
    while (std::getline(types, line)) {
      ++lineno;
      line = strip_cr(line);
      if (line.empty() || line[0] == '#') continue;
      const auto fields = split_tabs(line);
      if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
        throw DataError(loc(types_path, lineno) + "expected node<TAB>category");
      if (g.find(fields[0]) < 0)
        throw DataError(loc(types_path, lineno) + "category for undeclared node: " + fields[0]);
      g.set_category(fields[0], fields[1]);
    }
  }

  if (!domain_path.empty()) {
    std::ifstream domain(domain_path);
    if (!domain) throw DataError("cannot open domain-vocabulary file: " + domain_path);
    lineno = 0;
    while (std::getline(domain, line)) {
      ++lineno;
      line = strip_cr(line);
      if (line.empty() || line[0] == '#') continue;
      if (line.find('\t') != std::string::npos)
        throw DataError(loc(domain_path, lineno) + "expected one token per line");
      g.add_domain_token(line);
    }
  }

  return g;
}

std::string compact_for_name(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)) && c != '_') out += c;
  return out;
}

PredicateArgumentSet derive_predicates(const KnowledgeGraph& graph) {
  PredicateArgumentSet out;
  const auto& nodes = graph.nodes();

  if (!graph.domain_vocabulary().empty()) {
    Predicate voc{"Voc", {}};
    for (int32_t id : graph.domain_vocabulary()) voc.arguments.push_back(nodes[id].name);
    out.predicates.push_back(std::move(voc));
  }

  // one TYPE_<category> per category, members in assignment order
  std::vector<std::string> category_order;
  for (int32_t id : graph.categorized_nodes()) {
    const std::string& cat = nodes[id].category;
    if (std::find(category_order.begin(), category_order.end(), cat) == category_order.end())
      category_order.push_back(cat);
  }
  for (const std::string& cat : category_order) {
    Predicate p{"TYPE_" + compact_for_name(cat), {}};
    for (int32_t id : graph.categorized_nodes())
      if (nodes[id].category == cat) p.arguments.push_back(nodes[id].name);
    out.predicates.push_back(std::move(p));
  }

  // one numbered direct-relation predicate per edge, numbered per label
  std::unordered_map<std::string, int> relation_counter;
  for (const auto& e : graph.edges()) {
    const int i = ++relation_counter[e.relation];
    out.predicates.push_back(Predicate{
        "R_D_" + compact_for_name(e.relation) + "_" + std::to_string(i),
        {nodes[e.source].name, nodes[e.target].name}});
  }

  // one indirect predicate per node with >= 2 distinct neighbors
  const auto nb = graph.neighbor_lists();
  for (size_t id = 0; id < nodes.size(); ++id) {
    if (nb[id].size() < 2) continue;
    Predicate p{"R_I_" + compact_for_name(nodes[id].name), {}};
    for (int32_t n : nb[id]) p.arguments.push_back(nodes[n].name);
    out.predicates.push_back(std::move(p));
  }

  return out;
}

AnnotationMap assign_annotations(const PredicateArgumentSet& pas, const Vocabulary* vocabulary) {
  AnnotationMap map;
  for (const Predicate& p : pas.predicates) {
    int32_t id;
    auto it = map.name_index.find(p.name);
    if (it != map.name_index.end()) {
      id = it->second;  // same name twice: arguments merge under one annotation
    } else {
      id = static_cast<int32_t>(map.names.size());
      map.names.push_back(p.name);
      map.name_index[p.name] = id;
    }
    for (const std::string& arg : p.arguments) {
      if (vocabulary && vocabulary->index_of(arg) < 0) {
        map.skipped.push_back(arg + "\t" + p.name);
        continue;
      }
      auto [row, inserted] = map.token_annotations.try_emplace(arg);
      if (inserted) map.token_order.push_back(arg);
      auto& ids = row->second;
      auto pos = std::lower_bound(ids.begin(), ids.end(), id);
      if (pos == ids.end() || *pos != id) ids.insert(pos, id);
    }
  }
  return map;
}

void save_annotation_map(const AnnotationMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write annotation file: " + path);
  for (const std::string& token : map.token_order) {
    const auto& ids = map.token_annotations.at(token);
    out << token << '\t';
    for (size_t i = 0; i < ids.size(); ++i) {
      if (i) out << ',';
      out << map.names[ids[i]];
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing annotation file: " + path);
}

AnnotationMap load_annotation_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open annotation file: " + path);
  AnnotationMap map;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw DataError(loc(path, lineno) + "expected token<TAB>annotation,annotation,...");
    const std::string& token = fields[0];
    auto [row, inserted] = map.token_annotations.try_emplace(token);
    if (inserted) map.token_order.push_back(token);
    std::stringstream names(fields[1]);
    std::string name;
    while (std::getline(names, name, ',')) {
      if (name.empty())
        throw DataError(loc(path, lineno) + "empty annotation name");
      int32_t id;
      auto it = map.name_index.find(name);
      if (it != map.name_index.end()) {
        id = it->second;
      } else {
        id = static_cast<int32_t>(map.names.size());
        map.names.push_back(name);
        map.name_index[name] = id;
      }
      auto& ids = row->second;
      auto pos = std::lower_bound(ids.begin(), ids.end(), id);
      if (pos == ids.end() || *pos != id) ids.insert(pos, id);
    }
  }
  return map;
}

std::string render_annotated_text(const std::vector<std::vector<std::string>>& documents,
                                  const AnnotationMap& map) {
  std::string out;
  for (const auto& doc : documents) {
    for (size_t i = 0; i < doc.size(); ++i) {
      if (i) out += ' ';
      out += doc[i];
      auto it = map.token_annotations.find(doc[i]);
      if (it != map.token_annotations.end() && !it->second.empty()) {
        out += '[';
        for (size_t k = 0; k < it->second.size(); ++k) {
          if (k) out += ',';
          out += map.names[it->second[k]];
        }
        out += ']';
      }
    }
    out += '\n';
  }
  return out;
}

void attach_annotations(EncodedCorpus& corpus, const AnnotationMap& map) {
  const int32_t vocab_size = corpus.vocabulary.size();
  corpus.annotation_names.clear();
  corpus.annotation_frequencies.clear();
  corpus.word_annotations.assign(vocab_size, {});

  // keep only annotations carried by an in-vocabulary word; keep id order
  std::vector<uint8_t> used(map.names.size(), 0);
  for (const std::string& token : map.token_order) {
    if (corpus.vocabulary.index_of(token) < 0) continue;
    for (int32_t a : map.token_annotations.at(token)) used[a] = 1;
  }
  std::vector<int32_t> remap(map.names.size(), -1);
  for (size_t a = 0; a < map.names.size(); ++a) {
    if (!used[a]) continue;
    remap[a] = static_cast<int32_t>(corpus.annotation_names.size());
    corpus.annotation_names.push_back(map.names[a]);
  }
  corpus.annotation_frequencies.assign(corpus.annotation_names.size(), 0);

  for (const std::string& token : map.token_order) {
    const int32_t w = corpus.vocabulary.index_of(token);
    if (w < 0) continue;
    auto& ids = corpus.word_annotations[w];
    for (int32_t a : map.token_annotations.at(token)) ids.push_back(remap[a]);
    std::sort(ids.begin(), ids.end());
    for (int32_t a : ids) corpus.annotation_frequencies[a] += corpus.vocabulary.entry(w).count;
  }
}

}  // namespace annembed
