// Command-line front end: train embedding models, compile knowledge graphs
// into per-token annotations, retrofit vectors over a similarity graph, and
// score vector sets on ranked similarity pairs.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "annembed/corpus.hpp"
#include "annembed/eval.hpp"
#include "annembed/knowledge.hpp"
#include "annembed/retrofit.hpp"
#include "annembed/trainer.hpp"
#include "annembed/vector_io.hpp"

using namespace annembed;

namespace {

struct TrainArgs {
  std::string corpus, phrases, annotations, domain_vocab;
  std::string output_words, output_annotations, doc_vectors;
  std::string mode = "cbow", layer = "hs";
  int64_t min_count = 1;
  TrainConfig cfg;
};

int run_train(const TrainArgs& a) {
  PhraseTable phrases;
  const PhraseTable* pt = nullptr;
  if (!a.phrases.empty()) {
    phrases = PhraseTable::load(a.phrases);
    pt = &phrases;
  }
  const auto docs = load_corpus_file(a.corpus, pt);
  EncodedCorpus corpus = encode_corpus(docs, build_vocabulary(docs, a.min_count));
  if (!a.annotations.empty()) attach_annotations(corpus, load_annotation_map(a.annotations));

  TrainConfig cfg = a.cfg;
  cfg.mode = parse_mode(a.mode);
  cfg.layer = parse_layer(a.layer);

  std::vector<uint8_t> mask;
  if (!a.domain_vocab.empty()) {
    mask.assign(corpus.vocabulary.size(), 0);
    int64_t missing = 0;
    for (const auto& tok : load_token_list(a.domain_vocab)) {
      const int32_t id = corpus.vocabulary.index_of(tok);
      if (id >= 0)
        mask[id] = 1;
      else
        ++missing;
    }
    if (missing > 0)
      std::fprintf(stderr, "note: %lld domain tokens are not in the training vocabulary\n",
                   static_cast<long long>(missing));
  }

  std::fprintf(stderr,
               "config: train mode=%s layer=%s dim=%d window=%d epochs=%d lr=%g min-lr=%g "
               "negatives=%d sample=%g min-count=%lld seed=%llu workers=%d dbow-samples=%d "
               "pi-s=%g pi-o=%g dis-alpha=%g table-size=%lld\n",
               mode_name(cfg.mode), layer_name(cfg.layer), cfg.dim, cfg.window, cfg.epochs,
               cfg.lr0, cfg.min_lr, cfg.negatives, cfg.sample_t,
               static_cast<long long>(a.min_count), static_cast<unsigned long long>(cfg.seed),
               cfg.workers, cfg.dbow_samples, cfg.pi_s, cfg.pi_o, cfg.dis_alpha,
               static_cast<long long>(cfg.table_size));
  std::fprintf(stderr, "corpus: %zu documents, %lld/%lld tokens retained, vocabulary %d",
               corpus.documents.size(),
               static_cast<long long>(corpus.vocabulary.retained_tokens()),
               static_cast<long long>(corpus.vocabulary.total_tokens()),
               corpus.vocabulary.size());
  if (corpus.has_annotations())
    std::fprintf(stderr, ", annotations %zu", corpus.annotation_names.size());
  std::fputc('\n', stderr);

  Trainer trainer(corpus, cfg, std::move(mask));
  trainer.train();

  write_vectors(word_vector_set(trainer.model(), corpus.vocabulary), a.output_words);
  if (!a.output_annotations.empty()) {
    if (cfg.mode != TrainMode::Aawp && cfg.mode != TrainMode::Jwap)
      throw DataError("annotation vectors are only trained by the aawp and jwap modes");
    write_vectors(annotation_vector_set(trainer.model(), corpus.annotation_names),
                  a.output_annotations);
  }
  if (!a.doc_vectors.empty()) {
    if (cfg.mode != TrainMode::Dm && cfg.mode != TrainMode::Dbow)
      throw DataError("doc vectors are only trained by the dm and dbow modes");
    write_vectors(doc_vector_set(trainer.doc_vectors()), a.doc_vectors);
  }
  return 0;
}

struct AnnotateArgs {
  std::string triples, types, domain_vocab;
  std::string corpus, phrases;
  std::string output, render;
  int64_t min_count = 1;
};

int run_annotate(const AnnotateArgs& a) {
  std::fprintf(stderr, "config: annotate triples=%s types=%s domain-vocab=%s corpus=%s\n",
               a.triples.c_str(), a.types.empty() ? "-" : a.types.c_str(),
               a.domain_vocab.empty() ? "-" : a.domain_vocab.c_str(),
               a.corpus.empty() ? "-" : a.corpus.c_str());
  const KnowledgeGraph graph = parse_graph(a.triples, a.types, a.domain_vocab);
  const PredicateArgumentSet pas = derive_predicates(graph);

  PhraseTable phrases;
  const PhraseTable* pt = nullptr;
  if (!a.phrases.empty()) {
    phrases = PhraseTable::load(a.phrases);
    pt = &phrases;
  }
  std::vector<std::vector<std::string>> docs;
  Vocabulary vocab;
  bool have_vocab = false;
  if (!a.corpus.empty()) {
    docs = load_corpus_file(a.corpus, pt);
    vocab = build_vocabulary(docs, a.min_count);
    have_vocab = true;
  }

  const AnnotationMap map = assign_annotations(pas, have_vocab ? &vocab : nullptr);
  save_annotation_map(map, a.output);
  for (const std::string& s : map.skipped) {
    const size_t tab = s.find('\t');
    std::fprintf(stderr, "skipped (not in vocabulary): %s from %s\n",
                 s.substr(0, tab).c_str(), s.substr(tab + 1).c_str());
  }
  std::fprintf(stderr, "predicates %zu, annotations %zu, annotated tokens %zu, skipped %zu\n",
               pas.predicates.size(), map.names.size(), map.token_order.size(),
               map.skipped.size());

  if (!a.render.empty()) {
    if (a.corpus.empty()) throw DataError("--render needs --corpus");
    std::ofstream out(a.render);
    if (!out) throw DataError("cannot write rendered text: " + a.render);
    out << render_annotated_text(docs, map);
  }
  return 0;
}

struct EvalArgs {
  std::string vectors, pairs, universe, annotations, report;
};

int run_eval(const EvalArgs& a) {
  std::fprintf(stderr, "config: eval vectors=%s pairs=%s universe=%s annotations=%s\n",
               a.vectors.c_str(), a.pairs.c_str(), a.universe.empty() ? "-" : a.universe.c_str(),
               a.annotations.empty() ? "-" : a.annotations.c_str());
  const VectorSet vs = read_vectors(a.vectors);
  EvalPairSet set;
  set.pairs = load_pair_file(a.pairs);
  if (!a.universe.empty()) {
    set.universe = load_token_list(a.universe);
  } else if (!a.annotations.empty()) {
    set.universe = tokens_with_annotation(load_annotation_map(a.annotations), "Voc");
    if (set.universe.empty())
      throw DataError("eval: no tokens carry the Voc annotation in " + a.annotations);
  } else {
    throw DataError("eval: need --universe or --annotations");
  }

  const MrrReport report = mrr(vs, set);
  std::printf("pairs %zu universe %zu\n", set.pairs.size(), set.universe.size());
  std::printf("normalized mean rank %.6f\n", report.value);

  if (!a.report.empty()) {
    std::ofstream out(a.report);
    if (!out) throw DataError("cannot write report: " + a.report);
    out << "#query\ttarget\trank_fwd\trank_rev\n";
    for (const auto& row : report.rows)
      out << row.a << '\t' << row.b << '\t' << row.rank_ab << '\t' << row.rank_ba << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", report.value);
    out << "#normalized_mean_rank\t" << buf << '\n';
  }
  return 0;
}

struct NearestArgs {
  std::string vectors, token, universe;
  int k = 10;
};

int run_nearest(const NearestArgs& a) {
  std::fprintf(stderr, "config: nearest vectors=%s token=%s k=%d universe=%s\n",
               a.vectors.c_str(), a.token.c_str(), a.k,
               a.universe.empty() ? "-" : a.universe.c_str());
  const VectorSet vs = read_vectors(a.vectors);
  std::vector<std::string> universe;
  const std::vector<std::string>* restrict_to = nullptr;
  if (!a.universe.empty()) {
    universe = load_token_list(a.universe);
    restrict_to = &universe;
  }
  for (const auto& [token, cos] : nearest_neighbors(vs, a.token, a.k, restrict_to))
    std::printf("%s\t%.6f\n", token.c_str(), cos);
  return 0;
}

struct RetrofitArgs {
  std::string vectors, graph, output;
  std::string format = "edges";
  int iterations = 10;
  double alpha = 1.0;
  double beta = -1.0;  // < 0: per-edge 1/max degree
};

int run_retrofit(const RetrofitArgs& a) {
  std::fprintf(stderr, "config: retrofit vectors=%s graph=%s format=%s iterations=%d alpha=%g beta=%s\n",
               a.vectors.c_str(), a.graph.c_str(), a.format.c_str(), a.iterations, a.alpha,
               a.beta < 0 ? "invdeg" : std::to_string(a.beta).c_str());
  const VectorSet vs = read_vectors(a.vectors);
  auto vertex = [&](const std::string& t) {
    const int32_t i = vs.find(t);
    if (i < 0) throw DataError("retrofit: graph vertex has no vector: " + t);
    return i;
  };

  std::vector<std::pair<int32_t, int32_t>> edges;
  if (a.format == "edges") {
    for (const auto& [x, y] : load_pair_file(a.graph)) edges.emplace_back(vertex(x), vertex(y));
  } else {  // annotations: tokens sharing an annotation form a clique
    const AnnotationMap map = load_annotation_map(a.graph);
    std::vector<std::vector<int32_t>> members(map.names.size());
    for (const std::string& token : map.token_order) {
      const int32_t v = vertex(token);
      for (int32_t id : map.token_annotations.at(token)) members[id].push_back(v);
    }
    for (const auto& group : members)
      for (size_t i = 0; i < group.size(); ++i)
        for (size_t j = i + 1; j < group.size(); ++j) edges.emplace_back(group[i], group[j]);
  }

  RetrofitGraph g = make_retrofit_graph(static_cast<int64_t>(vs.tokens.size()), std::move(edges));
  if (a.alpha != 1.0) g.alpha.assign(g.alpha.size(), a.alpha);
  if (a.beta >= 0) g.beta.assign(g.beta.size(), a.beta);
  std::fprintf(stderr, "graph: %lld vertices, %zu edges\n",
               static_cast<long long>(g.vertex_count), g.edges.size());

  VectorSet out;
  out.tokens = vs.tokens;
  out.index = vs.index;
  out.vectors = retrofit(vs.vectors, g, a.iterations);
  write_vectors(out, a.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"domain embedding toolkit: annotation-aware training, knowledge compilation, "
               "retrofitting, ranked evaluation"};
  app.require_subcommand(1);

  TrainArgs train;
  CLI::App* t = app.add_subcommand("train", "train embedding vectors from a corpus");
  t->add_option("--corpus", train.corpus, "corpus file, one document per line")->required();
  t->add_option("--phrases", train.phrases, "multi-word merge rules (surface<TAB>merged)");
  t->add_option("--annotations", train.annotations, "annotation map (token<TAB>a,b,...)");
  t->add_option("--domain-vocab", train.domain_vocab, "domain token list (dis2vec)");
  t->add_option("--mode", train.mode, "cbow|sg|aawp|jwap|dm|dbow|dis2vec")
      ->check(CLI::IsMember({"cbow", "sg", "aawp", "jwap", "dm", "dbow", "dis2vec"}))
      ->capture_default_str();
  t->add_option("--output-layer", train.layer, "hs|ns")
      ->check(CLI::IsMember({"hs", "ns"}))
      ->capture_default_str();
  t->add_option("--dim", train.cfg.dim, "embedding dimension")->capture_default_str();
  t->add_option("--window", train.cfg.window, "max half window")->capture_default_str();
  t->add_option("--epochs", train.cfg.epochs, "passes over the corpus")->capture_default_str();
  t->add_option("--lr", train.cfg.lr0, "starting learning rate")->capture_default_str();
  t->add_option("--min-lr", train.cfg.min_lr, "learning-rate floor")->capture_default_str();
  t->add_option("--negatives", train.cfg.negatives, "negative samples per prediction")
      ->capture_default_str();
  t->add_option("--sample", train.cfg.sample_t, "downsampling threshold, 0 disables")
      ->capture_default_str();
  t->add_option("--min-count", train.min_count, "discard rarer tokens")->capture_default_str();
  t->add_option("--seed", train.cfg.seed, "random seed")->capture_default_str();
  t->add_option("--workers", train.cfg.workers, "training threads")->capture_default_str();
  t->add_option("--dbow-samples", train.cfg.dbow_samples, "dbow targets per position")
      ->capture_default_str();
  t->add_option("--pi-s", train.cfg.pi_s, "dis2vec out-of-domain negative probability")
      ->capture_default_str();
  t->add_option("--pi-o", train.cfg.pi_o, "dis2vec dissimilarity probability")
      ->capture_default_str();
  t->add_option("--dis-alpha", train.cfg.dis_alpha, "dis2vec pool smoothing power")
      ->capture_default_str();
  t->add_option("--table-size", train.cfg.table_size, "sampling table entries")
      ->capture_default_str();
  t->add_option("--output-words", train.output_words, "word vector output")->required();
  t->add_option("--output-annotations", train.output_annotations, "annotation vector output");
  t->add_option("--doc-vectors", train.doc_vectors, "doc vector output (dm/dbow)");
  t->add_flag("--verbose", train.cfg.verbose, "progress on stderr");

  AnnotateArgs annotate;
  CLI::App* n = app.add_subcommand("annotate", "compile a knowledge graph into annotations");
  n->add_option("--triples", annotate.triples, "subject<TAB>relation<TAB>object")->required();
  n->add_option("--types", annotate.types, "node<TAB>category");
  n->add_option("--domain-vocab", annotate.domain_vocab, "domain token list");
  n->add_option("--corpus", annotate.corpus, "corpus to filter arguments against");
  n->add_option("--phrases", annotate.phrases, "multi-word merge rules");
  n->add_option("--min-count", annotate.min_count, "vocabulary threshold")->capture_default_str();
  n->add_option("--output", annotate.output, "annotation map output")->required();
  n->add_option("--render", annotate.render, "write corpus with inline annotations");

  EvalArgs eval;
  CLI::App* e = app.add_subcommand("eval", "rank similarity pairs against a candidate universe");
  e->add_option("--vectors", eval.vectors, "vector file")->required();
  e->add_option("--pairs", eval.pairs, "token<TAB>token rows")->required();
  e->add_option("--universe", eval.universe, "candidate token list");
  e->add_option("--annotations", eval.annotations,
                "annotation map; the universe is every Voc-annotated token");
  e->add_option("--report", eval.report, "per-pair rank table output");

  NearestArgs nearest;
  CLI::App* q = app.add_subcommand("nearest", "top-k cosine neighbors of a token");
  q->add_option("--vectors", nearest.vectors, "vector file")->required();
  q->add_option("--token", nearest.token, "query token")->required();
  q->add_option("-k,--k", nearest.k, "neighbors to print")->capture_default_str();
  q->add_option("--universe", nearest.universe, "restrict candidates to this list");

  RetrofitArgs retro;
  CLI::App* r = app.add_subcommand("retrofit", "pull vectors toward graph neighbors");
  r->add_option("--vectors", retro.vectors, "vector file")->required();
  r->add_option("--graph", retro.graph, "edge list or annotation map")->required();
  r->add_option("--graph-format", retro.format, "edges|annotations")
      ->check(CLI::IsMember({"edges", "annotations"}))
      ->capture_default_str();
  r->add_option("--iterations", retro.iterations, "coordinate-descent sweeps")
      ->capture_default_str();
  r->add_option("--alpha", retro.alpha, "attachment weight to the original vectors")
      ->capture_default_str();
  r->add_option("--beta", retro.beta, "uniform edge weight; default 1/max endpoint degree");
  r->add_option("--output", retro.output, "retrofitted vector output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*t) return run_train(train);
    if (*n) return run_annotate(annotate);
    if (*e) return run_eval(eval);
    if (*q) return run_nearest(nearest);
    if (*r) return run_retrofit(retro);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }
  return 0;
}
