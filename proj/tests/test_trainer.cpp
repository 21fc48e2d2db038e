#include <cmath>
#include <random>

#include "annembed/knowledge.hpp"
#include "annembed/trainer.hpp"
#include "doctest.h"
#include "gradcheck.hpp"

using namespace annembed;

namespace {

EncodedCorpus toy_corpus(bool annotated) {
  const std::vector<std::vector<std::string>> docs = {
      {"alpha", "beta", "gamma", "delta", "eps"},
      {"beta", "gamma", "zeta", "alpha", "eta", "theta"},
      {"gamma", "delta", "eps", "zeta"},
      {"alpha", "beta"},
      {"delta"},
      {"theta"},
  };
  EncodedCorpus c = encode_corpus(docs, build_vocabulary(docs, 1));
  if (annotated) {
    PredicateArgumentSet pas;
    pas.predicates.push_back({"TYPE_left", {"alpha", "beta", "gamma"}});
    pas.predicates.push_back({"TYPE_right", {"delta", "eps"}});
    pas.predicates.push_back({"R_D_rel_1", {"alpha", "delta"}});
    attach_annotations(c, assign_annotations(pas, &c.vocabulary));
    REQUIRE(c.has_annotations());
  }
  return c;
}

void fill_random(Matrix& m, std::mt19937_64& gen, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (real& v : m.data) v = static_cast<real>(u(gen));
}

struct GradCheckSetup {
  TrainMode mode;
  OutputLayer layer;
};

// One traced lr-0 position; compares the analytic input gradient against
// finite differences of the rebuilt objective through the input parameters.
void check_position(const GradCheckSetup& s, size_t doc, size_t pos, int b, uint64_t seed) {
  CAPTURE(std::string(mode_name(s.mode)));
  CAPTURE(std::string(layer_name(s.layer)));
  CAPTURE(doc);
  CAPTURE(pos);

  const bool annotated = s.mode == TrainMode::Aawp || s.mode == TrainMode::Jwap;
  EncodedCorpus corpus = toy_corpus(annotated);
  TrainConfig cfg;
  cfg.mode = s.mode;
  cfg.layer = s.layer;
  cfg.dim = 6;
  cfg.window = 3;
  cfg.negatives = 4;
  cfg.table_size = 1 << 12;
  cfg.seed = seed;

  std::vector<uint8_t> mask;
  if (s.mode == TrainMode::Dis2Vec) {
    mask.assign(corpus.vocabulary.size(), 0);
    for (const char* t : {"alpha", "beta", "gamma"})
      mask[corpus.vocabulary.index_of(t)] = 1;
  }
  Trainer tr(corpus, cfg, mask);
  EmbeddingModel& m = tr.model();
  std::mt19937_64 gen(seed * 77 + 1);
  fill_random(m.words, gen, 0.8);
  fill_random(m.annotations, gen, 0.8);
  fill_random(m.output, gen, 0.8);
  if (s.mode == TrainMode::Dm || s.mode == TrainMode::Dbow)
    fill_random(tr.doc_vectors(), gen, 0.8);

  WorkerState w = tr.make_worker(0);
  w.trace = true;
  w.reset_trace(cfg.dim);
  tr.train_position(doc, pos, b, 0.0, w);
  if (w.trace_updates.empty()) return;  // clipped away: nothing to check

  const gradcheck::PositionReport report =
      gradcheck::check_traced_position(tr, corpus, doc, pos, b, w);
  CHECK(report.objective == doctest::Approx(report.traced).epsilon(1e-6));
  CHECK(report.probes > 0);
  CHECK(report.worst_rel < 1e-4);
}

std::vector<real> words_copy(const Trainer& t) { return t.model().words.data; }

}  // namespace

TEST_CASE("learning-rate schedule") {
  CHECK(scheduled_lr(0.025, 1e-4, 0, 1000) == doctest::Approx(0.025));
  CHECK(scheduled_lr(0.025, 1e-4, 500, 1000) == doctest::Approx(0.0125));
  CHECK(scheduled_lr(0.025, 1e-5, 999, 1000) == doctest::Approx(0.025 * 0.001));
  CHECK(scheduled_lr(0.025, 1e-4, 999, 1000) == 1e-4);   // below the floor
  CHECK(scheduled_lr(0.025, 1e-4, 1000, 1000) == 1e-4);  // floor
  // non-increasing
  double prev = 1.0;
  for (int64_t n = 0; n <= 2000; n += 7) {
    const double lr = scheduled_lr(0.05, 1e-3, n, 2000);
    CHECK(lr <= prev + 1e-15);
    CHECK(lr >= 1e-3);
    prev = lr;
  }
}

TEST_CASE("pair classification") {
  CHECK(classify_pair(true, true) == PairCategory::InDomain);
  CHECK(classify_pair(false, false) == PairCategory::OutDomain);
  CHECK(classify_pair(true, false) == PairCategory::Mixed);
  CHECK(classify_pair(false, true) == PairCategory::Mixed);
}

TEST_CASE("trainer validates its configuration") {
  const EncodedCorpus c = toy_corpus(false);
  TrainConfig cfg;
  cfg.dim = 0;
  CHECK_THROWS_AS(Trainer(c, cfg), DataError);
  cfg = {};
  cfg.window = 0;
  CHECK_THROWS_AS(Trainer(c, cfg), DataError);
  cfg = {};
  cfg.epochs = 0;
  CHECK_THROWS_AS(Trainer(c, cfg), DataError);
  cfg = {};
  cfg.lr0 = 0.01;
  cfg.min_lr = 0.02;
  CHECK_THROWS_AS(Trainer(c, cfg), DataError);
  cfg = {};
  cfg.min_lr = -0.5;
  CHECK_THROWS_AS(Trainer(c, cfg), DataError);
  cfg = {};
  cfg.mode = TrainMode::Dis2Vec;
  cfg.layer = OutputLayer::HierarchicalSoftmax;
  CHECK_THROWS_AS(Trainer(c, cfg), DataError);
  cfg = {};
  cfg.layer = OutputLayer::NegativeSampling;
  cfg.negatives = 0;
  CHECK_THROWS_AS(Trainer(c, cfg), DataError);
  cfg = {};
  CHECK_THROWS_AS(Trainer(c, cfg, std::vector<uint8_t>(3, 0)), DataError);

  CHECK_THROWS_AS(parse_mode("word2vec"), DataError);
  CHECK(parse_mode("jwap") == TrainMode::Jwap);
  CHECK(parse_layer("ns") == OutputLayer::NegativeSampling);
  CHECK_THROWS_AS(parse_layer("softmax"), DataError);
}

TEST_CASE("analytic step gradients match finite differences in every mode") {
  const std::vector<GradCheckSetup> setups = {
      {TrainMode::Cbow, OutputLayer::HierarchicalSoftmax},
      {TrainMode::Cbow, OutputLayer::NegativeSampling},
      {TrainMode::SkipGram, OutputLayer::HierarchicalSoftmax},
      {TrainMode::SkipGram, OutputLayer::NegativeSampling},
      {TrainMode::Aawp, OutputLayer::HierarchicalSoftmax},
      {TrainMode::Aawp, OutputLayer::NegativeSampling},
      {TrainMode::Jwap, OutputLayer::HierarchicalSoftmax},
      {TrainMode::Jwap, OutputLayer::NegativeSampling},
      {TrainMode::Dm, OutputLayer::HierarchicalSoftmax},
      {TrainMode::Dm, OutputLayer::NegativeSampling},
      {TrainMode::Dbow, OutputLayer::HierarchicalSoftmax},
      {TrainMode::Dbow, OutputLayer::NegativeSampling},
      {TrainMode::Dis2Vec, OutputLayer::NegativeSampling},
  };
  const std::vector<std::tuple<size_t, size_t, int>> positions = {
      {0, 2, 1}, {0, 0, 3}, {1, 3, 2}, {1, 5, 3}, {2, 1, 1}, {3, 1, 3}, {4, 0, 2},
  };
  uint64_t seed = 1000;
  for (const auto& s : setups)
    for (const auto& [doc, pos, b] : positions) check_position(s, doc, pos, b, ++seed);
}

TEST_CASE("annotation-aware modes with an empty map reduce to the plain trainers") {
  const EncodedCorpus plain = toy_corpus(false);
  TrainConfig base;
  base.dim = 12;
  base.window = 3;
  base.epochs = 2;
  base.seed = 97;
  base.negatives = 3;
  base.table_size = 1 << 14;
  base.lr0 = 0.05;
  base.min_lr = 1e-4;

  auto run = [&](TrainMode mode, OutputLayer layer) {
    TrainConfig cfg = base;
    cfg.mode = mode;
    cfg.layer = layer;
    Trainer t(plain, cfg);
    t.train();
    return std::pair{t.model().words.data, t.model().output.data};
  };

  for (OutputLayer layer : {OutputLayer::HierarchicalSoftmax, OutputLayer::NegativeSampling}) {
    CAPTURE(std::string(layer_name(layer)));
    const auto cbow = run(TrainMode::Cbow, layer);
    const auto aawp = run(TrainMode::Aawp, layer);
    CHECK(aawp.first == cbow.first);    // bit-identical
    CHECK(aawp.second == cbow.second);
    const auto sg = run(TrainMode::SkipGram, layer);
    const auto jwap = run(TrainMode::Jwap, layer);
    CHECK(jwap.first == sg.first);
    CHECK(jwap.second == sg.second);
  }

  // with annotations attached the joint trainers genuinely diverge
  const EncodedCorpus annotated = toy_corpus(true);
  TrainConfig cfg = base;
  cfg.mode = TrainMode::Aawp;
  Trainer a(annotated, cfg);
  a.train();
  cfg.mode = TrainMode::Cbow;
  Trainer c(annotated, cfg);
  c.train();
  CHECK(a.model().words.data != c.model().words.data);
}

TEST_CASE("empty domain vocabulary makes dis2vec the plain negative-sampling trainer") {
  const EncodedCorpus plain = toy_corpus(false);
  TrainConfig cfg;
  cfg.dim = 10;
  cfg.window = 2;
  cfg.epochs = 2;
  cfg.seed = 55;
  cfg.layer = OutputLayer::NegativeSampling;
  cfg.negatives = 4;
  cfg.table_size = 1 << 14;

  cfg.mode = TrainMode::Dis2Vec;
  Trainer d(plain, cfg);
  d.train();
  cfg.mode = TrainMode::SkipGram;
  Trainer s(plain, cfg);
  s.train();
  CHECK(d.model().words.data == s.model().words.data);
  CHECK(d.model().output.data == s.model().output.data);
}

TEST_CASE("fixed seed and one worker reproduce bit-identical models") {
  const EncodedCorpus corpus = toy_corpus(true);
  for (TrainMode mode : {TrainMode::Cbow, TrainMode::Jwap, TrainMode::Dm, TrainMode::Dbow,
                         TrainMode::Dis2Vec}) {
    CAPTURE(std::string(mode_name(mode)));
    TrainConfig cfg;
    cfg.mode = mode;
    cfg.layer = mode == TrainMode::Dis2Vec ? OutputLayer::NegativeSampling
                                           : OutputLayer::HierarchicalSoftmax;
    cfg.dim = 9;
    cfg.window = 3;
    cfg.epochs = 2;
    cfg.seed = 1234;
    cfg.table_size = 1 << 14;
    std::vector<uint8_t> mask;
    if (mode == TrainMode::Dis2Vec) {
      mask.assign(corpus.vocabulary.size(), 0);
      mask[corpus.vocabulary.index_of("alpha")] = 1;
      mask[corpus.vocabulary.index_of("delta")] = 1;
    }
    Trainer one(corpus, cfg, mask);
    one.train();
    Trainer two(corpus, cfg, mask);
    two.train();
    CHECK(one.model().words.data == two.model().words.data);
    CHECK(one.model().annotations.data == two.model().annotations.data);
    CHECK(one.model().output.data == two.model().output.data);

    cfg.seed = 4321;
    Trainer other(corpus, cfg, mask);
    other.train();
    CHECK(one.model().words.data != other.model().words.data);
  }
}

TEST_CASE("every mode trains to a finite, changed model") {
  const EncodedCorpus corpus = toy_corpus(true);
  std::vector<uint8_t> mask(corpus.vocabulary.size(), 0);
  mask[corpus.vocabulary.index_of("alpha")] = 1;
  mask[corpus.vocabulary.index_of("beta")] = 1;
  for (TrainMode mode : {TrainMode::Cbow, TrainMode::SkipGram, TrainMode::Aawp, TrainMode::Jwap,
                         TrainMode::Dm, TrainMode::Dbow, TrainMode::Dis2Vec}) {
    for (OutputLayer layer : {OutputLayer::HierarchicalSoftmax, OutputLayer::NegativeSampling}) {
      if (mode == TrainMode::Dis2Vec && layer == OutputLayer::HierarchicalSoftmax) continue;
      CAPTURE(std::string(mode_name(mode)));
      CAPTURE(std::string(layer_name(layer)));
      TrainConfig cfg;
      cfg.mode = mode;
      cfg.layer = layer;
      cfg.dim = 7;
      cfg.window = 2;
      cfg.epochs = 3;
      cfg.seed = 777;
      cfg.table_size = 1 << 14;
      cfg.sample_t = mode == TrainMode::Cbow ? 1e-2 : 0.0;  // exercise downsampling once
      Trainer t(corpus, cfg, mode == TrainMode::Dis2Vec ? mask : std::vector<uint8_t>{});
      const std::vector<real> init = words_copy(t);
      const std::vector<real> docs_init = t.doc_vectors().data;
      t.train();
      CHECK(t.model().words.all_finite());
      CHECK(t.model().annotations.all_finite());
      CHECK(t.model().output.all_finite());
      if (mode == TrainMode::Dbow) {
        CHECK(t.model().words.data == init);  // dbow never reads word inputs
        CHECK(t.doc_vectors().data != docs_init);
      } else {
        CHECK(t.model().words.data != init);
      }
      if (mode == TrainMode::Dm || mode == TrainMode::Dbow)
        CHECK(t.doc_vectors().all_finite());
    }
  }
}

TEST_CASE("several workers complete and stay finite") {
  // build a corpus big enough that the threads actually overlap
  std::mt19937_64 gen(11);
  std::vector<std::vector<std::string>> docs;
  for (int d = 0; d < 60; ++d) {
    std::vector<std::string> doc;
    for (int i = 0; i < 30; ++i) doc.push_back("w" + std::to_string(gen() % 50));
    docs.push_back(doc);
  }
  const EncodedCorpus corpus = encode_corpus(docs, build_vocabulary(docs, 1));
  TrainConfig cfg;
  cfg.mode = TrainMode::SkipGram;
  cfg.layer = OutputLayer::NegativeSampling;
  cfg.dim = 16;
  cfg.epochs = 2;
  cfg.workers = 4;
  cfg.table_size = 1 << 14;
  Trainer t(corpus, cfg);
  t.train();
  CHECK(t.model().words.all_finite());
  CHECK(t.model().output.all_finite());
}

TEST_CASE("window clipping at document edges") {
  const EncodedCorpus corpus = toy_corpus(false);
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.window = 5;
  cfg.table_size = 1 << 10;
  Trainer t(corpus, cfg);
  WorkerState w = t.make_worker(0);

  // doc 0 has 5 tokens; position 0 with b=5 sees only the 4 to the right
  t.train_position(0, 0, 5, 0.0, w);
  CHECK(w.context.size() == 4);
  t.train_position(0, 2, 1, 0.0, w);
  CHECK(w.context.size() == 2);
  t.train_position(0, 4, 3, 0.0, w);
  CHECK(w.context.size() == 3);
  // single-token document: no context, the position is skipped
  w.trace = true;
  w.reset_trace(cfg.dim);
  t.train_position(5, 0, 3, 0.1, w);
  CHECK(w.trace_updates.empty());
}

TEST_CASE("target-only inputs still train when the target carries annotations") {
  const EncodedCorpus corpus = toy_corpus(true);
  TrainConfig cfg;
  cfg.mode = TrainMode::Aawp;
  cfg.dim = 5;
  cfg.window = 2;
  Trainer t(corpus, cfg);
  WorkerState w = t.make_worker(0);
  w.trace = true;
  w.reset_trace(cfg.dim);
  // doc 4 is the lone token "delta", which carries TYPE_right and R_D_rel_1
  t.train_position(4, 0, 2, 0.0, w);
  CHECK(w.trace_updates.size() == 1);
}

TEST_CASE("skip-gram touches only the target input row") {
  const EncodedCorpus corpus = toy_corpus(false);
  TrainConfig cfg;
  cfg.mode = TrainMode::SkipGram;
  cfg.dim = 6;
  cfg.window = 2;
  Trainer t(corpus, cfg);
  const std::vector<real> before = t.model().words.data;
  WorkerState w = t.make_worker(0);
  t.train_position(0, 2, 2, 0.1, w);

  const int32_t target = corpus.documents[0][2];
  const int dim = cfg.dim;
  for (int32_t word = 0; word < corpus.vocabulary.size(); ++word) {
    bool changed = false;
    for (int j = 0; j < dim; ++j)
      changed = changed ||
                t.model().words.data[word * dim + j] != before[word * dim + j];
    CHECK(changed == (word == target));
  }
}

TEST_CASE("joint training moves annotation vectors through the companion pass") {
  const EncodedCorpus corpus = toy_corpus(true);
  TrainConfig cfg;
  cfg.mode = TrainMode::Jwap;
  cfg.dim = 6;
  cfg.window = 2;
  Trainer t(corpus, cfg);
  std::mt19937_64 gen(5);
  fill_random(t.model().output, gen, 0.5);
  const std::vector<real> before = t.model().annotations.data;
  WorkerState w = t.make_worker(0);
  // doc 0 position 1 ("beta"): context includes alpha/gamma, both annotated
  t.train_position(0, 1, 1, 0.1, w);
  CHECK(t.model().annotations.data != before);
}

TEST_CASE("doc-vector modes leave word inputs alone where they should") {
  const EncodedCorpus corpus = toy_corpus(false);
  TrainConfig cfg;
  cfg.mode = TrainMode::Dbow;
  cfg.dim = 6;
  cfg.window = 2;
  Trainer t(corpus, cfg);
  std::mt19937_64 gen(3);
  fill_random(t.model().output, gen, 0.5);  // zero outputs would zero the input gradient
  const std::vector<real> words_before = t.model().words.data;
  const std::vector<real> docs_before = t.doc_vectors().data;
  WorkerState w = t.make_worker(0);
  t.train_position(1, 2, 2, 0.1, w);
  CHECK(t.model().words.data == words_before);  // dbow never reads word inputs
  CHECK(t.doc_vectors().data != docs_before);
}

TEST_CASE("dis2vec branches behave per the trace") {
  const EncodedCorpus corpus = toy_corpus(false);
  std::vector<uint8_t> mask(corpus.vocabulary.size(), 0);
  const int32_t alpha = corpus.vocabulary.index_of("alpha");
  const int32_t beta = corpus.vocabulary.index_of("beta");
  mask[alpha] = 1;
  mask[beta] = 1;

  TrainConfig cfg;
  cfg.mode = TrainMode::Dis2Vec;
  cfg.layer = OutputLayer::NegativeSampling;
  cfg.dim = 6;
  cfg.window = 1;
  cfg.negatives = 3;
  cfg.table_size = 1 << 12;
  Trainer t(corpus, cfg, mask);
  WorkerState w = t.make_worker(0);
  w.trace = true;

  // doc 3 is "alpha beta": an in-domain pair both ways
  w.reset_trace(cfg.dim);
  t.train_position(3, 0, 1, 0.0, w);
  REQUIRE(w.trace_updates.size() == 1);
  CHECK(w.trace_updates[0].leaf == beta);
  CHECK(w.trace_updates[0].label == 1.0);
  CHECK(!w.trace_updates[0].negatives.empty());

  // doc 0 position 3 ("delta" with window 1: gamma, eps) is out/out + out/out
  w.reset_trace(cfg.dim);
  t.train_position(0, 3, 1, 0.0, w);
  REQUIRE(w.trace_updates.size() == 2);
  for (const auto& u : w.trace_updates) CHECK(u.label == 1.0);

  // doc 0 position 0 ("alpha" next to "beta"... window 1 gives "beta") stays
  // in-domain; position 1 ("beta" between alpha and gamma) mixes at gamma
  w.reset_trace(cfg.dim);
  t.train_position(0, 1, 1, 0.0, w);
  REQUIRE(w.trace_updates.size() == 2);
  CHECK(w.trace_updates[0].leaf == alpha);          // in-domain: negatives drawn
  CHECK(!w.trace_updates[0].negatives.empty());
  const int32_t gamma = corpus.vocabulary.index_of("gamma");
  CHECK(w.trace_updates[1].leaf == gamma);          // mixed: no negatives
  CHECK(w.trace_updates[1].negatives.empty());
  CHECK((w.trace_updates[1].label == 0.0 || w.trace_updates[1].label == 1.0));
}

TEST_CASE("dis2vec in-domain negatives come from the requested pools") {
  // vocabulary split so both pools are nonempty; run many in-domain positions
  // and check every negative is a word (never the excluded context)
  std::vector<std::vector<std::string>> docs;
  for (int i = 0; i < 20; ++i) docs.push_back({"in1", "in2", "out1", "out2", "in1", "out3"});
  const EncodedCorpus corpus = encode_corpus(docs, build_vocabulary(docs, 1));
  std::vector<uint8_t> mask(corpus.vocabulary.size(), 0);
  mask[corpus.vocabulary.index_of("in1")] = 1;
  mask[corpus.vocabulary.index_of("in2")] = 1;

  TrainConfig cfg;
  cfg.mode = TrainMode::Dis2Vec;
  cfg.layer = OutputLayer::NegativeSampling;
  cfg.dim = 4;
  cfg.window = 1;
  cfg.negatives = 6;
  cfg.table_size = 1 << 12;
  Trainer t(corpus, cfg, mask);
  WorkerState w = t.make_worker(0);
  w.trace = true;

  const int32_t in1 = corpus.vocabulary.index_of("in1");
  const int32_t in2 = corpus.vocabulary.index_of("in2");
  w.reset_trace(cfg.dim);
  for (int rep = 0; rep < 50; ++rep) t.train_position(0, 0, 1, 0.0, w);  // in1 -> in2
  bool saw_in_pool = false, saw_out_pool = false;
  for (const auto& u : w.trace_updates) {
    REQUIRE(u.leaf == in2);
    for (int32_t neg : u.negatives) {
      CHECK(neg != in2);  // the context word is excluded by redraw
      if (neg == in1) saw_in_pool = true;
      if (!mask[neg]) saw_out_pool = true;
    }
  }
  CHECK(saw_in_pool);   // with pi_s = 0.5 both pools get used
  CHECK(saw_out_pool);
}
