#include <algorithm>
#include <cmath>
#include <random>

#include "annembed/eval.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace annembed;

namespace {

VectorSet make_set(const std::vector<std::pair<std::string, std::vector<real>>>& rows) {
  VectorSet s;
  s.vectors.cols = static_cast<int>(rows.front().second.size());
  for (const auto& [token, v] : rows) s.add(token, v.data());
  return s;
}

// independent rank oracle: sort candidate cosines descending and count
double oracle_cosine(const real* u, const real* v, int dim) {
  double uu = 0, vv = 0, uv = 0;
  for (int i = 0; i < dim; ++i) {
    uu += static_cast<double>(u[i]) * u[i];
    vv += static_cast<double>(v[i]) * v[i];
    uv += static_cast<double>(u[i]) * v[i];
  }
  return uv / (std::sqrt(uu) * std::sqrt(vv));
}

int oracle_rank(const VectorSet& vectors, const std::string& query, const std::string& target,
                const std::vector<std::string>& universe) {
  const int dim = vectors.vectors.cols;
  const real* q = vectors.vectors.row(vectors.find(query));
  std::vector<double> sims;
  double target_sim = 0;
  for (const auto& token : universe) {
    if (token == query) continue;
    const real* v = vectors.vectors.row(vectors.find(token));
    const double s = oracle_cosine(q, v, dim);
    if (token == target)
      target_sim = s;
    else
      sims.push_back(s);
  }
  std::sort(sims.begin(), sims.end(), std::greater<>());
  int rank = 1;
  for (double s : sims) rank += s > target_sim ? 1 : 0;
  return rank;
}

}  // namespace

TEST_CASE("cosine basics") {
  std::vector<real> a = {1, 0}, b = {0, 1}, c = {2, 0}, d = {-3, 0}, z = {0, 0};
  CHECK(cosine(a, b) == doctest::Approx(0.0));
  CHECK(cosine(a, c) == doctest::Approx(1.0));
  CHECK(cosine(a, d) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(cosine(a, z), DataError);
  CHECK_THROWS_AS(cosine(z, z), DataError);
  // clamped even when rounding would spill past 1
  std::vector<real> e = {1e-20f, 1e-20f};
  const double s = cosine(e, e);
  CHECK(s <= 1.0);
  CHECK(s >= -1.0);
}

TEST_CASE("rank of a pair, hand-checked") {
  // query q at (1,0); candidates at decreasing cosine
  const VectorSet s = make_set({
      {"q", {1, 0}},
      {"best", {10, 1}},
      {"good", {1, 1}},
      {"bad", {-1, 4}},
      {"worst", {-2, -0.1f}},
  });
  const std::vector<std::string> universe = {"q", "best", "good", "bad", "worst"};
  CHECK(rank_of_pair(s, "q", "best", universe) == 1);
  CHECK(rank_of_pair(s, "q", "good", universe) == 2);
  CHECK(rank_of_pair(s, "q", "bad", universe) == 3);
  CHECK(rank_of_pair(s, "q", "worst", universe) == 4);
}

TEST_CASE("rank matches the sorting oracle on random models") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<int> nt(3, 20), nd(2, 8);
    const int t = nt(gen), dim = nd(gen);
    std::uniform_real_distribution<real> val(-1.0f, 1.0f);
    VectorSet s;
    s.vectors.cols = dim;
    std::vector<std::string> universe;
    for (int i = 0; i < t; ++i) {
      std::vector<real> v(dim);
      bool nonzero = false;
      while (!nonzero) {
        for (real& x : v) x = val(gen);
        for (real x : v) nonzero = nonzero || x != 0.0f;
      }
      const std::string token = "t" + std::to_string(i);
      s.add(token, v.data());
      universe.push_back(token);
    }
    std::uniform_int_distribution<int> pick(0, t - 1);
    const int qi = pick(gen);
    int ti = pick(gen);
    while (ti == qi) ti = pick(gen);
    const std::string query = universe[static_cast<size_t>(qi)];
    const std::string target = universe[static_cast<size_t>(ti)];
    const int got = rank_of_pair(s, query, target, universe);
    CHECK(got == oracle_rank(s, query, target, universe));
    CHECK(got >= 1);
    CHECK(got <= t - 1);
  }
}

TEST_CASE("normalized mean rank: perfect pairs on a ten-token universe") {
  // ten tokens in five tight pairs: each member's partner is its nearest
  // neighbor, so every rank is 1 and the score is T*2L/(T*2L * T) = 1/T
  VectorSet s;
  s.vectors.cols = 2;
  EvalPairSet set;
  const double tau = 2.0 * std::acos(-1.0) / 5.0;
  for (int p = 0; p < 5; ++p) {
    const double angle = tau * p;
    const real x = static_cast<real>(std::cos(angle));
    const real y = static_cast<real>(std::sin(angle));
    const std::string a = "a" + std::to_string(p), b = "b" + std::to_string(p);
    const real va[2] = {x, y};
    const real vb[2] = {x * 1.5f + 0.001f * y, y * 1.5f - 0.001f * x};  // same direction, nudged
    s.add(a, va);
    s.add(b, vb);
    set.universe.push_back(a);
    set.universe.push_back(b);
    set.pairs.emplace_back(a, b);
  }
  const MrrReport r = mrr(s, set);
  CHECK(r.value == doctest::Approx(0.10));
  REQUIRE(r.rows.size() == 5);
  for (const auto& row : r.rows) {
    CHECK(row.rank_ab == 1);
    CHECK(row.rank_ba == 1);
  }
}

TEST_CASE("normalized mean rank hits its floor and ceiling") {
  // floor: target always rank 1. ceiling: target always last.
  VectorSet s = make_set({
      {"q", {1, 0}},
      {"mid1", {1, 0.1f}},
      {"mid2", {1, 1}},
      {"far", {-1, 0}},
  });
  EvalPairSet best;
  best.universe = {"q", "mid1", "mid2", "far"};
  best.pairs = {{"q", "mid1"}, {"mid1", "q"}};
  // q's nearest is mid1 and vice versa: all four ranks are 1
  const MrrReport rb = mrr(s, best);
  CHECK(rb.value == doctest::Approx(1.0 / 4.0));

  EvalPairSet worst;
  worst.universe = {"q", "mid1", "mid2", "far"};
  worst.pairs = {{"q", "far"}, {"far", "q"}};
  const MrrReport rw = mrr(s, worst);
  CHECK(rw.value == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("mean rank is the average of the row ranks") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<real> val(-1.0f, 1.0f);
  VectorSet s;
  s.vectors.cols = 3;
  EvalPairSet set;
  for (int i = 0; i < 12; ++i) {
    std::vector<real> v = {val(gen), val(gen), val(gen)};
    if (v[0] == 0 && v[1] == 0 && v[2] == 0) v[0] = 1;
    s.add("t" + std::to_string(i), v.data());
    set.universe.push_back("t" + std::to_string(i));
  }
  set.pairs = {{"t0", "t3"}, {"t1", "t7"}, {"t11", "t2"}};
  const MrrReport r = mrr(s, set);
  int64_t total = 0;
  for (const auto& row : r.rows) {
    total += row.rank_ab + row.rank_ba;
    CHECK(row.rank_ab ==
          oracle_rank(s, row.a, row.b, set.universe));
    CHECK(row.rank_ba ==
          oracle_rank(s, row.b, row.a, set.universe));
  }
  CHECK(r.value == doctest::Approx(static_cast<double>(total) /
                                   (12.0 * 2.0 * static_cast<double>(set.pairs.size()))));
}

TEST_CASE("evaluation rejects degenerate inputs") {
  VectorSet s = make_set({{"a", {1, 0}}, {"b", {0, 1}}, {"c", {1, 1}}});
  EvalPairSet set;
  set.universe = {"a", "b"};
  set.pairs = {{"a", "b"}};
  CHECK_THROWS_AS(mrr(s, set), DataError);  // universe below three tokens

  set.universe = {"a", "b", "c"};
  set.pairs = {};
  CHECK_THROWS_AS(mrr(s, set), DataError);  // no pairs

  set.pairs = {{"a", "a"}};
  CHECK_THROWS_AS(mrr(s, set), DataError);  // query is the target

  set.pairs = {{"a", "missing"}};
  CHECK_THROWS_AS(mrr(s, set), DataError);  // pair token outside the universe

  set.pairs = {{"a", "b"}};
  const VectorSet tiny = make_set({{"a", {1, 0}}, {"b", {0, 1}}});
  CHECK_THROWS_WITH_AS(mrr(tiny, set), doctest::Contains("token not in vectors"), DataError);

  const VectorSet with_zero = make_set({{"a", {1, 0}}, {"b", {0, 1}}, {"c", {0, 0}}});
  CHECK_THROWS_AS(mrr(with_zero, set), DataError);  // zero vector in the universe
}

TEST_CASE("nearest neighbors: order, ties, restriction") {
  const VectorSet s = make_set({
      {"q", {1, 0}},
      {"n1", {2, 0}},       // cos 1
      {"n2", {1, 1}},       // cos .707
      {"n3", {0, 1}},       // cos 0
      {"n4", {-1, 0}},      // cos -1
      {"dup", {2, 0}},      // cos 1, later row: after n1
  });
  auto top = nearest_neighbors(s, "q", 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].first == "n1");
  CHECK(top[1].first == "dup");  // tie broken by row order
  CHECK(top[2].first == "n2");
  CHECK(top[0].second == doctest::Approx(1.0));

  // restriction list: only its members compete; missing and duplicate
  // entries and the query itself are dropped
  const std::vector<std::string> restrict_to = {"n3", "ghost", "n2", "n2", "q"};
  auto restricted = nearest_neighbors(s, "q", 10, &restrict_to);
  REQUIRE(restricted.size() == 2);
  CHECK(restricted[0].first == "n2");
  CHECK(restricted[1].first == "n3");

  CHECK_THROWS_AS(nearest_neighbors(s, "ghost", 3), DataError);
}

TEST_CASE("pair and token-list files") {
  testsupport::TempDir dir("eval");
  const std::string pairs_path = dir.file("pairs.tsv");
  testsupport::write_file(pairs_path, "alpha\tbeta\n# note\n\ngamma\tdelta\n");
  const auto pairs = load_pair_file(pairs_path);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0] == std::pair<std::string, std::string>{"alpha", "beta"});
  CHECK(pairs[1] == std::pair<std::string, std::string>{"gamma", "delta"});

  const std::string bad = dir.file("bad.tsv");
  testsupport::write_file(bad, "alpha beta\n");
  CHECK_THROWS_WITH_AS(load_pair_file(bad), doctest::Contains("bad.tsv:1"), DataError);
  CHECK_THROWS_AS(load_pair_file(dir.file("absent.tsv")), DataError);

  const std::string list_path = dir.file("tokens.txt");
  testsupport::write_file(list_path, "one\ntwo\none\nthree\n\n");
  const auto tokens = load_token_list(list_path);
  CHECK(tokens == std::vector<std::string>{"one", "two", "three"});
}

TEST_CASE("annotation carriers listed in token order") {
  PredicateArgumentSet pas;
  pas.predicates.push_back({"Voc", {"zeta", "alpha", "beta"}});
  pas.predicates.push_back({"TYPE_os", {"beta"}});
  const AnnotationMap map = assign_annotations(pas, nullptr);
  CHECK(tokens_with_annotation(map, "Voc") ==
        std::vector<std::string>{"zeta", "alpha", "beta"});
  CHECK(tokens_with_annotation(map, "TYPE_os") == std::vector<std::string>{"beta"});
  CHECK_THROWS_AS(tokens_with_annotation(map, "TYPE_missing"), DataError);
}
