#include "annembed/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

namespace annembed {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::span<const real> row_span(const VectorSet& vs, int32_t i) {
  return {vs.vectors.row(i), static_cast<size_t>(vs.vectors.cols)};
}

int32_t require_token(const VectorSet& vs, const std::string& token) {
  const int32_t i = vs.find(token);
  if (i < 0) throw DataError("token not in vectors: " + token);
  return i;
}

}  // namespace

double cosine(std::span<const real> u, std::span<const real> v) {
  if (u.size() != v.size()) throw DataError("cosine: dimension mismatch");
  double uu = 0, vv = 0, uv = 0;
  for (size_t j = 0; j < u.size(); ++j) {
    uu += static_cast<double>(u[j]) * u[j];
    vv += static_cast<double>(v[j]) * v[j];
    uv += static_cast<double>(u[j]) * v[j];
  }
  if (uu == 0 || vv == 0) throw DataError("cosine: zero vector");
  const double c = uv / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(c, -1.0, 1.0);
}

std::vector<std::pair<std::string, std::string>> load_pair_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pair file: " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected token<TAB>token");
    pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return pairs;
}

std::vector<std::string> load_token_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open token list: " + path);
  std::vector<std::string> tokens;
  std::unordered_set<std::string> seen;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.find('\t') != std::string::npos)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected one token per line");
    if (seen.insert(line).second) tokens.push_back(line);
  }
  return tokens;
}

std::vector<std::string> tokens_with_annotation(const AnnotationMap& map,
                                                const std::string& name) {
  std::vector<std::string> tokens;
  const auto it = map.name_index.find(name);
  if (it == map.name_index.end()) throw DataError("annotation not in map: " + name);
  const int32_t id = it->second;
  for (const std::string& token : map.token_order) {
    const auto& ids = map.token_annotations.at(token);
    if (std::binary_search(ids.begin(), ids.end(), id)) tokens.push_back(token);
  }
  return tokens;
}

int rank_of_pair(const VectorSet& vectors, const std::string& query, const std::string& target,
                 std::span<const std::string> universe) {
  if (query == target) throw DataError("rank: query equals target: " + query);
  const int32_t qi = require_token(vectors, query);
  const int32_t ti = require_token(vectors, target);
  const double to_target = cosine(row_span(vectors, qi), row_span(vectors, ti));

  bool saw_query = false, saw_target = false;
  int rank = 1;
  for (const std::string& candidate : universe) {
    if (candidate == query) {
      saw_query = true;
      continue;
    }
    if (candidate == target) {
      saw_target = true;
      continue;
    }
    const int32_t ci = require_token(vectors, candidate);
    if (cosine(row_span(vectors, qi), row_span(vectors, ci)) > to_target) ++rank;
  }
  if (!saw_query) throw DataError("rank: query not in the universe: " + query);
  if (!saw_target) throw DataError("rank: target not in the universe: " + target);
  return rank;
}

MrrReport mrr(const VectorSet& vectors, const EvalPairSet& set) {
  if (set.universe.size() < 3) throw DataError("eval: universe needs at least 3 tokens");
  if (set.pairs.empty()) throw DataError("eval: no pairs");
  MrrReport report;
  int64_t rank_sum = 0;
  for (const auto& [a, b] : set.pairs) {
    MrrRow row;
    row.a = a;
    row.b = b;
    row.rank_ab = rank_of_pair(vectors, a, b, set.universe);
    row.rank_ba = rank_of_pair(vectors, b, a, set.universe);
    rank_sum += row.rank_ab + row.rank_ba;
    report.rows.push_back(std::move(row));
  }
  report.value = static_cast<double>(rank_sum) /
                 (static_cast<double>(set.universe.size()) * 2.0 *
                  static_cast<double>(set.pairs.size()));
  return report;
}

std::vector<std::pair<std::string, double>> nearest_neighbors(
    const VectorSet& vectors, const std::string& token, int k,
    const std::vector<std::string>* restrict_to) {
  if (k < 1) throw DataError("nearest: k must be >= 1");
  const int32_t qi = require_token(vectors, token);
  const auto q = row_span(vectors, qi);
  double qq = 0;
  for (real x : q) qq += static_cast<double>(x) * x;
  if (qq == 0) throw DataError("cosine: zero vector");

  std::vector<int32_t> candidates;
  if (restrict_to) {
    std::unordered_set<int32_t> seen;
    for (const std::string& t : *restrict_to) {
      const int32_t i = vectors.find(t);
      if (i >= 0 && i != qi && seen.insert(i).second) candidates.push_back(i);
    }
  } else {
    for (int32_t i = 0; i < static_cast<int32_t>(vectors.tokens.size()); ++i)
      if (i != qi) candidates.push_back(i);
  }

  std::vector<std::pair<double, int32_t>> scored;
  scored.reserve(candidates.size());
  for (int32_t i : candidates) {
    const auto c = row_span(vectors, i);
    double cc = 0, qc = 0;
    for (size_t j = 0; j < c.size(); ++j) {
      cc += static_cast<double>(c[j]) * c[j];
      qc += static_cast<double>(q[j]) * c[j];
    }
    if (cc == 0) continue;  // unrankable
    scored.emplace_back(std::clamp(qc / (std::sqrt(qq) * std::sqrt(cc)), -1.0, 1.0), i);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (static_cast<size_t>(k) < scored.size()) scored.resize(k);

  std::vector<std::pair<std::string, double>> out;
  out.reserve(scored.size());
  for (const auto& [c, i] : scored) out.emplace_back(vectors.tokens[i], c);
  return out;
}

}  // namespace annembed
