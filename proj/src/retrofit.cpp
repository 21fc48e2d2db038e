#include "annembed/retrofit.hpp"

#include <algorithm>

namespace annembed {

RetrofitGraph make_retrofit_graph(int64_t vertex_count,
                                  std::vector<std::pair<int32_t, int32_t>> edges) {
  if (vertex_count < 0) throw DataError("retrofit: negative vertex count");
  RetrofitGraph g;
  g.vertex_count = vertex_count;
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
      throw DataError("retrofit: edge endpoint out of range");
    if (u == v)
      throw DataError("retrofit: self-loop on vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges.reserve(edges.size());
  for (auto [u, v] : edges) g.edges.push_back({u, v});

  std::vector<int64_t> degree(vertex_count, 0);
  for (auto [u, v] : g.edges) {
    ++degree[u];
    ++degree[v];
  }
  g.alpha.assign(vertex_count, 1.0);
  g.beta.reserve(g.edges.size());
  for (auto [u, v] : g.edges)
    g.beta.push_back(1.0 / static_cast<double>(std::max(degree[u], degree[v])));
  return g;
}

double retrofit_objective(std::span<const double> q, std::span<const double> q_hat, int dim,
                          const RetrofitGraph& graph) {
  double psi = 0;
  for (int64_t i = 0; i < graph.vertex_count; ++i) {
    double d2 = 0;
    for (int j = 0; j < dim; ++j) {
      const double d = q[i * dim + j] - q_hat[i * dim + j];
      d2 += d * d;
    }
    psi += graph.alpha[i] * d2;
  }
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const auto [u, v] = graph.edges[e];
    double d2 = 0;
    for (int j = 0; j < dim; ++j) {
      const double d = q[u * dim + j] - q[v * dim + j];
      d2 += d * d;
    }
    psi += graph.beta[e] * d2;
  }
  return psi;
}

std::vector<double> retrofit_iterate(
    std::span<const double> q_hat, int dim, const RetrofitGraph& graph, int iterations,
    const std::function<void(std::span<const double>, int)>& on_sweep) {
  if (dim < 1) throw DataError("retrofit: dim must be >= 1");
  if (iterations < 1) throw DataError("retrofit: iterations must be >= 1");
  if (q_hat.size() != static_cast<size_t>(graph.vertex_count) * dim)
    throw DataError("retrofit: vector block does not match the graph");

  // neighbor lists with the symmetric edge weights
  std::vector<std::vector<std::pair<int32_t, double>>> nb(graph.vertex_count);
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const auto [u, v] = graph.edges[e];
    nb[u].push_back({v, graph.beta[e]});
    nb[v].push_back({u, graph.beta[e]});
  }

  std::vector<double> q(q_hat.begin(), q_hat.end());
  for (int it = 0; it < iterations; ++it) {
    for (int64_t i = 0; i < graph.vertex_count; ++i) {
      if (nb[i].empty()) continue;
      double denom = graph.alpha[i];
      for (auto [_, b] : nb[i]) denom += b;
      for (int j = 0; j < dim; ++j) {
        double num = graph.alpha[i] * q_hat[i * dim + j];
        for (auto [other, b] : nb[i]) num += b * q[other * dim + j];
        q[i * dim + j] = num / denom;
      }
    }
    if (on_sweep) on_sweep(q, it);
  }
  return q;
}

Matrix retrofit(const Matrix& q_hat, const RetrofitGraph& graph, int iterations) {
  if (q_hat.rows != graph.vertex_count)
    throw DataError("retrofit: vector rows do not match the graph");
  std::vector<double> base(q_hat.data.begin(), q_hat.data.end());
  const std::vector<double> fitted = retrofit_iterate(base, q_hat.cols, graph, iterations);
  Matrix out(q_hat.rows, q_hat.cols);
  for (size_t i = 0; i < fitted.size(); ++i) out.data[i] = static_cast<real>(fitted[i]);
  return out;
}

}  // namespace annembed
