#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "annembed/common.hpp"

namespace annembed {

// Undirected similarity graph over vector rows. Each edge appears once
// (u < v); beta is symmetric per edge. The objective being minimized is
//   sum_i alpha_i ||q_i - qhat_i||^2 + sum_(u,v) beta_uv ||q_u - q_v||^2.
struct RetrofitGraph {
  int64_t vertex_count = 0;
  std::vector<std::array<int32_t, 2>> edges;
  std::vector<double> alpha;  // per vertex, default 1
  std::vector<double> beta;   // per edge, default 1/max(deg u, deg v)
};

// Deduplicates edges and fills in the default weights. Self-loops and
// out-of-range endpoints are errors.
RetrofitGraph make_retrofit_graph(int64_t vertex_count,
                                  std::vector<std::pair<int32_t, int32_t>> edges);

double retrofit_objective(std::span<const double> q, std::span<const double> q_hat, int dim,
                          const RetrofitGraph& graph);

// Coordinate-descent sweeps in vertex order; each vertex moves to the exact
// minimizer (alpha_i qhat_i + sum beta q_j) / (alpha_i + sum beta), so the
// objective never increases. Isolated vertices keep their original vectors.
// on_sweep, when given, sees the state after each sweep.
std::vector<double> retrofit_iterate(
    std::span<const double> q_hat, int dim, const RetrofitGraph& graph, int iterations,
    const std::function<void(std::span<const double>, int)>& on_sweep = {});

// Same sweeps run in double; the result is rounded back to the input type.
Matrix retrofit(const Matrix& q_hat, const RetrofitGraph& graph, int iterations);

}  // namespace annembed
