#include "nbhl/centrality.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nbhl {

namespace {

struct Workspace {
  std::vector<int> dist;
  std::vector<double> sigma;
  std::vector<int> order;  // BFS dequeue order
};

// Brandes single-source pass: shortest-path counts by BFS, then dependency
// accumulation in reverse BFS order. delta_out receives this source's
// contribution to every node.
void accumulate_source(const AdjacencyList& adj, int s, Workspace& ws,
                       std::vector<double>& delta_out) {
  const int n = static_cast<int>(adj.size());
  ws.dist.assign(n, -1);
  ws.sigma.assign(n, 0.0);
  ws.order.clear();
  delta_out.assign(n, 0.0);

  ws.dist[s] = 0;
  ws.sigma[s] = 1.0;
  ws.order.push_back(s);
  for (std::size_t head = 0; head < ws.order.size(); ++head) {
    const int v = ws.order[head];
    for (int w : adj[v]) {
      if (ws.dist[w] < 0) {
        ws.dist[w] = ws.dist[v] + 1;
        ws.order.push_back(w);
      }
      if (ws.dist[w] == ws.dist[v] + 1) ws.sigma[w] += ws.sigma[v];
    }
  }
  for (auto it = ws.order.rbegin(); it != ws.order.rend(); ++it) {
    const int w = *it;
    for (int v : adj[w])
      if (ws.dist[v] == ws.dist[w] - 1)
        delta_out[v] += ws.sigma[v] / ws.sigma[w] * (1.0 + delta_out[w]);
  }
  delta_out[s] = 0.0;
}

// Sum over ordered (s, t) pairs. Every implementation folds per-source
// contributions in ascending source order, node index ascending, so the
// serial and parallel kernels agree bitwise.
std::vector<double> accumulate_all_serial(const AdjacencyList& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<double> total(n, 0.0);
  std::vector<double> delta;
  Workspace ws;
  for (int s = 0; s < n; ++s) {
    accumulate_source(adj, s, ws, delta);
    for (int v = 0; v < n; ++v) total[v] += delta[v];
  }
  return total;
}

std::vector<double> accumulate_all_parallel(const AdjacencyList& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<double> total(n, 0.0);
  constexpr int kBlock = 64;
  std::vector<std::vector<double>> deltas(static_cast<std::size_t>(std::min(kBlock, n)));
  for (int start = 0; start < n; start += kBlock) {
    const int end = std::min(start + kBlock, n);
#pragma omp parallel
    {
      Workspace ws;
#pragma omp for schedule(dynamic)
      for (int s = start; s < end; ++s) accumulate_source(adj, s, ws, deltas[s - start]);
    }
    for (int s = start; s < end; ++s)
      for (int v = 0; v < n; ++v) total[v] += deltas[s - start][v];
  }
  return total;
}

// Ordered-pair sums -> normalized scores in [0,1]; all zero when n < 3.
std::vector<double> normalize(std::vector<double> total) {
  const std::size_t n = total.size();
  if (n < 3) return std::vector<double>(n, 0.0);
  const double denom = static_cast<double>(n - 1) * static_cast<double>(n - 2);
  for (auto& v : total) v /= denom;
  return total;
}

void check_adjacency(const AdjacencyList& adj) {
  const int n = static_cast<int>(adj.size());
  for (int v = 0; v < n; ++v)
    for (int w : adj[v])
      if (w < 0 || w >= n || w == v)
        throw std::invalid_argument("betweenness: malformed adjacency list");
}

}  // namespace

std::vector<double> betweenness_serial(const AdjacencyList& adj) {
  check_adjacency(adj);
  return normalize(accumulate_all_serial(adj));
}

std::vector<double> betweenness_parallel(const AdjacencyList& adj) {
  check_adjacency(adj);
  return normalize(accumulate_all_parallel(adj));
}

std::vector<double> betweenness(const AdjacencyList& adj) {
#ifdef _OPENMP
  if (adj.size() >= 96) return betweenness_parallel(adj);
#endif
  return betweenness_serial(adj);
}

std::vector<double> betweenness_raw(const AdjacencyList& adj) {
  check_adjacency(adj);
  auto total = accumulate_all_serial(adj);
  for (auto& v : total) v *= 0.5;  // ordered pairs -> unordered
  return total;
}

std::vector<double> betweenness_oracle(const AdjacencyList& adj) {
  check_adjacency(adj);
  const int n = static_cast<int>(adj.size());
  if (n > 12)
    throw std::invalid_argument("betweenness_oracle: graph too large (node cap 12)");

  std::vector<double> scores(n, 0.0);
  std::vector<int> dist(n);
  std::vector<int> queue;
  std::vector<long long> through(n);
  std::vector<int> path;

  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    queue.clear();
    dist[s] = 0;
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      for (int w : adj[v])
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
    }
    for (int t = s + 1; t < n; ++t) {
      if (dist[t] < 0) continue;  // unreachable pairs contribute nothing

      // Walk every geodesic backwards from t along strictly-decreasing
      // distances, counting how often each interior node appears.
      std::fill(through.begin(), through.end(), 0);
      long long total_paths = 0;
      path.clear();
      auto walk = [&](auto&& self, int v) -> void {
        path.push_back(v);
        if (v == s) {
          ++total_paths;
          for (std::size_t i = 1; i + 1 < path.size(); ++i) ++through[path[i]];
        } else {
          for (int u : adj[v])
            if (dist[u] == dist[v] - 1) self(self, u);
        }
        path.pop_back();
      };
      walk(walk, t);

      for (int i = 0; i < n; ++i)
        if (through[i] > 0)
          scores[i] += static_cast<double>(through[i]) / static_cast<double>(total_paths);
    }
  }
  if (n < 3) return std::vector<double>(n, 0.0);
  const double denom = static_cast<double>(n - 1) * static_cast<double>(n - 2) / 2.0;
  for (auto& v : scores) v /= denom;
  return scores;
}

std::vector<double> betweenness(const ClassComponent& component) {
  return betweenness(component.adjacency);
}

std::vector<double> betweenness_oracle(const ClassComponent& component) {
  return betweenness_oracle(component.adjacency);
}

}  // namespace nbhl
