// Times the serial reference against the OpenMP betweenness kernel on kNN
// networks of increasing size and checks that both produce identical bits.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nbhl/centrality.hpp"
#include "nbhl/dataset.hpp"
#include "nbhl/graph.hpp"

namespace {

double time_ms(std::vector<double> (*fn)(const nbhl::AdjacencyList&),
               const nbhl::AdjacencyList& adj, int reps, std::vector<double>& out) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    out = fn(adj);
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("%8s %8s %12s %12s %9s %6s\n", "nodes", "edges", "serial[ms]", "parallel[ms]",
              "speedup", "equal");

  for (std::size_t n : {200, 500, 1000, 2000, 4000}) {
    nbhl::Dataset ds = nbhl::generate_moons(2 * n, 0.25, 42);
    nbhl::HyperParams params;
    params.k = 10;
    nbhl::TrainedModel model = nbhl::build_network(ds, params);
    const auto& adj = model.components[0].adjacency;

    std::vector<double> serial_scores, parallel_scores;
    const double t_serial = time_ms(&nbhl::betweenness_serial, adj, reps, serial_scores);
    const double t_parallel = time_ms(&nbhl::betweenness_parallel, adj, reps, parallel_scores);

    std::size_t edges = 0;
    for (const auto& nbrs : adj) edges += nbrs.size();
    std::printf("%8zu %8zu %12.1f %12.1f %8.2fx %6s\n", adj.size(), edges / 2, t_serial,
                t_parallel, t_serial / t_parallel,
                serial_scores == parallel_scores ? "yes" : "NO");
  }
  return 0;
}
