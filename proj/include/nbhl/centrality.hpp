#pragma once

#include <vector>

#include "nbhl/graph.hpp"

namespace nbhl {

// Unweighted undirected graph as sorted adjacency lists over 0..n-1.
using AdjacencyList = std::vector<std::vector<int>>;

// Betweenness centrality, normalized by (n-1)(n-2)/2 so scores lie in [0,1]
// and are comparable across components of different sizes. Pairs with no
// connecting path contribute zero; every score is 0 when n < 3.
//
// The three entry points compute the same quantity:
//   betweenness_serial   - reference implementation (Brandes accumulation)
//   betweenness_parallel - OpenMP over source-vertex blocks; partial sums are
//                          folded in source order, so the result is bitwise
//                          identical to the serial path for any thread count
//   betweenness          - dispatches to the parallel kernel on large graphs
std::vector<double> betweenness(const AdjacencyList& adj);
std::vector<double> betweenness_serial(const AdjacencyList& adj);
std::vector<double> betweenness_parallel(const AdjacencyList& adj);

// Raw (unnormalized) sums over unordered pairs, serial.
std::vector<double> betweenness_raw(const AdjacencyList& adj);

// Verification-only: evaluates the pair sum literally by enumerating every
// shortest path through a BFS-layered DAG and counting pass-throughs.
// Rejects graphs with more than 12 nodes.
std::vector<double> betweenness_oracle(const AdjacencyList& adj);

std::vector<double> betweenness(const ClassComponent& component);
std::vector<double> betweenness_oracle(const ClassComponent& component);

}  // namespace nbhl
