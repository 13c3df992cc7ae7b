#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mcsg/channel_graph.hpp"

namespace mcsg {

struct LouvainOptions {
  double resolution = 1.0;
  std::uint64_t seed = 42;
  int restarts = 64;  // independent runs; the highest-modularity one wins
};

/// Weighted Louvain modularity maximization. Returns one label per node;
/// labels are numbered 0..k-1 by smallest member index, degree-0 nodes get -1.
/// Deterministic for a given graph, seed and restart count. Each run
/// alternates coarsening with a node-level refinement pass; odd runs pick a
/// random improving move during coarsening to escape greedy local optima.
std::vector<int> louvain(const ChannelGraph& graph, const LouvainOptions& options = {});

/// Newman-Girvan weighted modularity. Nodes labelled -1 count as singletons.
double modularity(const ChannelGraph& graph, std::span<const int> labels,
                  double resolution = 1.0);

}  // namespace mcsg
