#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mcsg/dataset.hpp"
#include "mcsg/similarity.hpp"

namespace mcsg {

struct ChannelEdge {
  ChannelIndex a = 0;  // a < b
  ChannelIndex b = 0;
  double weight = 0.0;

  friend bool operator==(const ChannelEdge&, const ChannelEdge&) = default;
};

struct Neighbor {
  ChannelIndex node;
  double weight;
};

/// Undirected weighted graph over channel indices. Edges are kept sorted by
/// (a, b); adjacency lists are sorted by neighbor index.
class ChannelGraph {
 public:
  ChannelGraph() = default;
  /// Validates: endpoints in range, no self loops, no duplicate pairs,
  /// weights in (0, 1]. Endpoint order within an edge is normalized.
  ChannelGraph(std::size_t node_count, std::vector<ChannelEdge> edges);

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<ChannelEdge>& edges() const noexcept { return edges_; }
  std::span<const Neighbor> neighbors(ChannelIndex v) const { return adjacency_.at(v); }
  std::optional<double> weight(ChannelIndex a, ChannelIndex b) const;
  double weighted_degree(ChannelIndex v) const;
  bool isolated(ChannelIndex v) const { return adjacency_.at(v).empty(); }
  std::vector<ChannelIndex> isolated_nodes() const;

  /// Subgraph induced by `nodes` (sorted, unique), re-indexed 0..k-1 in the
  /// order given.
  ChannelGraph induced(std::span<const ChannelIndex> nodes) const;

  friend bool operator==(const ChannelGraph& a, const ChannelGraph& b) {
    return a.node_count() == b.node_count() && a.edges_ == b.edges_;
  }

 private:
  std::vector<ChannelEdge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Keeps pair (a, b) iff sim >= tau and sim > 0. Requires tau in [0, 1).
ChannelGraph build_channel_graph(const SimilarityMatrix& sim, double tau);

}  // namespace mcsg
