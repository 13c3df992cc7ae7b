#pragma once

#include <span>
#include <vector>

#include "mcsg/channel_graph.hpp"

namespace mcsg {

/// Adjacency submatrix of a node subset, ordered so that densely connected
/// blocks are contiguous. cells[i][j] is the edge weight between
/// order[i] and order[j] (0 without an edge, 0 on the diagonal).
struct NodeTrixMatrix {
  std::vector<ChannelIndex> order;
  std::vector<std::vector<double>> cells;
};

/// Leaf order of average-linkage agglomerative clustering over the rows of
/// the submatrix (Euclidean row distance). Ties go to the lower node index.
/// Throws not_found for nodes outside the graph and invalid_argument for an
/// empty set. Duplicates in `nodes` are ignored.
NodeTrixMatrix nodetrix_matrix(const ChannelGraph& graph, std::span<const ChannelIndex> nodes);

/// The seriation alone, for a symmetric square matrix given row-major.
std::vector<std::size_t> average_linkage_order(std::span<const double> matrix, std::size_t n);

}  // namespace mcsg
