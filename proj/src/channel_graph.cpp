#include "mcsg/channel_graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcsg/error.hpp"

namespace mcsg {

ChannelGraph::ChannelGraph(std::size_t node_count, std::vector<ChannelEdge> edges)
    : edges_(std::move(edges)), adjacency_(node_count) {
  for (auto& e : edges_) {
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.b >= node_count)
      fail(ErrorKind::validation, "edge endpoint " + std::to_string(e.b) + " out of range");
    if (e.a == e.b) fail(ErrorKind::validation, "self loop on node " + std::to_string(e.a));
    if (!(e.weight > 0.0 && e.weight <= 1.0))
      fail(ErrorKind::validation, "edge weight must lie in (0, 1]");
  }
  std::sort(edges_.begin(), edges_.end(), [](const ChannelEdge& x, const ChannelEdge& y) {
    return std::pair(x.a, x.b) < std::pair(y.a, y.b);
  });
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (edges_[i].a == edges_[i - 1].a && edges_[i].b == edges_[i - 1].b)
      fail(ErrorKind::validation, "duplicate edge " + std::to_string(edges_[i].a) + "-" +
                                      std::to_string(edges_[i].b));
  for (const auto& e : edges_) {
    adjacency_[e.a].push_back({e.b, e.weight});
    adjacency_[e.b].push_back({e.a, e.weight});
  }
  for (auto& adj : adjacency_)
    std::sort(adj.begin(), adj.end(),
              [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
}

std::optional<double> ChannelGraph::weight(ChannelIndex a, ChannelIndex b) const {
  const auto& adj = adjacency_.at(a);
  auto it = std::lower_bound(adj.begin(), adj.end(), b,
                             [](const Neighbor& n, ChannelIndex v) { return n.node < v; });
  if (it == adj.end() || it->node != b) return std::nullopt;
  return it->weight;
}

double ChannelGraph::weighted_degree(ChannelIndex v) const {
  double sum = 0.0;
  for (const auto& n : adjacency_.at(v)) sum += n.weight;
  return sum;
}

std::vector<ChannelIndex> ChannelGraph::isolated_nodes() const {
  std::vector<ChannelIndex> out;
  for (std::size_t v = 0; v < adjacency_.size(); ++v)
    if (adjacency_[v].empty()) out.push_back(static_cast<ChannelIndex>(v));
  return out;
}

ChannelGraph ChannelGraph::induced(std::span<const ChannelIndex> nodes) const {
  std::vector<ChannelIndex> local(node_count(), static_cast<ChannelIndex>(-1));
  for (std::size_t i = 0; i < nodes.size(); ++i) local.at(nodes[i]) = static_cast<ChannelIndex>(i);
  std::vector<ChannelEdge> sub;
  for (const auto& e : edges_) {
    const auto a = local[e.a];
    const auto b = local[e.b];
    if (a != static_cast<ChannelIndex>(-1) && b != static_cast<ChannelIndex>(-1))
      sub.push_back({a, b, e.weight});
  }
  return ChannelGraph(nodes.size(), std::move(sub));
}

ChannelGraph build_channel_graph(const SimilarityMatrix& sim, double tau) {
  if (!(tau >= 0.0 && tau < 1.0))
    fail(ErrorKind::invalid_argument, "tau must lie in [0, 1)");
  std::vector<ChannelEdge> edges;
  const std::size_t n = sim.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = sim.at(i, j);
      if (s >= tau && s > 0.0)
        edges.push_back({static_cast<ChannelIndex>(i), static_cast<ChannelIndex>(j), std::min(s, 1.0)});
    }
  return ChannelGraph(n, std::move(edges));
}

}  // namespace mcsg
