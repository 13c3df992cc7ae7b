#include "mcsg/nodetrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mcsg/error.hpp"

namespace mcsg {

std::vector<std::size_t> average_linkage_order(std::span<const double> matrix, std::size_t n) {
  if (n == 0) return {};
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = matrix[i * n + k] - matrix[j * n + k];
        s += d * d;
      }
      dist[i * n + j] = dist[j * n + i] = std::sqrt(s);
    }

  // Clusters stay sorted by their smallest leaf, so scanning pairs in order
  // and accepting only strictly smaller linkage gives the lower-id tie-break.
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  auto linkage = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double s = 0.0;
    for (auto x : a)
      for (auto y : b) s += dist[x * n + y];
    return s / static_cast<double>(a.size() * b.size());
  };
  auto min_leaf = [](const std::vector<std::size_t>& c) {
    return *std::min_element(c.begin(), c.end());
  };
  while (clusters.size() > 1) {
    std::size_t best_i = 0, best_j = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double l = linkage(clusters[i], clusters[j]);
        if (l < best) {
          best = l;
          best_i = i;
          best_j = j;
        }
      }
    auto merged = clusters[best_i];
    merged.insert(merged.end(), clusters[best_j].begin(), clusters[best_j].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_j));
    clusters[best_i] = std::move(merged);
    std::stable_sort(clusters.begin(), clusters.end(),
                     [&](const auto& a, const auto& b) { return min_leaf(a) < min_leaf(b); });
  }
  return clusters.front();
}

NodeTrixMatrix nodetrix_matrix(const ChannelGraph& graph, std::span<const ChannelIndex> nodes) {
  if (nodes.empty()) fail(ErrorKind::invalid_argument, "node set is empty");
  std::vector<ChannelIndex> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (auto v : sorted)
    if (v >= graph.node_count()) fail(ErrorKind::not_found, "unknown node " + std::to_string(v));

  const std::size_t n = sorted.size();
  std::vector<double> sub(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) sub[i * n + j] = graph.weight(sorted[i], sorted[j]).value_or(0.0);

  const auto order = average_linkage_order(sub, n);
  NodeTrixMatrix out;
  out.order.reserve(n);
  for (auto i : order) out.order.push_back(sorted[i]);
  out.cells.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.cells[i][j] = sub[order[i] * n + order[j]];
  return out;
}

}  // namespace mcsg
