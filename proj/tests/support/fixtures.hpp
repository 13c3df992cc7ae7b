#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mcsg/channel_graph.hpp"
#include "mcsg/dataset.hpp"
#include "mcsg/hierarchy.hpp"
#include "mcsg/mcsg.hpp"
#include "oracles.hpp"

namespace fixture {

inline std::vector<oracle::WEdge> to_oracle(const mcsg::ChannelGraph& g) {
  std::vector<oracle::WEdge> out;
  for (const auto& e : g.edges()) out.push_back({static_cast<int>(e.a), static_cast<int>(e.b), e.weight});
  return out;
}

/// Erdos-Renyi graph with weights uniform in [lo, hi].
inline mcsg::ChannelGraph random_graph(std::mt19937_64& rng, int n, double p, double lo = 0.3,
                                       double hi = 1.0) {
  std::bernoulli_distribution keep(p);
  std::uniform_real_distribution<double> weight(lo, hi);
  std::vector<mcsg::ChannelEdge> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (keep(rng)) edges.push_back({static_cast<mcsg::ChannelIndex>(a), static_cast<mcsg::ChannelIndex>(b), weight(rng)});
  return mcsg::ChannelGraph(static_cast<std::size_t>(n), std::move(edges));
}

/// Connected variant: a random spanning tree plus extra edges.
inline mcsg::ChannelGraph random_connected_graph(std::mt19937_64& rng, int n, double p,
                                                 double lo = 0.3, double hi = 1.0) {
  std::uniform_real_distribution<double> weight(lo, hi);
  std::bernoulli_distribution keep(p);
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (int v = 1; v < n; ++v) {
    const int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
    w[u][v] = weight(rng);
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (w[a][b] == 0.0 && keep(rng)) w[a][b] = weight(rng);
  std::vector<mcsg::ChannelEdge> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (w[a][b] > 0) edges.push_back({static_cast<mcsg::ChannelIndex>(a), static_cast<mcsg::ChannelIndex>(b), w[a][b]});
  return mcsg::ChannelGraph(static_cast<std::size_t>(n), std::move(edges));
}

inline std::vector<mcsg::ChannelNode> channel_nodes(std::size_t n) {
  std::vector<mcsg::ChannelNode> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({(i < 10 ? "n0" : "n") + std::to_string(i), 100.0 + static_cast<double>(i)});
  }
  return out;
}

/// Single-level hierarchy from labels (-1 = outside). Labels must cover every
/// non-isolated node.
inline mcsg::CommunityHierarchy flat_hierarchy(const std::vector<int>& labels) {
  std::map<int, std::vector<mcsg::ChannelIndex>> groups;
  for (std::size_t v = 0; v < labels.size(); ++v)
    if (labels[v] >= 0) groups[labels[v]].push_back(static_cast<mcsg::ChannelIndex>(v));
  std::vector<mcsg::Community> cs;
  std::uint32_t next = 0;
  for (auto& [l, members] : groups) cs.push_back({mcsg::CommunityId{next++}, 0, members, std::nullopt});
  return mcsg::CommunityHierarchy(groups.empty() ? 0 : 1, std::move(cs));
}

/// Random partition of the non-isolated nodes into at most k groups.
inline std::vector<int> random_labels(std::mt19937_64& rng, const mcsg::ChannelGraph& g, int k) {
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> labels(g.node_count(), -1);
  for (mcsg::ChannelIndex v = 0; v < g.node_count(); ++v)
    if (!g.isolated(v)) labels[v] = pick(rng);
  return labels;
}

inline mcsg::Mcsg make_graph(const mcsg::ChannelGraph& g, mcsg::CommunityHierarchy h,
                             std::string name = "fixture") {
  return mcsg::materialize_mcsg(std::move(name), {}, channel_nodes(g.node_count()),
                                std::make_shared<const mcsg::ChannelGraph>(g), std::move(h));
}

/// Two groups of two 5-cliques (0.95). Every cross pair inside a group
/// carries 0.5: dense enough that the groups win globally, sparse enough that
/// each group still splits on its own. One 0.71 edge joins the groups.
inline mcsg::ChannelGraph nested_graph() {
  using mcsg::ChannelIndex;
  std::vector<mcsg::ChannelEdge> edges;
  for (ChannelIndex base : {0u, 5u, 10u, 15u})
    for (ChannelIndex i = 0; i < 5; ++i)
      for (ChannelIndex j = i + 1; j < 5; ++j) edges.push_back({base + i, base + j, 0.95});
  for (ChannelIndex group : {0u, 10u})
    for (ChannelIndex i = 0; i < 5; ++i)
      for (ChannelIndex j = 0; j < 5; ++j) edges.push_back({group + i, group + 5 + j, 0.5});
  edges.push_back({9, 10, 0.71});
  return mcsg::ChannelGraph(20, std::move(edges));
}

/// Dataset on a full w x h grid from per-channel value lists.
inline mcsg::MsiDataset dataset_from(int w, int h, const std::vector<std::vector<float>>& values,
                                     std::vector<std::uint8_t> mask = {}) {
  std::vector<mcsg::MassChannelImage> channels;
  for (std::size_t c = 0; c < values.size(); ++c) {
    channels.push_back({(c < 10 ? "c0" : "c") + std::to_string(c), 100.0 + 10.0 * static_cast<double>(c), values[c]});
  }
  auto grid = mask.empty() ? mcsg::PixelGrid(w, h) : mcsg::PixelGrid(w, h, std::move(mask));
  return mcsg::MsiDataset("test", std::move(grid), std::move(channels));
}

inline mcsg::MsiDataset random_dataset(std::mt19937_64& rng, int w, int h, int channels) {
  std::gamma_distribution<float> value(2.0f, 1.0f);
  std::vector<std::vector<float>> v(channels, std::vector<float>(static_cast<std::size_t>(w * h)));
  for (auto& ch : v)
    for (auto& x : ch) x = value(rng);
  return dataset_from(w, h, v);
}

}  // namespace fixture
