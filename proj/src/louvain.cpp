#include "mcsg/louvain.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace mcsg {

namespace {

struct WorkGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;  // no self entries
  std::vector<double> self;                               // A_ii (internal weight counted twice)
  std::vector<double> degree;
  double total = 0.0;                                     // sum of degrees = 2m
};

WorkGraph from_channel_graph(const ChannelGraph& g) {
  WorkGraph w;
  const std::size_t n = g.node_count();
  w.adj.resize(n);
  w.self.assign(n, 0.0);
  w.degree.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (const auto& nb : g.neighbors(static_cast<ChannelIndex>(v))) {
      w.adj[v].emplace_back(static_cast<int>(nb.node), nb.weight);
      w.degree[v] += nb.weight;
    }
  for (double d : w.degree) w.total += d;
  return w;
}

// Local moving until no single move improves modularity. Starts from
// `community` when `keep_start`, otherwise from singletons. A node may also
// leave for an empty community. With `randomized`, a node takes a uniformly
// chosen improving move instead of the best one. Returns whether any node
// moved.
bool local_moving(const WorkGraph& g, double resolution, std::mt19937_64& rng,
                  std::vector<int>& community, bool keep_start, bool randomized = false) {
  const std::size_t n = g.adj.size();
  if (!keep_start) {
    community.resize(n);
    std::iota(community.begin(), community.end(), 0);
  }
  std::vector<double> tot(n, 0.0);
  std::vector<int> size(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    tot[community[v]] += g.degree[v];
    ++size[community[v]];
  }

  std::vector<int> order;
  for (std::size_t v = 0; v < n; ++v)
    if (g.degree[v] > 0.0) order.push_back(static_cast<int>(v));
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> link(n, 0.0);
  std::vector<int> touched, improving;
  bool any_move = false;
  for (int pass = 0; pass < 1000; ++pass) {
    bool moved = false;
    for (int v : order) {
      const int current = community[v];
      const double k = g.degree[v];
      touched.clear();
      for (const auto& [u, w] : g.adj[v]) {
        const int c = community[u];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w;
      }
      tot[current] -= k;
      --size[current];
      const double scale = resolution * k / g.total;
      int best = current;
      const double stay_gain = link[current] - tot[current] * scale;
      double best_gain = stay_gain;
      std::sort(touched.begin(), touched.end());
      improving.clear();
      for (int c : touched) {
        if (c == current) continue;
        const double gain = link[c] - tot[c] * scale;
        if (gain > stay_gain + 1e-13) improving.push_back(c);
        if (gain > best_gain + 1e-13) {
          best_gain = gain;
          best = c;
        }
      }
      if (randomized && improving.size() > 1)
        best = improving[std::uniform_int_distribution<std::size_t>(0, improving.size() - 1)(rng)];
      // An empty community has gain 0; only worth it when v has company.
      if (size[current] > 0 && 0.0 > best_gain + 1e-13)
        best = static_cast<int>(std::find(size.begin(), size.end(), 0) - size.begin());
      for (int c : touched) link[c] = 0.0;
      tot[best] += k;
      ++size[best];
      if (best != current) {
        community[v] = best;
        moved = true;
      }
    }
    if (!moved) break;
    any_move = true;
  }
  return any_move;
}

// Renumbers community ids to 0..k-1 in order of first appearance.
int renumber(std::vector<int>& community) {
  std::vector<int> map(community.size(), -1);
  int next = 0;
  for (int& c : community) {
    if (map[c] < 0) map[c] = next++;
    c = map[c];
  }
  return next;
}

WorkGraph aggregate(const WorkGraph& g, const std::vector<int>& community, int count) {
  WorkGraph out;
  out.adj.resize(count);
  out.self.assign(count, 0.0);
  out.degree.assign(count, 0.0);
  std::vector<std::map<int, double>> acc(count);
  for (std::size_t v = 0; v < g.adj.size(); ++v) {
    const int cv = community[v];
    out.self[cv] += g.self[v];
    out.degree[cv] += g.degree[v];
    for (const auto& [u, w] : g.adj[v]) {
      const int cu = community[u];
      if (cu == cv)
        out.self[cv] += w;
      else
        acc[cv][cu] += w;
    }
  }
  for (int c = 0; c < count; ++c)
    for (const auto& [d, w] : acc[c]) out.adj[c].emplace_back(d, w);
  out.total = g.total;
  return out;
}

}  // namespace

namespace {

// Coarsening from the current partition, then a node-level refinement pass;
// repeated while refinement finds an improving move. Returns the community
// of each base node. `randomized` applies to coarsening only; refinement
// always takes the best move.
std::vector<int> run_once(const WorkGraph& base, double resolution, std::mt19937_64& rng, bool randomized) {
  const std::size_t n = base.adj.size();
  std::vector<int> labels(n);
  std::iota(labels.begin(), labels.end(), 0);
  for (int round = 0; round < 64; ++round) {
    std::vector<int> start = labels;
    const int start_count = renumber(start);
    WorkGraph g = aggregate(base, start, start_count);
    std::vector<int> node_to_work = start;
    std::vector<int> community;
    for (int level = 0; level < 64; ++level) {
      const bool moved = local_moving(g, resolution, rng, community, false, randomized);
      const int count = renumber(community);
      for (auto& w : node_to_work) w = community[w];
      if (!moved || count == static_cast<int>(g.adj.size())) break;
      g = aggregate(g, community, count);
    }
    labels = node_to_work;
    if (!local_moving(base, resolution, rng, labels, true)) break;
  }
  renumber(labels);
  return labels;
}

}  // namespace

std::vector<int> louvain(const ChannelGraph& graph, const LouvainOptions& options) {
  const std::size_t n = graph.node_count();
  std::vector<int> labels(n, -1);
  const WorkGraph base = from_channel_graph(graph);
  if (!(base.total > 0.0)) return labels;

  // Best of several seeded runs, alternating greedy and randomized
  // coarsening; ties keep the earlier run.
  double best_q = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    std::seed_seq seq{options.seed, static_cast<std::uint64_t>(r)};
    std::mt19937_64 rng(seq);
    const auto node_to_work = run_once(base, options.resolution, rng, r % 2 == 1);

    // Canonical labels: ordered by smallest member index, isolated nodes -1.
    std::vector<int> canonical(n, -1), candidate(n, -1);
    int next = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (graph.isolated(static_cast<ChannelIndex>(v))) continue;
      int& c = canonical[node_to_work[v]];
      if (c < 0) c = next++;
      candidate[v] = c;
    }
    const double q = modularity(graph, candidate, options.resolution);
    if (q > best_q + 1e-12) {
      best_q = q;
      labels = std::move(candidate);
    }
  }
  return labels;
}

double modularity(const ChannelGraph& graph, std::span<const int> labels, double resolution) {
  const std::size_t n = graph.node_count();
  double two_m = 0.0;
  std::vector<double> degree(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    degree[v] = graph.weighted_degree(static_cast<ChannelIndex>(v));
    two_m += degree[v];
  }
  if (!(two_m > 0.0)) return 0.0;

  // Singletons for label -1 get unique keys past the largest label.
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  std::vector<int> key(n);
  int extra = max_label + 1;
  for (std::size_t v = 0; v < n; ++v) key[v] = labels[v] >= 0 ? labels[v] : extra++;

  std::vector<double> internal(static_cast<std::size_t>(extra), 0.0);
  std::vector<double> tot(static_cast<std::size_t>(extra), 0.0);
  for (const auto& e : graph.edges())
    if (key[e.a] == key[e.b]) internal[key[e.a]] += e.weight;
  for (std::size_t v = 0; v < n; ++v) tot[key[v]] += degree[v];
  double q = 0.0;
  for (std::size_t c = 0; c < internal.size(); ++c) {
    const double share = tot[c] / two_m;
    q += 2.0 * internal[c] / two_m - resolution * share * share;
  }
  return q;
}

}  // namespace mcsg
