#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcsg/channel_graph.hpp"
#include "mcsg/mcsg.hpp"

namespace mcsg {

enum class QgpMetric {
  weighted_degree,
  within_community_degree_z,
  participation_coefficient,
  betweenness,
  local_clustering_coefficient,
};

std::string_view to_string(QgpMetric metric);
std::optional<QgpMetric> parse_qgp_metric(std::string_view name);

enum QgpFlag : unsigned {
  kHub = 1u << 0,
  kSingleton = 1u << 1,
  kBridge = 1u << 2,
  kMisassignedCandidate = 1u << 3,
};

/// Heuristic role thresholds.
struct QgpThresholds {
  double hub_z = 2.0;
  double singleton_percentile = 5.0;
  double singleton_margin = 0.05;  // incident weights below tau + margin
  double misassigned_ratio = 1.5;
  double bridge_percentile = 90.0;
  double bridge_participation = 0.5;
};

struct NodeQgp {
  ChannelIndex node = 0;
  std::string id;
  int community = -1;  // label at the report level, -1 when isolated
  double weighted_degree = 0.0;
  double within_community_degree_z = 0.0;
  double participation_coefficient = 0.0;
  double betweenness = 0.0;
  double local_clustering_coefficient = 0.0;
  // Inputs to the flag rules, kept so flags are a function of the report.
  double own_community_strength = 0.0;
  double max_other_community_strength = 0.0;
  double max_incident_weight = 0.0;
  unsigned flags = 0;

  double metric(QgpMetric m) const;
};

struct QgpReport {
  int level = -1;  // hierarchy level the community roles refer to
  double tau = 0.0;
  std::vector<NodeQgp> nodes;
};

/// Metrics over the channel-level graph with community labels per node
/// (-1 for nodes outside every community). Flags are assigned.
QgpReport compute_qgp(const ChannelGraph& graph, std::span<const int> community,
                      std::span<const std::string> ids, double tau,
                      const QgpThresholds& thresholds = {});

/// Uses the community assignment of `level` (default: finest).
QgpReport compute_qgp(const Mcsg& graph, const QgpThresholds& thresholds = {},
                      std::optional<int> level = std::nullopt);

/// Recomputes every node's flags from the report values.
void assign_flags(QgpReport& report, const QgpThresholds& thresholds);

/// Shortest-path length used by betweenness: high similarity = short edge.
/// Perfectly similar pairs get a tiny positive length so that Dijkstra
/// ordering stays well defined.
double edge_distance(double weight);

/// Normalized betweenness over 1 - weight distances (undirected; divided by
/// (n-1)(n-2)/2 pairs).
std::vector<double> betweenness_centrality(const ChannelGraph& graph);

/// Linear-interpolation percentile (p in [0,100]) of unsorted values.
double percentile(std::vector<double> values, double p);

/// Stable ordering by metric; ties go to the lower node id.
std::vector<ChannelIndex> rank_nodes(const QgpReport& report, QgpMetric metric, bool descending);

std::string flags_to_string(unsigned flags);
std::string qgp_to_csv(const QgpReport& report);

}  // namespace mcsg
