#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mcsg/channel_graph.hpp"
#include "mcsg/dataset.hpp"
#include "mcsg/edit_command.hpp"
#include "mcsg/hierarchy.hpp"
#include "mcsg/similarity.hpp"

namespace mcsg {

/// Everything needed to rebuild a graph from a dataset.
struct GraphConfig {
  SimilarityMeasure similarity = SimilarityMeasure::pearson;
  double tau = 0.7;
  std::uint64_t seed = 42;
  int max_depth = 3;
  int min_split_size = 4;
  double hybrid_weight = 0.01;

  friend bool operator==(const GraphConfig&, const GraphConfig&) = default;
};

struct ChannelNode {
  std::string id;
  double mz = 0.0;

  friend bool operator==(const ChannelNode&, const ChannelNode&) = default;
};

struct CommunityEdge {
  CommunityId a;  // a < b, same level
  CommunityId b;
  double weight = 0.0;

  friend bool operator==(const CommunityEdge&, const CommunityEdge&) = default;
};

/// Mass channel similarity graph: channel nodes and edges, the community
/// hierarchy, and the community edges derived from both. Hybrid edges are
/// view data (see view.hpp) and never stored here.
///
/// The channel graph is shared between copies, so copying an Mcsg costs the
/// hierarchy only.
class Mcsg {
 public:
  Mcsg() = default;
  /// Validates the hierarchy against the graph (integrity error) and derives
  /// community edges.
  Mcsg(std::string dataset_name, GraphConfig config, std::vector<ChannelNode> channels,
       std::shared_ptr<const ChannelGraph> graph, CommunityHierarchy hierarchy,
       std::vector<EditRecord> edit_log = {});

  const std::string& dataset_name() const noexcept { return dataset_name_; }
  const GraphConfig& config() const noexcept { return config_; }
  const std::vector<ChannelNode>& channels() const noexcept { return channels_; }
  const ChannelGraph& graph() const noexcept { return *graph_; }
  const std::shared_ptr<const ChannelGraph>& shared_graph() const noexcept { return graph_; }
  const CommunityHierarchy& hierarchy() const noexcept { return hierarchy_; }
  const std::vector<CommunityEdge>& community_edges(int level) const {
    return community_edges_.at(static_cast<std::size_t>(level));
  }
  const std::vector<EditRecord>& edit_log() const noexcept { return edit_log_; }

  std::optional<ChannelIndex> find_channel(std::string_view id) const;
  /// Throws not_found.
  ChannelIndex require_channel(std::string_view id) const;

  /// Replaces the hierarchy (after an edit) and re-derives community edges.
  /// Validation is the caller's responsibility.
  void replace_hierarchy(CommunityHierarchy hierarchy);
  std::vector<EditRecord>& mutable_edit_log() noexcept { return edit_log_; }

  friend bool operator==(const Mcsg& a, const Mcsg& b) {
    return a.dataset_name_ == b.dataset_name_ && a.config_ == b.config_ &&
           a.channels_ == b.channels_ && *a.graph_ == *b.graph_ && a.hierarchy_ == b.hierarchy_ &&
           a.community_edges_ == b.community_edges_ && a.edit_log_ == b.edit_log_;
  }

 private:
  std::string dataset_name_;
  GraphConfig config_;
  std::vector<ChannelNode> channels_;
  std::shared_ptr<const ChannelGraph> graph_ = std::make_shared<ChannelGraph>();
  CommunityHierarchy hierarchy_;
  std::vector<std::vector<CommunityEdge>> community_edges_;
  std::vector<EditRecord> edit_log_;
};

/// Community edges of one level: for every pair of communities with at least
/// one channel edge between their members, the arithmetic mean of those edge
/// weights. Sums run over channel edges in (a, b) order.
std::vector<CommunityEdge> compute_community_edges(const ChannelGraph& graph,
                                                   const CommunityHierarchy& hierarchy, int level);

/// Mean weight of all channel edges between two member sets; nullopt when
/// none exist.
std::optional<double> mean_cross_weight(const ChannelGraph& graph,
                                        std::span<const ChannelIndex> a,
                                        std::span<const ChannelIndex> b);

/// Assembles a materialized graph with all communities collapsed.
Mcsg materialize_mcsg(std::string dataset_name, GraphConfig config,
                      std::vector<ChannelNode> channels,
                      std::shared_ptr<const ChannelGraph> graph, CommunityHierarchy hierarchy);

/// Full pipeline: similarity, thresholded channel graph, community detection.
Mcsg build_mcsg(const MsiDataset& ds, const GraphConfig& config);

}  // namespace mcsg
