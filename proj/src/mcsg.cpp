#include "mcsg/mcsg.hpp"

#include <algorithm>
#include <map>

#include "mcsg/error.hpp"

namespace mcsg {

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::merge: return "merge";
    case EditKind::split: return "split";
    case EditKind::reassign: return "reassign";
  }
  return "merge";
}

std::optional<EditKind> parse_edit_kind(std::string_view name) {
  if (name == "merge") return EditKind::merge;
  if (name == "split") return EditKind::split;
  if (name == "reassign") return EditKind::reassign;
  return std::nullopt;
}

EditCommand EditCommand::merge(std::vector<CommunityId> targets) {
  EditCommand c;
  c.kind = EditKind::merge;
  c.communities = std::move(targets);
  return c;
}

EditCommand EditCommand::split(CommunityId source, std::vector<ChannelIndex> first,
                               std::vector<ChannelIndex> second) {
  EditCommand c;
  c.kind = EditKind::split;
  c.communities = {source};
  c.parts = {std::move(first), std::move(second)};
  return c;
}

EditCommand EditCommand::reassign(ChannelIndex node, CommunityId destination) {
  EditCommand c;
  c.kind = EditKind::reassign;
  c.node = node;
  c.destination = destination;
  return c;
}

Mcsg::Mcsg(std::string dataset_name, GraphConfig config, std::vector<ChannelNode> channels,
           std::shared_ptr<const ChannelGraph> graph, CommunityHierarchy hierarchy,
           std::vector<EditRecord> edit_log)
    : dataset_name_(std::move(dataset_name)),
      config_(config),
      channels_(std::move(channels)),
      graph_(std::move(graph)),
      edit_log_(std::move(edit_log)) {
  if (!graph_) fail(ErrorKind::integrity, "missing channel graph");
  if (graph_->node_count() != channels_.size())
    fail(ErrorKind::integrity, "graph has " + std::to_string(graph_->node_count()) +
                                   " nodes for " + std::to_string(channels_.size()) + " channels");
  hierarchy.validate(*graph_);
  replace_hierarchy(std::move(hierarchy));
}

std::optional<ChannelIndex> Mcsg::find_channel(std::string_view id) const {
  for (std::size_t c = 0; c < channels_.size(); ++c)
    if (channels_[c].id == id) return static_cast<ChannelIndex>(c);
  return std::nullopt;
}

ChannelIndex Mcsg::require_channel(std::string_view id) const {
  auto c = find_channel(id);
  if (!c) fail(ErrorKind::not_found, "unknown channel node '" + std::string(id) + "'");
  return *c;
}

void Mcsg::replace_hierarchy(CommunityHierarchy hierarchy) {
  hierarchy_ = std::move(hierarchy);
  community_edges_.clear();
  for (int l = 0; l < hierarchy_.level_count(); ++l)
    community_edges_.push_back(compute_community_edges(*graph_, hierarchy_, l));
}

std::vector<CommunityEdge> compute_community_edges(const ChannelGraph& graph,
                                                   const CommunityHierarchy& hierarchy, int level) {
  const auto owner = hierarchy.assignment(level, graph.node_count());
  std::map<std::pair<CommunityId, CommunityId>, std::pair<double, std::size_t>> acc;
  for (const auto& e : graph.edges()) {
    const auto& ca = owner[e.a];
    const auto& cb = owner[e.b];
    if (!ca || !cb || *ca == *cb) continue;
    auto key = std::minmax(*ca, *cb);
    auto& [sum, count] = acc[{key.first, key.second}];
    sum += e.weight;
    ++count;
  }
  std::vector<CommunityEdge> out;
  out.reserve(acc.size());
  for (const auto& [key, value] : acc)
    out.push_back({key.first, key.second, value.first / static_cast<double>(value.second)});
  return out;
}

std::optional<double> mean_cross_weight(const ChannelGraph& graph,
                                        std::span<const ChannelIndex> a,
                                        std::span<const ChannelIndex> b) {
  std::vector<char> in_a(graph.node_count(), 0), in_b(graph.node_count(), 0);
  for (auto v : a) in_a.at(v) = 1;
  for (auto v : b) in_b.at(v) = 1;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& e : graph.edges()) {
    if ((in_a[e.a] && in_b[e.b]) || (in_a[e.b] && in_b[e.a])) {
      sum += e.weight;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

Mcsg materialize_mcsg(std::string dataset_name, GraphConfig config,
                      std::vector<ChannelNode> channels,
                      std::shared_ptr<const ChannelGraph> graph, CommunityHierarchy hierarchy) {
  return Mcsg(std::move(dataset_name), config, std::move(channels), std::move(graph),
              std::move(hierarchy));
}

Mcsg build_mcsg(const MsiDataset& ds, const GraphConfig& config) {
  if (!(config.hybrid_weight > 0.0 && config.hybrid_weight < 1.0))
    fail(ErrorKind::invalid_argument, "hybrid weight must lie in (0, 1)");
  const auto sim = compute_similarity(ds, config.similarity);
  auto graph = std::make_shared<const ChannelGraph>(build_channel_graph(sim, config.tau));
  auto hierarchy = detect_communities(
      *graph, HierarchyOptions{config.seed, config.max_depth, config.min_split_size, 1.0});
  std::vector<ChannelNode> channels;
  channels.reserve(ds.channel_count());
  for (const auto& ch : ds.channels()) channels.push_back({ch.id, ch.mz});
  return materialize_mcsg(ds.name(), config, std::move(channels), std::move(graph),
                          std::move(hierarchy));
}

}  // namespace mcsg
