#pragma once

#include <set>
#include <variant>
#include <vector>

#include "mcsg/mcsg.hpp"

namespace mcsg {

using NodeRef = std::variant<ChannelIndex, CommunityId>;

enum class EdgeKind { channel, community, hybrid };
std::string_view to_string(EdgeKind kind);

struct ViewEdge {
  NodeRef source;
  NodeRef target;
  EdgeKind kind;
  double weight;

  friend bool operator==(const ViewEdge&, const ViewEdge&) = default;
};

/// Which communities are expanded. Everything starts collapsed.
class ExpansionState {
 public:
  /// Throws not_found for an unknown community.
  void set(const Mcsg& graph, CommunityId id, bool expanded);
  bool expanded(CommunityId id) const { return expanded_.contains(id); }
  const std::set<CommunityId>& ids() const noexcept { return expanded_; }

  friend bool operator==(const ExpansionState&, const ExpansionState&) = default;

 private:
  std::set<CommunityId> expanded_;
};

/// Visible nodes and edges for an expansion state. Collapsed level-0
/// communities show as community nodes; an expanded community shows its
/// child communities, or its member channels when it does not split further.
/// Isolated channels are always visible.
struct McsgView {
  std::vector<NodeRef> nodes;
  std::vector<ViewEdge> edges;

  std::size_t count(EdgeKind kind) const;
  friend bool operator==(const McsgView&, const McsgView&) = default;
};

McsgView make_view(const Mcsg& graph, const ExpansionState& expansion);

}  // namespace mcsg
