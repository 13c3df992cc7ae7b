#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcsg/channel_graph.hpp"

namespace mcsg {

struct CommunityId {
  std::uint32_t value = 0;

  friend auto operator<=>(const CommunityId&, const CommunityId&) = default;
};

/// Wire form is "community/<n>".
std::string to_string(CommunityId id);
std::optional<CommunityId> parse_community_id(std::string_view text);

struct Community {
  CommunityId id;
  int level = 0;                      // 0 = coarsest
  std::vector<ChannelIndex> members;  // sorted, unique, nonempty
  std::optional<CommunityId> parent;

  friend bool operator==(const Community&, const Community&) = default;
};

/// Nested partition of the non-isolated channel nodes. Every level is a full
/// partition; a community that does not split keeps a single child with the
/// same members so that each level stays complete.
class CommunityHierarchy {
 public:
  CommunityHierarchy() = default;
  CommunityHierarchy(int level_count, std::vector<Community> communities);

  int level_count() const noexcept { return level_count_; }
  bool empty() const noexcept { return level_count_ == 0; }
  int finest_level() const noexcept { return level_count_ - 1; }

  const std::map<CommunityId, Community>& communities() const noexcept { return communities_; }
  const Community* find(CommunityId id) const;
  /// Throws not_found.
  const Community& get(CommunityId id) const;

  /// Community ids at a level, ascending.
  std::vector<CommunityId> level(int l) const;
  std::vector<CommunityId> children(CommunityId id) const;
  /// Per-node community at `level`, nullopt for nodes outside the partition.
  std::vector<std::optional<CommunityId>> assignment(int level, std::size_t node_count) const;

  CommunityId next_id() const;

  /// Throws integrity if any structural invariant fails against `graph`:
  /// members in range and non-isolated, each level a partition of the
  /// non-isolated nodes, parents one level up, children inside parents.
  void validate(const ChannelGraph& graph) const;

  // Mutation primitives for the editor. They do not re-validate.
  void put(Community c);
  void erase(CommunityId id);
  /// Recomputes coarser levels as unions of their children, bottom-up, and
  /// drops communities left without members.
  void rebuild_ancestors();

  friend bool operator==(const CommunityHierarchy&, const CommunityHierarchy&) = default;

 private:
  int level_count_ = 0;
  std::map<CommunityId, Community> communities_;
};

struct HierarchyOptions {
  std::uint64_t seed = 42;
  int max_depth = 3;       // maximum number of levels
  int min_split_size = 4;  // only communities with more members are refined
  double resolution = 1.0;
};

/// Level 0 from Louvain on the whole graph; each community with more than
/// min_split_size members is refined by Louvain on its induced subgraph until
/// max_depth levels exist or no community splits with positive modularity.
/// An edgeless graph yields an empty hierarchy.
CommunityHierarchy detect_communities(const ChannelGraph& graph, const HierarchyOptions& options);

}  // namespace mcsg
