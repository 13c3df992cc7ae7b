#pragma once

#include <optional>
#include <vector>

#include "mcsg/hierarchy.hpp"

namespace mcsg {

enum class EditKind { merge, split, reassign };

std::string_view to_string(EditKind kind);
std::optional<EditKind> parse_edit_kind(std::string_view name);

/// One manual clustering edit on the finest hierarchy level.
///  - merge:    communities = two or more community ids
///  - split:    communities = {source}; parts = two member subsets
///  - reassign: node = channel to move; destination = target community
struct EditCommand {
  EditKind kind = EditKind::merge;
  std::vector<CommunityId> communities;
  std::vector<std::vector<ChannelIndex>> parts;
  std::optional<ChannelIndex> node;
  std::optional<CommunityId> destination;

  static EditCommand merge(std::vector<CommunityId> targets);
  static EditCommand split(CommunityId source, std::vector<ChannelIndex> first,
                           std::vector<ChannelIndex> second);
  static EditCommand reassign(ChannelIndex node, CommunityId destination);

  friend bool operator==(const EditCommand&, const EditCommand&) = default;
};

/// Community records an edit replaced (`before`) and introduced (`after`),
/// across all levels. Swapping them inverts the edit exactly.
struct HierarchyDelta {
  std::vector<Community> before;
  std::vector<Community> after;
  friend bool operator==(const HierarchyDelta&, const HierarchyDelta&) = default;
};

/// A command as it was applied, with the ids it created and its inverse.
/// Persisted with the graph for provenance.
struct EditRecord {
  EditCommand command;
  std::vector<CommunityId> created;
  HierarchyDelta inverse;
  friend bool operator==(const EditRecord&, const EditRecord&) = default;
};

}  // namespace mcsg
