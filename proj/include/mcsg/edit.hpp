#pragma once

#include <string>
#include <vector>

#include "mcsg/edit_command.hpp"
#include "mcsg/mcsg.hpp"

namespace mcsg {

struct EditOutcome {
  bool applied = false;
  std::string warning;  // set for no-op edits
  std::vector<CommunityId> created;
};

struct AppliedEdit {
  Mcsg graph;
  EditOutcome outcome;
};

/// Applies one edit to a copy of `graph`. Edits act on the finest level;
/// coarser levels follow through the (unchanged) parent links. Merged and
/// split communities get fresh ids and inherit the parent of the first
/// target; communities left empty are removed. Applied commands are appended
/// to the edit log together with their inverse, no-ops are not.
///
/// Throws not_found for unknown ids and validation for malformed commands.
AppliedEdit apply_edit(const Mcsg& graph, const EditCommand& command);

/// Keeps the current graph plus undo/redo history for one session. Undo
/// reverts the tail of the edit log through each record's inverse; only
/// edits made in this session are undoable.
class GraphEditor {
 public:
  explicit GraphEditor(Mcsg initial);

  const Mcsg& graph() const noexcept { return graph_; }

  EditOutcome apply(const EditCommand& command);
  /// Returns false (and changes nothing) when there is nothing to undo/redo.
  bool undo();
  bool redo();

  std::size_t undo_depth() const noexcept { return undo_depth_; }
  std::size_t redo_depth() const noexcept { return redo_.size(); }

  /// Replaces the graph wholesale (import) and clears the history.
  void reset(Mcsg graph);

 private:
  Mcsg graph_;
  std::size_t undo_depth_ = 0;
  std::vector<EditRecord> redo_;
};

}  // namespace mcsg
