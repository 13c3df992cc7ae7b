#include "mcsg/edit.hpp"

#include <algorithm>
#include <set>

#include "mcsg/error.hpp"

namespace mcsg {

namespace {

const Community& finest_community(const CommunityHierarchy& h, CommunityId id) {
  const auto& c = h.get(id);
  if (c.level != h.finest_level())
    fail(ErrorKind::validation, to_string(id) + " is at level " + std::to_string(c.level) +
                                    ", edits act on the finest level " +
                                    std::to_string(h.finest_level()));
  return c;
}

std::vector<ChannelIndex> sorted_unique(std::vector<ChannelIndex> v, const std::string& what) {
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    fail(ErrorKind::validation, "invalid split partition: " + what + " lists a node twice");
  return v;
}

HierarchyDelta diff(const CommunityHierarchy& before, const CommunityHierarchy& after) {
  HierarchyDelta d;
  for (const auto& [id, c] : before.communities()) {
    const auto* other = after.find(id);
    if (!other || !(*other == c)) d.before.push_back(c);
  }
  for (const auto& [id, c] : after.communities()) {
    const auto* other = before.find(id);
    if (!other || !(*other == c)) d.after.push_back(c);
  }
  return d;
}

CommunityHierarchy patch(const CommunityHierarchy& h, const std::vector<Community>& remove,
                         const std::vector<Community>& add) {
  CommunityHierarchy out = h;
  for (const auto& c : remove) out.erase(c.id);
  for (const auto& c : add) out.put(c);
  return out;
}

}  // namespace

AppliedEdit apply_edit(const Mcsg& graph, const EditCommand& cmd) {
  const auto& h = graph.hierarchy();
  if (h.empty()) fail(ErrorKind::not_found, "graph has no communities to edit");
  CommunityHierarchy next = h;
  EditOutcome outcome;
  const int finest = h.finest_level();

  switch (cmd.kind) {
    case EditKind::merge: {
      if (cmd.communities.size() < 2)
        fail(ErrorKind::validation, "merge needs at least two communities");
      std::set<CommunityId> distinct(cmd.communities.begin(), cmd.communities.end());
      if (distinct.size() != cmd.communities.size())
        fail(ErrorKind::validation, "merge lists a community twice");
      std::set<ChannelIndex> members;
      for (auto id : cmd.communities) {
        const auto& c = finest_community(h, id);
        members.insert(c.members.begin(), c.members.end());
      }
      const auto parent = h.get(cmd.communities.front()).parent;
      const auto id = h.next_id();
      for (auto t : cmd.communities) next.erase(t);
      next.put(Community{id, finest, {members.begin(), members.end()}, parent});
      outcome.created = {id};
      break;
    }
    case EditKind::split: {
      if (cmd.communities.size() != 1)
        fail(ErrorKind::validation, "split needs exactly one source community");
      const auto& src = finest_community(h, cmd.communities.front());
      if (cmd.parts.size() != 2)
        fail(ErrorKind::validation, "invalid split partition: expected two member subsets");
      auto first = sorted_unique(cmd.parts[0], "first subset");
      auto second = sorted_unique(cmd.parts[1], "second subset");
      if (first.empty() || second.empty())
        fail(ErrorKind::validation, "invalid split partition: subsets must be nonempty");
      std::vector<ChannelIndex> both;
      std::set_intersection(first.begin(), first.end(), second.begin(), second.end(),
                            std::back_inserter(both));
      if (!both.empty())
        fail(ErrorKind::validation, "invalid split partition: node " +
                                        graph.channels().at(both.front()).id + " in both subsets");
      std::vector<ChannelIndex> all;
      std::merge(first.begin(), first.end(), second.begin(), second.end(), std::back_inserter(all));
      if (all != src.members)
        fail(ErrorKind::validation, "invalid split partition: subsets do not cover exactly the "
                                    "members of " + to_string(src.id));
      const CommunityId a = h.next_id();
      const CommunityId b{a.value + 1};
      const auto parent = src.parent;
      next.erase(src.id);
      next.put(Community{a, finest, std::move(first), parent});
      next.put(Community{b, finest, std::move(second), parent});
      outcome.created = {a, b};
      break;
    }
    case EditKind::reassign: {
      if (!cmd.node || !cmd.destination)
        fail(ErrorKind::validation, "reassign needs a node and a destination");
      const ChannelIndex node = *cmd.node;
      if (node >= graph.channels().size())
        fail(ErrorKind::not_found, "unknown channel node " + std::to_string(node));
      const auto& dest = finest_community(h, *cmd.destination);
      if (graph.graph().isolated(node))
        fail(ErrorKind::validation, "isolated node " + graph.channels()[node].id +
                                        " cannot join a community");
      const auto current = h.assignment(finest, graph.channels().size())[node];
      if (!current) fail(ErrorKind::integrity, "node outside the partition");
      if (*current == dest.id) {
        outcome.warning = "node " + graph.channels()[node].id + " already belongs to " +
                          to_string(dest.id) + "; nothing changed";
        return AppliedEdit{graph, std::move(outcome)};
      }
      Community from = h.get(*current);
      Community to = dest;
      from.members.erase(std::find(from.members.begin(), from.members.end(), node));
      to.members.insert(std::upper_bound(to.members.begin(), to.members.end(), node), node);
      if (from.members.empty())
        next.erase(from.id);
      else
        next.put(std::move(from));
      next.put(std::move(to));
      break;
    }
  }

  next.rebuild_ancestors();
  next.validate(graph.graph());
  outcome.applied = true;
  auto delta = diff(h, next);
  AppliedEdit result{graph, std::move(outcome)};
  result.graph.replace_hierarchy(std::move(next));
  result.graph.mutable_edit_log().push_back(EditRecord{cmd, result.outcome.created, std::move(delta)});
  return result;
}

GraphEditor::GraphEditor(Mcsg initial) : graph_(std::move(initial)) {}

EditOutcome GraphEditor::apply(const EditCommand& command) {
  auto result = apply_edit(graph_, command);
  if (!result.outcome.applied) return result.outcome;
  graph_ = std::move(result.graph);
  ++undo_depth_;
  redo_.clear();
  return result.outcome;
}

bool GraphEditor::undo() {
  if (undo_depth_ == 0 || graph_.edit_log().empty()) return false;
  Mcsg next = graph_;
  EditRecord record = std::move(next.mutable_edit_log().back());
  next.mutable_edit_log().pop_back();
  next.replace_hierarchy(patch(graph_.hierarchy(), record.inverse.after, record.inverse.before));
  redo_.push_back(std::move(record));
  graph_ = std::move(next);
  --undo_depth_;
  return true;
}

bool GraphEditor::redo() {
  if (redo_.empty()) return false;
  EditRecord record = std::move(redo_.back());
  redo_.pop_back();
  Mcsg next = graph_;
  next.replace_hierarchy(patch(graph_.hierarchy(), record.inverse.before, record.inverse.after));
  next.mutable_edit_log().push_back(std::move(record));
  graph_ = std::move(next);
  ++undo_depth_;
  return true;
}

void GraphEditor::reset(Mcsg graph) {
  graph_ = std::move(graph);
  undo_depth_ = 0;
  redo_.clear();
}

}  // namespace mcsg
