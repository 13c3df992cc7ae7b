#include "mcsg/view.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "mcsg/error.hpp"

namespace mcsg {

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::channel: return "channel";
    case EdgeKind::community: return "community";
    case EdgeKind::hybrid: return "hybrid";
  }
  return "channel";
}

void ExpansionState::set(const Mcsg& graph, CommunityId id, bool expanded) {
  graph.hierarchy().get(id);
  if (expanded)
    expanded_.insert(id);
  else
    expanded_.erase(id);
}

std::size_t McsgView::count(EdgeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(edges.begin(), edges.end(), [&](const ViewEdge& e) { return e.kind == kind; }));
}

namespace {

void reveal(const CommunityHierarchy& h, const ExpansionState& expansion, CommunityId id,
            std::vector<NodeRef>& out) {
  if (!expansion.expanded(id)) {
    out.emplace_back(id);
    return;
  }
  CommunityId at = id;
  auto children = h.children(at);
  while (children.size() == 1) {
    at = children.front();
    children = h.children(at);
  }
  if (children.empty()) {
    for (auto m : h.get(at).members) out.emplace_back(m);
    return;
  }
  for (auto child : children) reveal(h, expansion, child, out);
}

}  // namespace

McsgView make_view(const Mcsg& graph, const ExpansionState& expansion) {
  const auto& h = graph.hierarchy();
  const auto& g = graph.graph();
  McsgView view;
  for (auto id : h.level(0)) reveal(h, expansion, id, view.nodes);
  for (auto v : g.isolated_nodes()) view.nodes.emplace_back(v);

  // Owner of each channel among the visible units: either itself (visible
  // channel) or the visible community hiding it.
  std::vector<std::optional<std::size_t>> owner(g.node_count());
  for (std::size_t i = 0; i < view.nodes.size(); ++i) {
    if (const auto* c = std::get_if<ChannelIndex>(&view.nodes[i])) {
      owner[*c] = i;
    } else {
      for (auto m : h.get(std::get<CommunityId>(view.nodes[i])).members) owner[m] = i;
    }
  }

  struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::map<std::pair<std::size_t, std::size_t>, Acc> between;
  for (const auto& e : g.edges()) {
    const auto oa = owner[e.a];
    const auto ob = owner[e.b];
    if (!oa || !ob || *oa == *ob) continue;
    auto& acc = between[std::minmax(*oa, *ob)];
    acc.sum += e.weight;
    acc.count++;
  }
  for (const auto& [key, acc] : between) {
    const NodeRef& s = view.nodes[key.first];
    const NodeRef& t = view.nodes[key.second];
    const bool sc = std::holds_alternative<ChannelIndex>(s);
    const bool tc = std::holds_alternative<ChannelIndex>(t);
    if (sc && tc) {
      view.edges.push_back({s, t, EdgeKind::channel, acc.sum});
    } else if (!sc && !tc) {
      view.edges.push_back({s, t, EdgeKind::community, acc.sum / static_cast<double>(acc.count)});
    } else {
      // Hybrid edges always run from the visible channel to the community.
      view.edges.push_back(sc ? ViewEdge{s, t, EdgeKind::hybrid, graph.config().hybrid_weight}
                              : ViewEdge{t, s, EdgeKind::hybrid, graph.config().hybrid_weight});
    }
  }
  return view;
}

}  // namespace mcsg
