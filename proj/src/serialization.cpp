#include "mcsg/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mcsg/error.hpp"

namespace mcsg {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& pointer, const std::string& message) {
  fail(ErrorKind::format, (pointer.empty() ? std::string("/") : pointer) + ": " + message);
}

const json& require(const json& obj, const std::string& pointer, const char* key) {
  if (!obj.is_object()) schema_error(pointer, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(pointer + "/" + key, "missing");
  return *it;
}

std::string require_string(const json& v, const std::string& pointer) {
  if (!v.is_string()) schema_error(pointer, "expected string");
  return v.get<std::string>();
}

double require_number(const json& v, const std::string& pointer) {
  if (!v.is_number()) schema_error(pointer, "expected number");
  return v.get<double>();
}

std::int64_t require_integer(const json& v, const std::string& pointer) {
  if (!v.is_number_integer()) schema_error(pointer, "expected integer");
  return v.get<std::int64_t>();
}

const json& require_array(const json& v, const std::string& pointer) {
  if (!v.is_array()) schema_error(pointer, "expected array");
  return v;
}

CommunityId require_community_id(const json& v, const std::string& pointer) {
  const auto text = require_string(v, pointer);
  auto id = parse_community_id(text);
  if (!id) schema_error(pointer, "malformed community id '" + text + "'");
  return *id;
}

ChannelIndex resolve_channel(const std::map<std::string, ChannelIndex, std::less<>>& index,
                             const json& v, const std::string& pointer) {
  const auto text = require_string(v, pointer);
  auto it = index.find(text);
  if (it == index.end()) schema_error(pointer, "unknown channel node '" + text + "'");
  return it->second;
}

std::map<std::string, ChannelIndex, std::less<>> channel_index(std::span<const ChannelNode> channels) {
  std::map<std::string, ChannelIndex, std::less<>> index;
  for (std::size_t i = 0; i < channels.size(); ++i)
    index.emplace(channels[i].id, static_cast<ChannelIndex>(i));
  return index;
}

json command_to_json(const EditCommand& cmd, std::span<const ChannelNode> channels) {
  json out;
  out["kind"] = to_string(cmd.kind);
  json targets = json::array();
  for (auto id : cmd.communities) targets.push_back(to_string(id));
  if (cmd.node) targets.push_back(channels[*cmd.node].id);
  out["targets"] = std::move(targets);
  if (cmd.kind == EditKind::split) {
    json parts = json::array();
    for (const auto& part : cmd.parts) {
      json p = json::array();
      for (auto m : part) p.push_back(channels[m].id);
      parts.push_back(std::move(p));
    }
    out["parts"] = std::move(parts);
  }
  if (cmd.destination) out["destination"] = to_string(*cmd.destination);
  return out;
}

EditCommand command_from_json(const json& doc,
                              const std::map<std::string, ChannelIndex, std::less<>>& index,
                              const std::string& base) {
  if (!doc.is_object()) schema_error(base, "expected object");
  const auto kind_text = require_string(require(doc, base, "kind"), base + "/kind");
  auto kind = parse_edit_kind(kind_text);
  if (!kind) schema_error(base + "/kind", "unknown edit kind '" + kind_text + "'");
  const auto& targets = require_array(require(doc, base, "targets"), base + "/targets");
  EditCommand cmd;
  cmd.kind = *kind;
  switch (*kind) {
    case EditKind::merge:
      for (std::size_t i = 0; i < targets.size(); ++i)
        cmd.communities.push_back(require_community_id(targets[i], base + "/targets/" + std::to_string(i)));
      break;
    case EditKind::split: {
      if (targets.size() != 1) schema_error(base + "/targets", "split takes one community");
      cmd.communities.push_back(require_community_id(targets[0], base + "/targets/0"));
      const auto& parts = require_array(require(doc, base, "parts"), base + "/parts");
      for (std::size_t p = 0; p < parts.size(); ++p) {
        const std::string pp = base + "/parts/" + std::to_string(p);
        std::vector<ChannelIndex> members;
        for (std::size_t k = 0; k < require_array(parts[p], pp).size(); ++k)
          members.push_back(resolve_channel(index, parts[p][k], pp + "/" + std::to_string(k)));
        cmd.parts.push_back(std::move(members));
      }
      break;
    }
    case EditKind::reassign:
      if (targets.size() != 1) schema_error(base + "/targets", "reassign takes one channel node");
      cmd.node = resolve_channel(index, targets[0], base + "/targets/0");
      cmd.destination =
          require_community_id(require(doc, base, "destination"), base + "/destination");
      break;
  }
  return cmd;
}

json config_to_json(const GraphConfig& c) {
  return {{"similarity", to_string(c.similarity)}, {"tau", c.tau},
          {"seed", c.seed},                        {"max_depth", c.max_depth},
          {"min_split_size", c.min_split_size},    {"hybrid_weight", c.hybrid_weight}};
}

GraphConfig config_from_json(const json& doc, const std::string& base) {
  GraphConfig c;
  if (!doc.is_object()) schema_error(base, "expected object");
  const auto sim = require_string(require(doc, base, "similarity"), base + "/similarity");
  auto m = parse_similarity_measure(sim);
  if (!m) schema_error(base + "/similarity", "unknown measure '" + sim + "'");
  c.similarity = *m;
  c.tau = require_number(require(doc, base, "tau"), base + "/tau");
  const auto& seed = require(doc, base, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
    schema_error(base + "/seed", "expected non-negative integer");
  c.seed = seed.get<std::uint64_t>();
  c.max_depth = static_cast<int>(require_integer(require(doc, base, "max_depth"), base + "/max_depth"));
  c.min_split_size =
      static_cast<int>(require_integer(require(doc, base, "min_split_size"), base + "/min_split_size"));
  c.hybrid_weight = require_number(require(doc, base, "hybrid_weight"), base + "/hybrid_weight");
  return c;
}

json community_to_json(const Community& c, const std::vector<ChannelNode>& channels) {
  json members = json::array();
  for (auto m : c.members) members.push_back(channels[m].id);
  json node = {{"id", to_string(c.id)}, {"kind", "community"}, {"level", c.level},
               {"members", std::move(members)}};
  if (c.parent) node["parent"] = to_string(*c.parent);
  return node;
}

Community community_from_json(const json& node, const std::map<std::string, ChannelIndex, std::less<>>& index,
                              const std::string& p, std::int64_t level_count) {
  if (!node.is_object()) schema_error(p, "expected object");
  Community c;
  c.id = require_community_id(require(node, p, "id"), p + "/id");
  const auto level = require_integer(require(node, p, "level"), p + "/level");
  if (level < 0 || level >= level_count) schema_error(p + "/level", "level out of range");
  c.level = static_cast<int>(level);
  const auto& members = require_array(require(node, p, "members"), p + "/members");
  for (std::size_t k = 0; k < members.size(); ++k)
    c.members.push_back(resolve_channel(index, members[k], p + "/members/" + std::to_string(k)));
  std::sort(c.members.begin(), c.members.end());
  if (c.members.empty()) schema_error(p + "/members", "community without members");
  if (std::adjacent_find(c.members.begin(), c.members.end()) != c.members.end())
    schema_error(p + "/members", "member listed twice");
  if (node.contains("parent")) c.parent = require_community_id(node["parent"], p + "/parent");
  return c;
}

std::vector<Community> communities_from_json(const json& list,
                                             const std::map<std::string, ChannelIndex, std::less<>>& index,
                                             const std::string& p, std::int64_t level_count) {
  std::vector<Community> out;
  const auto& arr = require_array(list, p);
  for (std::size_t k = 0; k < arr.size(); ++k)
    out.push_back(community_from_json(arr[k], index, p + "/" + std::to_string(k), level_count));
  return out;
}

}  // namespace

json edit_command_to_json(const EditCommand& cmd, const Mcsg& graph) {
  return command_to_json(cmd, graph.channels());
}

EditCommand edit_command_from_json(const json& doc, const Mcsg& graph, const std::string& base) {
  return command_from_json(doc, channel_index(graph.channels()), base);
}

json export_json(const Mcsg& graph) {
  const auto& channels = graph.channels();
  const auto& h = graph.hierarchy();
  json nodes = json::array();
  for (const auto& ch : channels)
    nodes.push_back({{"id", ch.id}, {"kind", "channel"}, {"mz", ch.mz}});
  for (const auto& [id, c] : h.communities()) nodes.push_back(community_to_json(c, channels));

  json edges = json::array();
  for (const auto& e : graph.graph().edges())
    edges.push_back({{"source", channels[e.a].id},
                     {"target", channels[e.b].id},
                     {"kind", "channel"},
                     {"weight", e.weight}});
  for (int l = 0; l < h.level_count(); ++l)
    for (const auto& e : graph.community_edges(l))
      edges.push_back({{"source", to_string(e.a)},
                       {"target", to_string(e.b)},
                       {"kind", "community"},
                       {"weight", e.weight}});

  json log = json::array();
  for (const auto& r : graph.edit_log()) {
    json entry = command_to_json(r.command, channels);
    json created = json::array();
    for (auto id : r.created) created.push_back(to_string(id));
    entry["created"] = std::move(created);
    json restore = json::array(), remove = json::array();
    for (const auto& c : r.inverse.before) restore.push_back(community_to_json(c, channels));
    for (const auto& c : r.inverse.after) remove.push_back(community_to_json(c, channels));
    entry["inverse"] = {{"restore", std::move(restore)}, {"remove", std::move(remove)}};
    log.push_back(std::move(entry));
  }

  return {{"mcsg_version", kMcsgVersion},
          {"dataset_name", graph.dataset_name()},
          {"config", config_to_json(graph.config())},
          {"hierarchy", h.level_count()},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"edit_log", std::move(log)}};
}

std::string export_string(const Mcsg& graph) { return export_json(graph).dump(2) + "\n"; }

Mcsg import_json(const json& doc) {
  if (!doc.is_object()) schema_error("", "expected object");
  const auto& version = require(doc, "", "mcsg_version");
  if (!version.is_number_integer()) schema_error("/mcsg_version", "expected integer");
  if (version.get<std::int64_t>() != kMcsgVersion)
    schema_error("/mcsg_version", "unknown version " + version.dump());
  const auto name = require_string(require(doc, "", "dataset_name"), "/dataset_name");
  GraphConfig config;
  if (doc.contains("config")) config = config_from_json(doc["config"], "/config");
  const auto level_count = require_integer(require(doc, "", "hierarchy"), "/hierarchy");
  if (level_count < 0 || level_count > 64) schema_error("/hierarchy", "level count out of range");

  // Pass 1: channel nodes in document order.
  const auto& nodes = require_array(require(doc, "", "nodes"), "/nodes");
  std::vector<ChannelNode> channels;
  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string p = "/nodes/" + std::to_string(i);
    const auto id = require_string(require(nodes[i], p, "id"), p + "/id");
    if (!seen_ids.insert(id).second) schema_error(p + "/id", "duplicate node id '" + id + "'");
    const auto kind = require_string(require(nodes[i], p, "kind"), p + "/kind");
    if (kind == "channel") {
      if (!is_valid_node_id(id)) schema_error(p + "/id", "invalid channel id '" + id + "'");
      const double mz = require_number(require(nodes[i], p, "mz"), p + "/mz");
      channels.push_back({id, mz});
    } else if (kind != "community") {
      schema_error(p + "/kind", "unknown node kind '" + kind + "'");
    }
  }
  const auto index = channel_index(channels);

  // Pass 2: community nodes.
  std::vector<Community> communities;
  std::map<CommunityId, std::string> community_pointer;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string p = "/nodes/" + std::to_string(i);
    if (nodes[i]["kind"] != "community") continue;
    Community c = community_from_json(nodes[i], index, p, level_count);
    community_pointer[c.id] = p;
    communities.push_back(std::move(c));
  }
  for (const auto& c : communities)
    if (c.parent && !community_pointer.contains(*c.parent))
      schema_error(community_pointer[c.id] + "/parent",
                   "dangling reference to " + to_string(*c.parent));

  // Edges.
  const auto& edges = require_array(require(doc, "", "edges"), "/edges");
  std::vector<ChannelEdge> channel_edges;
  std::vector<std::pair<CommunityEdge, std::string>> community_edges;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string p = "/edges/" + std::to_string(i);
    const auto kind = require_string(require(edges[i], p, "kind"), p + "/kind");
    const double w = require_number(require(edges[i], p, "weight"), p + "/weight");
    if (!(w > 0.0 && w <= 1.0)) schema_error(p + "/weight", "weight outside (0, 1]");
    if (kind == "channel") {
      const auto a = resolve_channel(index, require(edges[i], p, "source"), p + "/source");
      const auto b = resolve_channel(index, require(edges[i], p, "target"), p + "/target");
      if (a == b) schema_error(p, "self loop");
      channel_edges.push_back({std::min(a, b), std::max(a, b), w});
    } else if (kind == "community") {
      const auto a = require_community_id(require(edges[i], p, "source"), p + "/source");
      const auto b = require_community_id(require(edges[i], p, "target"), p + "/target");
      if (!community_pointer.contains(a)) schema_error(p + "/source", "dangling reference to " + to_string(a));
      if (!community_pointer.contains(b)) schema_error(p + "/target", "dangling reference to " + to_string(b));
      community_edges.push_back({CommunityEdge{std::min(a, b), std::max(a, b), w}, p});
    } else if (kind == "hybrid") {
      schema_error(p + "/kind", "hybrid edges are view data and cannot be imported");
    } else {
      schema_error(p + "/kind", "unknown edge kind '" + kind + "'");
    }
  }
  std::shared_ptr<const ChannelGraph> graph;
  try {
    graph = std::make_shared<const ChannelGraph>(channels.size(), std::move(channel_edges));
  } catch (const Error& e) {
    schema_error("/edges", e.what());
  }

  std::optional<CommunityHierarchy> hierarchy;
  try {
    hierarchy.emplace(static_cast<int>(level_count), std::move(communities));
    hierarchy->validate(*graph);
  } catch (const Error& e) {
    schema_error("/nodes", e.what());
  }

  // Edit log.
  std::vector<EditRecord> log;
  if (doc.contains("edit_log")) {
    const auto& entries = require_array(doc["edit_log"], "/edit_log");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::string p = "/edit_log/" + std::to_string(i);
      EditRecord r{command_from_json(entries[i], index, p), {}, {}};
      if (entries[i].contains("created")) {
        const auto& created = require_array(entries[i]["created"], p + "/created");
        for (std::size_t k = 0; k < created.size(); ++k)
          r.created.push_back(require_community_id(created[k], p + "/created/" + std::to_string(k)));
      }
      if (entries[i].contains("inverse")) {
        const std::string q = p + "/inverse";
        const auto& inv = entries[i]["inverse"];
        if (!inv.is_object()) schema_error(q, "expected object");
        r.inverse.before = communities_from_json(require(inv, q, "restore"), index, q + "/restore", level_count);
        r.inverse.after = communities_from_json(require(inv, q, "remove"), index, q + "/remove", level_count);
      }
      log.push_back(std::move(r));
    }
  }

  Mcsg out(name, config, std::move(channels), std::move(graph), std::move(*hierarchy), std::move(log));

  // Stored community edges must agree with the mean-weight law.
  std::map<std::pair<CommunityId, CommunityId>, double> expected;
  for (int l = 0; l < out.hierarchy().level_count(); ++l)
    for (const auto& e : out.community_edges(l)) expected[{e.a, e.b}] = e.weight;
  std::set<std::pair<CommunityId, CommunityId>> listed;
  for (const auto& [e, p] : community_edges) {
    auto it = expected.find({e.a, e.b});
    if (it == expected.end())
      schema_error(p, "no channel edges run between " + to_string(e.a) + " and " + to_string(e.b));
    if (std::abs(it->second - e.weight) > 1e-12 * std::max(1.0, std::abs(it->second)))
      schema_error(p + "/weight", "weight differs from the mean of cross edges");
    if (!listed.insert({e.a, e.b}).second) schema_error(p, "duplicate community edge");
  }
  if (listed.size() != expected.size()) schema_error("/edges", "community edges missing");
  return out;
}

Mcsg import_string(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::format, std::string("invalid JSON: ") + e.what());
  }
  return import_json(doc);
}

json node_ref_to_json(const NodeRef& ref, const Mcsg& graph) {
  if (const auto* c = std::get_if<ChannelIndex>(&ref)) return graph.channels().at(*c).id;
  return to_string(std::get<CommunityId>(ref));
}

json view_to_json(const McsgView& view, const Mcsg& graph) {
  json nodes = json::array();
  for (const auto& n : view.nodes) {
    json entry = {{"id", node_ref_to_json(n, graph)}};
    if (const auto* c = std::get_if<ChannelIndex>(&n)) {
      entry["kind"] = "channel";
      entry["mz"] = graph.channels()[*c].mz;
    } else {
      const auto& com = graph.hierarchy().get(std::get<CommunityId>(n));
      entry["kind"] = "community";
      entry["level"] = com.level;
      entry["size"] = com.members.size();
    }
    nodes.push_back(std::move(entry));
  }
  json edges = json::array();
  for (const auto& e : view.edges)
    edges.push_back({{"source", node_ref_to_json(e.source, graph)},
                     {"target", node_ref_to_json(e.target, graph)},
                     {"kind", to_string(e.kind)},
                     {"weight", e.weight}});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

}  // namespace mcsg
