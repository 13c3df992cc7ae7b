#include "mcsg/hierarchy.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "mcsg/error.hpp"
#include "mcsg/louvain.hpp"

namespace mcsg {

namespace {

constexpr std::string_view kCommunityPrefix = "community/";

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::string to_string(CommunityId id) {
  return std::string(kCommunityPrefix) + std::to_string(id.value);
}

std::optional<CommunityId> parse_community_id(std::string_view text) {
  if (!text.starts_with(kCommunityPrefix)) return std::nullopt;
  text.remove_prefix(kCommunityPrefix.size());
  if (text.empty() || (text.size() > 1 && text.front() == '0')) return std::nullopt;
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return CommunityId{value};
}

CommunityHierarchy::CommunityHierarchy(int level_count, std::vector<Community> communities)
    : level_count_(level_count) {
  if (level_count < 0) fail(ErrorKind::integrity, "negative level count");
  for (auto& c : communities) {
    const auto id = c.id;
    if (!communities_.emplace(id, std::move(c)).second)
      fail(ErrorKind::integrity, "duplicate community id " + to_string(id));
  }
}

const Community* CommunityHierarchy::find(CommunityId id) const {
  auto it = communities_.find(id);
  return it == communities_.end() ? nullptr : &it->second;
}

const Community& CommunityHierarchy::get(CommunityId id) const {
  const auto* c = find(id);
  if (!c) fail(ErrorKind::not_found, "unknown community " + to_string(id));
  return *c;
}

std::vector<CommunityId> CommunityHierarchy::level(int l) const {
  std::vector<CommunityId> out;
  for (const auto& [id, c] : communities_)
    if (c.level == l) out.push_back(id);
  return out;
}

std::vector<CommunityId> CommunityHierarchy::children(CommunityId id) const {
  std::vector<CommunityId> out;
  for (const auto& [cid, c] : communities_)
    if (c.parent == id) out.push_back(cid);
  return out;
}

std::vector<std::optional<CommunityId>> CommunityHierarchy::assignment(int level,
                                                                       std::size_t node_count) const {
  std::vector<std::optional<CommunityId>> out(node_count);
  for (const auto& [id, c] : communities_)
    if (c.level == level)
      for (auto m : c.members)
        if (m < node_count) out[m] = id;
  return out;
}

CommunityId CommunityHierarchy::next_id() const {
  return communities_.empty() ? CommunityId{0}
                              : CommunityId{communities_.rbegin()->first.value + 1};
}

void CommunityHierarchy::validate(const ChannelGraph& graph) const {
  const std::size_t n = graph.node_count();
  if (level_count_ == 0) {
    if (!communities_.empty()) fail(ErrorKind::integrity, "communities without levels");
    return;
  }
  std::vector<std::vector<int>> seen(static_cast<std::size_t>(level_count_),
                                     std::vector<int>(n, 0));
  for (const auto& [id, c] : communities_) {
    const std::string where = to_string(id);
    if (c.level < 0 || c.level >= level_count_)
      fail(ErrorKind::integrity, where + ": level out of range");
    if (c.members.empty()) fail(ErrorKind::integrity, where + ": no members");
    if (!std::is_sorted(c.members.begin(), c.members.end()) ||
        std::adjacent_find(c.members.begin(), c.members.end()) != c.members.end())
      fail(ErrorKind::integrity, where + ": members not sorted and unique");
    for (auto m : c.members) {
      if (m >= n) fail(ErrorKind::integrity, where + ": member " + std::to_string(m) + " not in graph");
      if (graph.isolated(m))
        fail(ErrorKind::integrity, where + ": isolated node " + std::to_string(m) + " in a community");
      seen[static_cast<std::size_t>(c.level)][m]++;
    }
    if (c.level == 0) {
      if (c.parent) fail(ErrorKind::integrity, where + ": level-0 community with a parent");
    } else {
      if (!c.parent) fail(ErrorKind::integrity, where + ": missing parent");
      const auto* p = find(*c.parent);
      if (!p) fail(ErrorKind::integrity, where + ": dangling parent " + to_string(*c.parent));
      if (p->level != c.level - 1) fail(ErrorKind::integrity, where + ": parent level mismatch");
      if (!std::includes(p->members.begin(), p->members.end(), c.members.begin(), c.members.end()))
        fail(ErrorKind::integrity, where + ": members exceed parent");
    }
  }
  for (int l = 0; l < level_count_; ++l)
    for (std::size_t v = 0; v < n; ++v) {
      const int count = seen[static_cast<std::size_t>(l)][v];
      const bool expected = !graph.isolated(static_cast<ChannelIndex>(v));
      if (count != (expected ? 1 : 0))
        fail(ErrorKind::integrity, "level " + std::to_string(l) + ": node " + std::to_string(v) +
                                       " covered " + std::to_string(count) + " times");
    }
}

void CommunityHierarchy::put(Community c) {
  const auto id = c.id;
  communities_.insert_or_assign(id, std::move(c));
}

void CommunityHierarchy::erase(CommunityId id) { communities_.erase(id); }

void CommunityHierarchy::rebuild_ancestors() {
  for (int l = level_count_ - 2; l >= 0; --l) {
    std::map<CommunityId, std::set<ChannelIndex>> unions;
    for (const auto& [id, c] : communities_)
      if (c.level == l + 1 && c.parent) unions[*c.parent].insert(c.members.begin(), c.members.end());
    std::vector<CommunityId> dead;
    for (auto& [id, c] : communities_) {
      if (c.level != l) continue;
      auto it = unions.find(id);
      if (it == unions.end()) {
        dead.push_back(id);
        continue;
      }
      c.members.assign(it->second.begin(), it->second.end());
    }
    for (auto id : dead) communities_.erase(id);
  }
}

CommunityHierarchy detect_communities(const ChannelGraph& graph, const HierarchyOptions& options) {
  if (options.max_depth < 1) fail(ErrorKind::invalid_argument, "max_depth must be at least 1");
  if (options.min_split_size < 1)
    fail(ErrorKind::invalid_argument, "min_split_size must be at least 1");
  if (graph.edge_count() == 0) return {};

  std::vector<Community> all;
  std::uint32_t next = 0;

  const auto top = louvain(graph, {options.resolution, options.seed});
  const int top_count = top.empty() ? 0 : *std::max_element(top.begin(), top.end()) + 1;
  std::vector<Community> current(static_cast<std::size_t>(top_count));
  for (std::size_t v = 0; v < top.size(); ++v)
    if (top[v] >= 0) current[static_cast<std::size_t>(top[v])].members.push_back(static_cast<ChannelIndex>(v));
  for (auto& c : current) c.id = CommunityId{next++};

  int levels = 1;
  while (levels < options.max_depth) {
    std::vector<Community> refined;
    bool any_split = false;
    for (const auto& parent : current) {
      std::vector<std::vector<ChannelIndex>> parts;
      if (parent.members.size() > static_cast<std::size_t>(options.min_split_size)) {
        const auto sub = graph.induced(parent.members);
        if (sub.edge_count() > 0) {
          const auto labels =
              louvain(sub, {options.resolution, mix_seed(options.seed, parent.id.value)});
          const int k = *std::max_element(labels.begin(), labels.end()) + 1;
          const bool has_loose = std::find(labels.begin(), labels.end(), -1) != labels.end();
          if ((k + (has_loose ? 1 : 0)) > 1 && modularity(sub, labels, options.resolution) > 1e-12) {
            parts.assign(static_cast<std::size_t>(k), {});
            for (std::size_t i = 0; i < labels.size(); ++i) {
              if (labels[i] >= 0)
                parts[static_cast<std::size_t>(labels[i])].push_back(parent.members[i]);
              else
                parts.push_back({parent.members[i]});
            }
          }
        }
      }
      if (parts.size() > 1)
        any_split = true;
      else
        parts = {parent.members};
      for (auto& members : parts) {
        std::sort(members.begin(), members.end());
        refined.push_back(Community{CommunityId{0}, levels, std::move(members), parent.id});
      }
    }
    if (!any_split) break;
    for (auto& c : current) all.push_back(std::move(c));
    for (auto& c : refined) c.id = CommunityId{next++};
    current = std::move(refined);
    ++levels;
  }
  for (auto& c : current) all.push_back(std::move(c));

  CommunityHierarchy h(levels, std::move(all));
  h.validate(graph);
  return h;
}

}  // namespace mcsg
