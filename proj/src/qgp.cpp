#include "mcsg/qgp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

#include "mcsg/error.hpp"

namespace mcsg {

namespace {

constexpr double kMinDistance = 1e-9;

std::string format_number(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view to_string(QgpMetric metric) {
  switch (metric) {
    case QgpMetric::weighted_degree: return "weighted_degree";
    case QgpMetric::within_community_degree_z: return "within_community_degree_z";
    case QgpMetric::participation_coefficient: return "participation_coefficient";
    case QgpMetric::betweenness: return "betweenness";
    case QgpMetric::local_clustering_coefficient: return "local_clustering_coefficient";
  }
  return "weighted_degree";
}

std::optional<QgpMetric> parse_qgp_metric(std::string_view name) {
  for (auto m : {QgpMetric::weighted_degree, QgpMetric::within_community_degree_z,
                 QgpMetric::participation_coefficient, QgpMetric::betweenness,
                 QgpMetric::local_clustering_coefficient})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

double NodeQgp::metric(QgpMetric m) const {
  switch (m) {
    case QgpMetric::weighted_degree: return weighted_degree;
    case QgpMetric::within_community_degree_z: return within_community_degree_z;
    case QgpMetric::participation_coefficient: return participation_coefficient;
    case QgpMetric::betweenness: return betweenness;
    case QgpMetric::local_clustering_coefficient: return local_clustering_coefficient;
  }
  return 0.0;
}

double edge_distance(double weight) { return std::max(1.0 - weight, kMinDistance); }

std::vector<double> betweenness_centrality(const ChannelGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<double> bc(n, 0.0);
  if (n < 3) return bc;

  std::vector<double> dist(n), sigma(n), delta(n);
  std::vector<std::vector<ChannelIndex>> preds(n);
  std::vector<ChannelIndex> order;
  using Item = std::pair<double, ChannelIndex>;
  for (ChannelIndex s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    order.clear();
    std::vector<char> settled(n, 0);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[s] = 0.0;
    sigma[s] = 1.0;
    queue.push({0.0, s});
    while (!queue.empty()) {
      auto [d, v] = queue.top();
      queue.pop();
      if (settled[v] || d > dist[v]) continue;
      settled[v] = 1;
      order.push_back(v);
      for (const auto& nb : graph.neighbors(v)) {
        const ChannelIndex w = nb.node;
        if (settled[w]) continue;
        const double nd = dist[v] + edge_distance(nb.weight);
        const double tol = 1e-12 * std::max(1.0, nd);
        if (nd < dist[w] - tol) {
          dist[w] = nd;
          sigma[w] = sigma[v];
          preds[w].assign(1, v);
          queue.push({nd, w});
        } else if (std::abs(nd - dist[w]) <= tol) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const ChannelIndex w = *it;
      for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  // Each unordered pair was counted from both ends.
  const double pairs = static_cast<double>(n - 1) * static_cast<double>(n - 2);
  for (auto& b : bc) b /= pairs;
  return bc;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

void assign_flags(QgpReport& report, const QgpThresholds& t) {
  std::vector<double> degrees, betweenness;
  for (const auto& q : report.nodes)
    if (q.weighted_degree > 0.0) {
      degrees.push_back(q.weighted_degree);
      betweenness.push_back(q.betweenness);
    }
  const double degree_cut = percentile(degrees, t.singleton_percentile);
  const double bridge_cut = percentile(betweenness, t.bridge_percentile);
  for (auto& q : report.nodes) {
    unsigned f = 0;
    const bool isolated = q.community < 0 || !(q.weighted_degree > 0.0);
    if (isolated) {
      f |= kSingleton;
    } else {
      if (q.weighted_degree < degree_cut && q.max_incident_weight < report.tau + t.singleton_margin)
        f |= kSingleton;
      if (q.within_community_degree_z >= t.hub_z) f |= kHub;
      if (q.max_other_community_strength > t.misassigned_ratio * q.own_community_strength)
        f |= kMisassignedCandidate;
      if (q.betweenness > 0.0 && q.betweenness >= bridge_cut &&
          q.participation_coefficient >= t.bridge_participation)
        f |= kBridge;
    }
    q.flags = f;
  }
}

QgpReport compute_qgp(const ChannelGraph& graph, std::span<const int> community,
                      std::span<const std::string> ids, double tau, const QgpThresholds& thresholds) {
  const std::size_t n = graph.node_count();
  if (community.size() != n || ids.size() != n)
    fail(ErrorKind::invalid_argument, "community labels and ids must cover every node");
  QgpReport report;
  report.tau = tau;
  report.nodes.resize(n);

  double max_weight = 0.0;
  for (const auto& e : graph.edges()) max_weight = std::max(max_weight, e.weight);
  const auto bc = betweenness_centrality(graph);

  // Neighbors without a label are grouped by themselves.
  auto group_of = [&](ChannelIndex v) -> long {
    return community[v] >= 0 ? community[v] : -1 - static_cast<long>(v);
  };

  for (ChannelIndex v = 0; v < n; ++v) {
    NodeQgp& q = report.nodes[v];
    q.node = v;
    q.id = ids[v];
    q.community = community[v];
    q.betweenness = bc[v];
    std::map<long, double> strength;
    for (const auto& nb : graph.neighbors(v)) {
      q.weighted_degree += nb.weight;
      q.max_incident_weight = std::max(q.max_incident_weight, nb.weight);
      strength[group_of(nb.node)] += nb.weight;
    }
    if (q.weighted_degree > 0.0) {
      double sum_sq = 0.0;
      for (const auto& [g, s] : strength) {
        const double share = s / q.weighted_degree;
        sum_sq += share * share;
        if (g == group_of(v))
          q.own_community_strength = s;
        else
          q.max_other_community_strength = std::max(q.max_other_community_strength, s);
      }
      q.participation_coefficient = std::clamp(1.0 - sum_sq, 0.0, 1.0);
      if (strength.size() == 1 && strength.begin()->first == group_of(v))
        q.participation_coefficient = 0.0;
    }

    const auto nbs = graph.neighbors(v);
    if (nbs.size() >= 2 && max_weight > 0.0) {
      double sum = 0.0;
      for (std::size_t j = 0; j < nbs.size(); ++j)
        for (std::size_t k = j + 1; k < nbs.size(); ++k) {
          auto w = graph.weight(nbs[j].node, nbs[k].node);
          if (w) sum += std::cbrt(nbs[j].weight * nbs[k].weight * *w / (max_weight * max_weight * max_weight));
        }
      const double d = static_cast<double>(nbs.size());
      q.local_clustering_coefficient = std::clamp(2.0 * sum / (d * (d - 1.0)), 0.0, 1.0);
    }
  }

  // Within-community degree z-score over each community's members.
  std::map<int, std::vector<ChannelIndex>> members;
  for (ChannelIndex v = 0; v < n; ++v)
    if (community[v] >= 0) members[community[v]].push_back(v);
  for (const auto& [c, vs] : members) {
    double mean = 0.0;
    for (auto v : vs) mean += report.nodes[v].own_community_strength;
    mean /= static_cast<double>(vs.size());
    double var = 0.0;
    for (auto v : vs) {
      const double d = report.nodes[v].own_community_strength - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(vs.size()));
    for (auto v : vs)
      report.nodes[v].within_community_degree_z =
          sd > 1e-12 ? (report.nodes[v].own_community_strength - mean) / sd : 0.0;
  }

  assign_flags(report, thresholds);
  return report;
}

QgpReport compute_qgp(const Mcsg& graph, const QgpThresholds& thresholds, std::optional<int> level) {
  const auto& h = graph.hierarchy();
  const int l = level.value_or(h.finest_level());
  const std::size_t n = graph.channels().size();
  if (!h.empty() && (l < 0 || l >= h.level_count()))
    fail(ErrorKind::not_found, "hierarchy has no level " + std::to_string(l));
  std::vector<int> labels(n, -1);
  if (!h.empty()) {
    const auto owner = h.assignment(l, n);
    for (std::size_t v = 0; v < n; ++v)
      if (owner[v]) labels[v] = static_cast<int>(owner[v]->value);
  }
  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& c : graph.channels()) ids.push_back(c.id);
  auto report = compute_qgp(graph.graph(), labels, ids, graph.config().tau, thresholds);
  report.level = h.empty() ? -1 : l;
  return report;
}

std::vector<ChannelIndex> rank_nodes(const QgpReport& report, QgpMetric metric, bool descending) {
  std::vector<const NodeQgp*> rows;
  for (const auto& q : report.nodes) rows.push_back(&q);
  std::stable_sort(rows.begin(), rows.end(), [&](const NodeQgp* a, const NodeQgp* b) {
    const double x = a->metric(metric), y = b->metric(metric);
    if (x != y) return descending ? x > y : x < y;
    return a->id < b->id;
  });
  std::vector<ChannelIndex> out;
  out.reserve(rows.size());
  for (const auto* q : rows) out.push_back(q->node);
  return out;
}

std::string flags_to_string(unsigned flags) {
  std::string out;
  auto add = [&](unsigned bit, const char* name) {
    if (!(flags & bit)) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  add(kHub, "hub");
  add(kSingleton, "singleton");
  add(kBridge, "bridge");
  add(kMisassignedCandidate, "misassigned_candidate");
  return out;
}

std::string qgp_to_csv(const QgpReport& report) {
  std::string out =
      "node_id,community,weighted_degree,within_community_degree_z,participation_coefficient,"
      "betweenness,local_clustering_coefficient,flags\n";
  for (const auto& q : report.nodes) {
    out += q.id;
    out += ',';
    if (q.community >= 0) out += "community/" + std::to_string(q.community);
    for (double v : {q.weighted_degree, q.within_community_degree_z, q.participation_coefficient,
                     q.betweenness, q.local_clustering_coefficient}) {
      out += ',';
      out += format_number(v);
    }
    out += ',';
    out += flags_to_string(q.flags);
    out += '\n';
  }
  return out;
}

}  // namespace mcsg
