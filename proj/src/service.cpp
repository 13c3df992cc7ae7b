#include "mcsg/service.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <set>

#include <json.hpp>

#include "mcsg/error.hpp"
#include "mcsg/image.hpp"
#include "mcsg/nodetrix.hpp"
#include "mcsg/roi.hpp"
#include "mcsg/serialization.hpp"
#include "mcsg/view.hpp"

namespace mcsg {

using nlohmann::json;

namespace {

HttpResponse json_response(const json& doc, int status = 200) {
  return HttpResponse{status, "application/json", doc.dump()};
}

HttpResponse png_response(const Raster& r) { return HttpResponse{200, "image/png", encode_png(r)}; }

HttpResponse error_response(int status, std::string_view kind, const std::string& message) {
  return json_response({{"error", kind}, {"message", message}}, status);
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_found: return 404;
    case ErrorKind::format:
    case ErrorKind::invalid_argument: return 400;
    case ErrorKind::io: return 500;
    default: return 422;
  }
}

json parse_body(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::format, std::string("request body is not valid JSON: ") + e.what());
  }
}

std::vector<std::string> split_list(std::string_view list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto end = std::min(list.find(',', start), list.size());
    if (end > start) out.emplace_back(list.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

Colormap colormap_param(const QueryParams& q) {
  auto it = q.find("colormap");
  if (it == q.end()) return Colormap::viridis;
  auto c = parse_colormap(it->second);
  if (!c) fail(ErrorKind::invalid_argument, "unknown colormap '" + it->second + "'");
  return *c;
}

json qgp_node_json(const NodeQgp& q) {
  json flags = json::array();
  for (auto [bit, name] : {std::pair{kHub, "hub"}, std::pair{kSingleton, "singleton"},
                           std::pair{kBridge, "bridge"},
                           std::pair{kMisassignedCandidate, "misassigned_candidate"}})
    if (q.flags & bit) flags.push_back(name);
  return {{"id", q.id},
          {"community", q.community >= 0 ? json(to_string(CommunityId{static_cast<std::uint32_t>(q.community)})) : json(nullptr)},
          {"weighted_degree", q.weighted_degree},
          {"within_community_degree_z", q.within_community_degree_z},
          {"participation_coefficient", q.participation_coefficient},
          {"betweenness", q.betweenness},
          {"local_clustering_coefficient", q.local_clustering_coefficient},
          {"flags", std::move(flags)}};
}

}  // namespace

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '+') {
      out.push_back(' ');
    } else if (ch == '%' && i + 2 < text.size() && std::isxdigit(static_cast<unsigned char>(text[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(text[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(text.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

QueryParams parse_query(std::string_view query) {
  QueryParams out;
  std::size_t start = 0;
  while (start < query.size()) {
    auto end = std::min(query.find('&', start), query.size());
    const auto pair = query.substr(start, end - start);
    if (!pair.empty()) {
      const auto eq = pair.find('=');
      if (eq == std::string_view::npos)
        out[percent_decode(pair)] = "";
      else
        out[percent_decode(pair.substr(0, eq))] = percent_decode(pair.substr(eq + 1));
    }
    start = end + 1;
  }
  return out;
}

Service::Service(std::shared_ptr<const MsiDataset> dataset, ServiceConfig config)
    : dataset_(std::move(dataset)),
      config_(config),
      editor_(build_mcsg(*dataset_, config_.graph)) {
  try {
    projection_ = compute_projection(*dataset_);
  } catch (const Error& e) {
    projection_error_ = e.what();
  }
}

Service::Service(std::shared_ptr<const MsiDataset> dataset, ServiceConfig config, Mcsg imported)
    : dataset_(std::move(dataset)), config_(config), editor_(std::move(imported)) {
  check_channels(editor_.graph());
  config_.graph = editor_.graph().config();
  try {
    projection_ = compute_projection(*dataset_);
  } catch (const Error& e) {
    projection_error_ = e.what();
  }
}

Mcsg Service::snapshot() const {
  std::shared_lock lock(mutex_);
  return editor_.graph();
}

void Service::check_channels(const Mcsg& graph) const {
  const auto& ch = graph.channels();
  if (ch.size() != dataset_->channel_count())
    fail(ErrorKind::validation, "graph has " + std::to_string(ch.size()) + " channels, dataset has " +
                                    std::to_string(dataset_->channel_count()));
  for (std::size_t i = 0; i < ch.size(); ++i)
    if (ch[i].id != dataset_->channel(static_cast<ChannelIndex>(i)).id)
      fail(ErrorKind::validation, "graph channel " + std::to_string(i) + " is '" + ch[i].id +
                                      "', dataset channel is '" +
                                      dataset_->channel(static_cast<ChannelIndex>(i)).id + "'");
}

HttpResponse Service::handle(const HttpRequest& request) {
  try {
    return dispatch(request);
  } catch (const Error& e) {
    return error_response(status_for(e.kind()), to_string(e.kind()), e.what());
  } catch (const json::exception& e) {
    return error_response(400, "format error", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal error", e.what());
  }
}

HttpResponse Service::dispatch(const HttpRequest& req) {
  const auto q = parse_query(req.query);
  const std::string_view path = req.path;
  const bool get = req.method == "GET";
  const bool post = req.method == "POST";

  struct Route {
    std::string_view path;
    bool is_get;
  };
  static constexpr Route routes[] = {
      {"/dataset/meta", true}, {"/graph", true},     {"/graph/view", true},
      {"/graph/nodetrix", true}, {"/qgp", true},     {"/image/aggregate", true},
      {"/image/projection", true}, {"/export", true}, {"/roi", false},
      {"/edit", false},        {"/undo", false},     {"/redo", false},
      {"/import", false},
  };
  for (const auto& r : routes) {
    if (path != r.path) continue;
    if ((r.is_get && !get) || (!r.is_get && !post))
      return error_response(405, "method not allowed", std::string(req.method) + " " + std::string(path));
    if (path == "/dataset/meta") return get_meta();
    if (path == "/graph" || path == "/export") {
      std::shared_lock lock(mutex_);
      return json_response(export_json(editor_.graph()));
    }
    if (path == "/graph/view") return get_view(q);
    if (path == "/graph/nodetrix") return get_nodetrix(q);
    if (path == "/qgp") return get_qgp(q);
    if (path == "/image/aggregate") return get_aggregate_image(q);
    if (path == "/image/projection") return get_projection_image();
    if (path == "/roi") return post_roi(req.body);
    if (path == "/edit") return post_edit(req.body);
    if (path == "/undo") return post_undo_redo(true);
    if (path == "/redo") return post_undo_redo(false);
    if (path == "/import") return post_import(req.body);
  }
  constexpr std::string_view channel_prefix = "/image/channel/";
  constexpr std::string_view optical_prefix = "/image/optical/";
  if (path.starts_with(channel_prefix) || path.starts_with(optical_prefix)) {
    if (!get) return error_response(405, "method not allowed", std::string(path));
    if (path.starts_with(channel_prefix))
      return get_channel_image(percent_decode(path.substr(channel_prefix.size())), q);
    return get_optical_image(percent_decode(path.substr(optical_prefix.size())));
  }
  return error_response(404, "not found", "no endpoint " + std::string(path));
}

HttpResponse Service::get_meta() const {
  const auto& ds = *dataset_;
  json channels = json::array();
  for (ChannelIndex c = 0; c < ds.channel_count(); ++c)
    channels.push_back({{"id", ds.channel(c).id},
                        {"mz", ds.channel(c).mz},
                        {"min", ds.range(c).min},
                        {"max", ds.range(c).max}});
  json optical = json::array();
  for (const auto& img : ds.optical_images()) optical.push_back(img.name);
  return json_response({{"name", ds.name()},
                        {"width", ds.grid().width()},
                        {"height", ds.grid().height()},
                        {"valid_pixels", ds.grid().valid_pixels().size()},
                        {"mask_rle", encode_mask_rle(ds.grid().mask())},
                        {"channels", std::move(channels)},
                        {"optical", std::move(optical)},
                        {"projection", projection_.has_value()}});
}

std::vector<ChannelIndex> Service::resolve_nodes(std::string_view list, const Mcsg& graph) const {
  std::vector<ChannelIndex> out;
  for (const auto& id : split_list(list)) {
    if (auto cid = parse_community_id(id)) {
      const auto& members = graph.hierarchy().get(*cid).members;
      out.insert(out.end(), members.begin(), members.end());
    } else {
      out.push_back(graph.require_channel(id));
    }
  }
  if (out.empty()) fail(ErrorKind::invalid_argument, "parameter 'nodes' lists no node");
  return out;
}

HttpResponse Service::get_view(const QueryParams& q) const {
  std::shared_lock lock(mutex_);
  const auto& graph = editor_.graph();
  ExpansionState state;
  if (auto it = q.find("expanded"); it != q.end())
    for (const auto& id : split_list(it->second)) {
      auto cid = parse_community_id(id);
      if (!cid) fail(ErrorKind::not_found, "unknown community '" + id + "'");
      state.set(graph, *cid, true);
    }
  return json_response(view_to_json(make_view(graph, state), graph));
}

HttpResponse Service::get_nodetrix(const QueryParams& q) const {
  std::shared_lock lock(mutex_);
  const auto& graph = editor_.graph();
  auto it = q.find("nodes");
  if (it == q.end()) fail(ErrorKind::invalid_argument, "missing parameter 'nodes'");
  const auto m = nodetrix_matrix(graph.graph(), resolve_nodes(it->second, graph));
  json order = json::array();
  for (auto c : m.order) order.push_back(graph.channels()[c].id);
  return json_response({{"node_order", std::move(order)}, {"cells", m.cells}});
}

HttpResponse Service::get_qgp(const QueryParams& q) const {
  std::shared_lock lock(mutex_);
  const auto& graph = editor_.graph();
  std::optional<int> level;
  if (auto it = q.find("level"); it != q.end()) {
    try {
      level = std::stoi(it->second);
    } catch (const std::exception&) {
      fail(ErrorKind::invalid_argument, "parameter 'level' is not an integer");
    }
  }
  const auto report = compute_qgp(graph, config_.qgp, level);
  if (auto it = q.find("format"); it != q.end() && it->second == "csv")
    return HttpResponse{200, "text/csv", qgp_to_csv(report)};

  std::vector<ChannelIndex> order;
  if (auto it = q.find("sort"); it != q.end()) {
    auto metric = parse_qgp_metric(it->second);
    if (!metric) fail(ErrorKind::invalid_argument, "unknown metric '" + it->second + "'");
    auto o = q.find("order");
    order = rank_nodes(report, *metric, o == q.end() || o->second != "asc");
  } else {
    for (const auto& n : report.nodes) order.push_back(n.node);
  }
  json nodes = json::array();
  for (auto v : order) nodes.push_back(qgp_node_json(report.nodes[v]));
  return json_response({{"level", report.level}, {"tau", report.tau}, {"nodes", std::move(nodes)}});
}

HttpResponse Service::get_channel_image(std::string_view id, const QueryParams& q) const {
  const auto cmap = colormap_param(q);
  return png_response(render_channel(*dataset_, dataset_->require_channel(id), cmap));
}

HttpResponse Service::get_aggregate_image(const QueryParams& q) const {
  const auto cmap = colormap_param(q);
  auto it = q.find("nodes");
  if (it == q.end()) fail(ErrorKind::invalid_argument, "missing parameter 'nodes'");
  std::vector<ChannelIndex> nodes;
  {
    std::shared_lock lock(mutex_);
    nodes = resolve_nodes(it->second, editor_.graph());
  }
  return png_response(render_aggregate(*dataset_, nodes, cmap));
}

HttpResponse Service::get_projection_image() const {
  if (!projection_) fail(ErrorKind::insufficient_data, projection_error_);
  return png_response(render_projection(*dataset_, *projection_));
}

HttpResponse Service::get_optical_image(std::string_view name) const {
  const auto* img = dataset_->find_optical(name);
  if (!img) fail(ErrorKind::not_found, "unknown optical image '" + std::string(name) + "'");
  return png_response(render_optical(*dataset_, *img));
}

HttpResponse Service::post_roi(std::string_view body) const {
  const auto doc = parse_body(body);
  if (!doc.is_object() || !doc.contains("polygon") || !doc["polygon"].is_array())
    fail(ErrorKind::invalid_argument, "expected {\"polygon\": [[x, y], ...], \"mu\", \"sigma\"}");
  std::vector<Point> polygon;
  for (const auto& v : doc["polygon"]) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail(ErrorKind::invalid_argument, "polygon vertices must be [x, y] number pairs");
    polygon.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  auto number = [&](const char* key) {
    if (!doc.contains(key) || !doc[key].is_number())
      fail(ErrorKind::invalid_argument, std::string("missing numeric '") + key + "'");
    return doc[key].get<double>();
  };
  const auto sel = select_roi(*dataset_, polygon, number("mu"), number("sigma"));

  std::shared_lock lock(mutex_);
  const auto& graph = editor_.graph();
  json matched = json::array();
  std::set<ChannelIndex> hit(sel.matched_nodes.begin(), sel.matched_nodes.end());
  for (auto c : sel.matched_nodes) matched.push_back(graph.channels()[c].id);
  json communities = json::array();
  for (const auto& [id, com] : graph.hierarchy().communities())
    if (std::any_of(com.members.begin(), com.members.end(), [&](ChannelIndex m) { return hit.contains(m); }))
      communities.push_back(to_string(id));
  return json_response({{"matched", std::move(matched)},
                        {"communities", std::move(communities)},
                        {"region_size", sel.region.size()}});
}

HttpResponse Service::post_edit(std::string_view body) {
  const auto doc = parse_body(body);
  std::unique_lock lock(mutex_);
  const auto cmd = edit_command_from_json(doc, editor_.graph());
  const auto outcome = editor_.apply(cmd);
  json created = json::array();
  for (auto id : outcome.created) created.push_back(to_string(id));
  json out = {{"applied", outcome.applied},
              {"created", std::move(created)},
              {"undo_depth", editor_.undo_depth()},
              {"redo_depth", editor_.redo_depth()}};
  if (!outcome.warning.empty()) out["warning"] = outcome.warning;
  return json_response(out);
}

HttpResponse Service::post_undo_redo(bool undo) {
  std::unique_lock lock(mutex_);
  const bool applied = undo ? editor_.undo() : editor_.redo();
  json out = {{"applied", applied},
              {"undo_depth", editor_.undo_depth()},
              {"redo_depth", editor_.redo_depth()}};
  if (!applied) out["warning"] = undo ? "nothing to undo" : "nothing to redo";
  return json_response(out);
}

HttpResponse Service::post_import(std::string_view body) {
  const auto doc = parse_body(body);
  Mcsg graph;
  try {
    graph = import_json(doc);
    check_channels(graph);
  } catch (const Error& e) {
    return error_response(422, to_string(e.kind()), e.what());
  }
  std::unique_lock lock(mutex_);
  editor_.reset(std::move(graph));
  config_.graph = editor_.graph().config();
  return json_response({{"imported", true},
                        {"levels", editor_.graph().hierarchy().level_count()},
                        {"communities", editor_.graph().hierarchy().communities().size()}});
}

}  // namespace mcsg
