#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "mcsg/dataset.hpp"
#include "mcsg/edit.hpp"
#include "mcsg/mcsg.hpp"
#include "mcsg/projection.hpp"
#include "mcsg/qgp.hpp"

namespace mcsg {

struct HttpRequest {
  std::string method;  // "GET" or "POST"
  std::string path;    // without query string
  std::string query;   // raw, percent-encoded
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct ServiceConfig {
  GraphConfig graph;
  QgpThresholds qgp;
};

using QueryParams = std::map<std::string, std::string, std::less<>>;
QueryParams parse_query(std::string_view query);
std::string percent_decode(std::string_view text);

/// Session state behind the HTTP endpoints: one dataset, one editable graph.
/// Reads run concurrently; mutations are serialized and complete before the
/// response is produced.
///
///   GET  /dataset/meta
///   GET  /graph                     exported document
///   GET  /graph/view?expanded=..    visible nodes/edges incl. hybrid edges
///   GET  /graph/nodetrix?nodes=..   community ids expand to their members
///   GET  /qgp[?level=&sort=&order=asc|desc&format=csv]
///   GET  /image/channel/{id}[?colormap=viridis|gray]
///   GET  /image/aggregate?nodes=..[&colormap=]
///   GET  /image/projection
///   GET  /image/optical/{name}
///   POST /roi       {"polygon": [[x, y], ...], "mu": m, "sigma": s}
///   POST /edit      edit command document
///   POST /undo, /redo
///   GET  /export
///   POST /import    exported document
class Service {
 public:
  /// Builds the graph from the dataset.
  Service(std::shared_ptr<const MsiDataset> dataset, ServiceConfig config);
  /// Starts from an imported graph; its channels must match the dataset.
  Service(std::shared_ptr<const MsiDataset> dataset, ServiceConfig config, Mcsg imported);

  HttpResponse handle(const HttpRequest& request);

  const MsiDataset& dataset() const noexcept { return *dataset_; }
  Mcsg snapshot() const;

 private:
  HttpResponse dispatch(const HttpRequest& request);
  HttpResponse get_meta() const;
  HttpResponse get_view(const QueryParams& q) const;
  HttpResponse get_nodetrix(const QueryParams& q) const;
  HttpResponse get_qgp(const QueryParams& q) const;
  HttpResponse get_channel_image(std::string_view id, const QueryParams& q) const;
  HttpResponse get_aggregate_image(const QueryParams& q) const;
  HttpResponse get_projection_image() const;
  HttpResponse get_optical_image(std::string_view name) const;
  HttpResponse post_roi(std::string_view body) const;
  HttpResponse post_edit(std::string_view body);
  HttpResponse post_undo_redo(bool undo);
  HttpResponse post_import(std::string_view body);

  std::vector<ChannelIndex> resolve_nodes(std::string_view list, const Mcsg& graph) const;
  void check_channels(const Mcsg& graph) const;

  std::shared_ptr<const MsiDataset> dataset_;
  ServiceConfig config_;
  std::optional<RgbProjection> projection_;
  std::string projection_error_;
  mutable std::shared_mutex mutex_;
  GraphEditor editor_;
};

}  // namespace mcsg
