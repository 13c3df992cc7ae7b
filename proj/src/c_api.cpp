#include "mcsg/mcsg.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "mcsg/dataset.hpp"
#include "mcsg/error.hpp"
#include "mcsg/mcsg.hpp"
#include "mcsg/serialization.hpp"
#include "mcsg/service.hpp"
#include "mcsg/synthetic.hpp"

struct mcsg_dataset {
  std::shared_ptr<const mcsg::MsiDataset> dataset;
};

struct mcsg_session {
  std::unique_ptr<mcsg::Service> service;
};

namespace {

thread_local std::string last_error;

mcsg_status to_status(mcsg::ErrorKind kind) {
  using mcsg::ErrorKind;
  switch (kind) {
    case ErrorKind::invalid_argument: return MCSG_ERR_INVALID_ARGUMENT;
    case ErrorKind::format: return MCSG_ERR_FORMAT;
    case ErrorKind::validation: return MCSG_ERR_VALIDATION;
    case ErrorKind::not_found: return MCSG_ERR_NOT_FOUND;
    case ErrorKind::insufficient_data: return MCSG_ERR_INSUFFICIENT_DATA;
    case ErrorKind::empty_region: return MCSG_ERR_EMPTY_REGION;
    case ErrorKind::integrity: return MCSG_ERR_INTEGRITY;
    case ErrorKind::io: return MCSG_ERR_IO;
  }
  return MCSG_ERR_INTERNAL;
}

template <typename F>
mcsg_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const mcsg::Error& e) {
    last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return MCSG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MCSG_ERR_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

mcsg::GraphConfig to_graph_config(const mcsg_build_config& c) {
  mcsg::GraphConfig g;
  g.similarity = c.similarity == MCSG_COSINE ? mcsg::SimilarityMeasure::cosine
                                             : mcsg::SimilarityMeasure::pearson;
  g.tau = c.tau;
  g.seed = c.seed;
  g.max_depth = c.max_depth;
  g.min_split_size = c.min_split_size;
  g.hybrid_weight = c.hybrid_weight;
  return g;
}

// Routes a request and turns an error response back into a status.
mcsg_status call(mcsg_session* s, const char* method, const char* path, const std::string& body,
                 std::string* response_body) {
  const auto res = s->service->handle({method, path, "", body});
  if (response_body) *response_body = res.body;
  if (res.status < 400) return MCSG_OK;
  const auto doc = nlohmann::json::parse(res.body, nullptr, false);
  last_error = doc.is_object() && doc.contains("message") ? doc["message"].get<std::string>() : res.body;
  const std::string kind = doc.is_object() ? doc.value("error", "") : "";
  using mcsg::ErrorKind;
  for (auto k : {ErrorKind::invalid_argument, ErrorKind::format, ErrorKind::validation,
                 ErrorKind::not_found, ErrorKind::insufficient_data, ErrorKind::empty_region,
                 ErrorKind::integrity, ErrorKind::io})
    if (mcsg::to_string(k) == kind) return to_status(k);
  return MCSG_ERR_INTERNAL;
}

}  // namespace

extern "C" {

const char* mcsg_last_error(void) { return last_error.c_str(); }

const char* mcsg_status_name(mcsg_status status) {
  switch (status) {
    case MCSG_OK: return "ok";
    case MCSG_NOOP: return "no-op";
    case MCSG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MCSG_ERR_FORMAT: return "format error";
    case MCSG_ERR_VALIDATION: return "validation error";
    case MCSG_ERR_NOT_FOUND: return "not found";
    case MCSG_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case MCSG_ERR_EMPTY_REGION: return "empty region";
    case MCSG_ERR_INTEGRITY: return "integrity error";
    case MCSG_ERR_IO: return "i/o error";
    case MCSG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void mcsg_string_free(char* s) { std::free(s); }

mcsg_status mcsg_dataset_load(const char* path, mcsg_dataset** out) {
  return guarded([&] {
    if (!path || !out) mcsg::fail(mcsg::ErrorKind::invalid_argument, "null argument");
    auto ds = std::make_shared<const mcsg::MsiDataset>(mcsg::load_dataset(path));
    *out = new mcsg_dataset{std::move(ds)};
    return MCSG_OK;
  });
}

mcsg_status mcsg_dataset_synthetic(double noise, uint64_t seed, mcsg_dataset** out) {
  return guarded([&] {
    if (!out) mcsg::fail(mcsg::ErrorKind::invalid_argument, "null argument");
    mcsg::SyntheticOptions options;
    options.noise = noise;
    options.seed = seed;
    auto synth = mcsg::generate_synthetic(options);
    *out = new mcsg_dataset{std::make_shared<const mcsg::MsiDataset>(std::move(synth.dataset))};
    return MCSG_OK;
  });
}

mcsg_status mcsg_dataset_save(const mcsg_dataset* ds, const char* path, int sidecar) {
  return guarded([&] {
    if (!ds || !path) mcsg::fail(mcsg::ErrorKind::invalid_argument, "null argument");
    mcsg::save_dataset(*ds->dataset, path,
                       sidecar ? mcsg::SidecarMode::binary_sidecar : mcsg::SidecarMode::inline_values);
    return MCSG_OK;
  });
}

size_t mcsg_dataset_channel_count(const mcsg_dataset* ds) {
  return ds ? ds->dataset->channel_count() : 0;
}

void mcsg_dataset_free(mcsg_dataset* ds) { delete ds; }

void mcsg_build_config_default(mcsg_build_config* config) {
  if (!config) return;
  const mcsg::GraphConfig g;
  config->similarity = MCSG_PEARSON;
  config->tau = g.tau;
  config->seed = g.seed;
  config->max_depth = g.max_depth;
  config->min_split_size = g.min_split_size;
  config->hybrid_weight = g.hybrid_weight;
}

mcsg_status mcsg_session_create(const mcsg_dataset* ds, const mcsg_build_config* config,
                                mcsg_session** out) {
  return guarded([&] {
    if (!ds || !out) mcsg::fail(mcsg::ErrorKind::invalid_argument, "null argument");
    mcsg_build_config c;
    mcsg_build_config_default(&c);
    if (config) c = *config;
    mcsg::ServiceConfig sc;
    sc.graph = to_graph_config(c);
    auto service = std::make_unique<mcsg::Service>(ds->dataset, sc);
    *out = new mcsg_session{std::move(service)};
    return MCSG_OK;
  });
}

mcsg_status mcsg_session_create_imported(const mcsg_dataset* ds, const char* json, mcsg_session** out) {
  return guarded([&] {
    if (!ds || !json || !out) mcsg::fail(mcsg::ErrorKind::invalid_argument, "null argument");
    auto graph = mcsg::import_string(json);
    auto service = std::make_unique<mcsg::Service>(ds->dataset, mcsg::ServiceConfig{}, std::move(graph));
    *out = new mcsg_session{std::move(service)};
    return MCSG_OK;
  });
}

void mcsg_session_free(mcsg_session* s) { delete s; }

mcsg_status mcsg_session_export(mcsg_session* s, char** out_json) {
  return guarded([&] {
    if (!s || !out_json) mcsg::fail(mcsg::ErrorKind::invalid_argument, "null argument");
    *out_json = copy_string(mcsg::export_string(s->service->snapshot()));
    return MCSG_OK;
  });
}

mcsg_status mcsg_session_import(mcsg_session* s, const char* json) {
  return guarded([&] {
    if (!s || !json) mcsg::fail(mcsg::ErrorKind::invalid_argument, "null argument");
    return call(s, "POST", "/import", json, nullptr);
  });
}

mcsg_status mcsg_session_edit(mcsg_session* s, const char* command_json, char** out_result) {
  return guarded([&] {
    if (!s || !command_json) mcsg::fail(mcsg::ErrorKind::invalid_argument, "null argument");
    std::string body;
    const auto status = call(s, "POST", "/edit", command_json, &body);
    if (out_result) *out_result = copy_string(body);
    if (status != MCSG_OK) return status;
    const auto doc = nlohmann::json::parse(body);
    return doc.value("applied", false) ? MCSG_OK : MCSG_NOOP;
  });
}

static mcsg_status undo_redo(mcsg_session* s, const char* path) {
  return guarded([&] {
    if (!s) mcsg::fail(mcsg::ErrorKind::invalid_argument, "null argument");
    std::string body;
    const auto status = call(s, "POST", path, "", &body);
    if (status != MCSG_OK) return status;
    return nlohmann::json::parse(body).value("applied", false) ? MCSG_OK : MCSG_NOOP;
  });
}

mcsg_status mcsg_session_undo(mcsg_session* s) { return undo_redo(s, "/undo"); }
mcsg_status mcsg_session_redo(mcsg_session* s) { return undo_redo(s, "/redo"); }

mcsg_status mcsg_session_qgp_csv(mcsg_session* s, char** out_csv) {
  return guarded([&] {
    if (!s || !out_csv) mcsg::fail(mcsg::ErrorKind::invalid_argument, "null argument");
    const auto res = s->service->handle({"GET", "/qgp", "format=csv", ""});
    if (res.status >= 400) mcsg::fail(mcsg::ErrorKind::integrity, res.body);
    *out_csv = copy_string(res.body);
    return MCSG_OK;
  });
}

mcsg_status mcsg_session_handle(mcsg_session* s, const char* method, const char* path,
                                const char* query, const char* body, size_t body_size,
                                mcsg_response* out) {
  return guarded([&] {
    if (!s || !method || !path || !out || (!body && body_size > 0))
      mcsg::fail(mcsg::ErrorKind::invalid_argument, "null argument");
    mcsg::HttpRequest req{method, path, query ? query : "",
                          body ? std::string(body, body_size) : std::string{}};
    const auto res = s->service->handle(req);
    out->status = res.status;
    out->content_type = copy_string(res.content_type);
    out->body_size = res.body.size();
    out->body = static_cast<unsigned char*>(std::malloc(res.body.size() + 1));
    if (!out->body) throw std::bad_alloc();
    std::memcpy(out->body, res.body.data(), res.body.size());
    out->body[res.body.size()] = 0;
    return MCSG_OK;
  });
}

void mcsg_response_free(mcsg_response* r) {
  if (!r) return;
  std::free(r->content_type);
  std::free(r->body);
  r->content_type = nullptr;
  r->body = nullptr;
  r->body_size = 0;
}

}  // extern "C"
