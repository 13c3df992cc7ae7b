#include "http_server.hpp"

#include <stdexcept>

#include <httplib.h>

namespace mcsg::tools {

struct HttpServer::Impl {
  mcsg_session* session;
  httplib::Server server;
};

HttpServer::HttpServer(mcsg_session* session) : impl_(std::make_unique<Impl>()) {
  impl_->session = session;
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const auto q = req.target.find('?');
    const std::string query = q == std::string::npos ? "" : req.target.substr(q + 1);
    mcsg_response out{};
    const auto status = mcsg_session_handle(impl_->session, req.method.c_str(), req.path.c_str(),
                                            query.c_str(), req.body.data(), req.body.size(), &out);
    if (status != MCSG_OK) {
      res.status = 500;
      res.set_content(std::string(R"({"error":"internal","message":"request dispatch failed"})"),
                      "application/json");
      return;
    }
    res.status = out.status;
    res.set_content(std::string(reinterpret_cast<const char*>(out.body), out.body_size), out.content_type);
    mcsg_response_free(&out);
  };
  const char* any = R"(/.*)";
  impl_->server.Get(any, forward);
  impl_->server.Post(any, forward);
  impl_->server.Put(any, forward);
  impl_->server.Delete(any, forward);
  impl_->server.Patch(any, forward);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind to " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind to " + host + ":" + std::to_string(port));
  }
  return bound;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace mcsg::tools
