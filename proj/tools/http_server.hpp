#pragma once

#include <functional>
#include <memory>
#include <string>

#include "mcsg/mcsg.h"

namespace mcsg::tools {

/// Binds a socket and forwards every request to mcsg_session_handle.
/// The session must outlive the server.
class HttpServer {
 public:
  explicit HttpServer(mcsg_session* session);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Returns the bound port; port 0 picks a free one. Throws std::runtime_error.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mcsg::tools
