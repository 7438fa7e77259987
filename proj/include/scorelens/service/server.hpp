#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <thread>

#include "scorelens/service/router.hpp"

namespace httplib {
class Server;
}

namespace scorelens::service {

/// HTTP front end forwarding every request to a Router.
class HttpServer {
 public:
  HttpServer(const Router& router, std::size_t threads = 8);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  /// Returns the bound port. Throws EngineError if binding fails.
  int start(const std::string& host, int port);

  /// Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);

  void stop();
  int port() const { return port_; }

 private:
  const Router& router_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace scorelens::service
