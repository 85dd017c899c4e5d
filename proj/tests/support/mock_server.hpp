#pragma once

#include <functional>
#include <string>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "httplib.h"

namespace rctest {

/// Loopback HTTP server on an ephemeral port, serving until destroyed.
class MockServer {
public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  void post(const std::string& path, Handler handler) { server_.Post(path, std::move(handler)); }

  void start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

  ~MockServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

/// A loopback port with nothing listening on it.
inline int closed_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);  // never listened on, so connects are refused
  return ntohs(addr.sin_port);
}

}  // namespace rctest
