#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "csi/gateway/gateway.hpp"
#include "csi/gateway/operator_api.hpp"
#include "csi/gateway/tcp_server.hpp"

namespace csi::gateway {

struct ServeOptions {
  std::string client_host = "127.0.0.1";
  std::uint16_t client_port = 7400;
  std::string operator_host = "127.0.0.1";
  std::uint16_t operator_port = 7401;
  SessionDefaults defaults;
  /// Wall-clock granularity of session clocks.
  Millis tick{250};
};

/// "host:port" split; throws ConfigError.
std::pair<std::string, std::uint16_t> parse_bind(const std::string& text);

/// Reads CSI_BIND, CSI_OPERATOR_BIND, CSI_STORAGE_DIR and the CSI_LLM_*
/// distiller settings on top of `base`.
ServeOptions serve_options_from_environment(ServeOptions base = {});

/// Client transport, router, operator API and the clock ticker together.
class Server {
 public:
  explicit Server(ServeOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t client_port() const { return tcp_.port(); }
  std::uint16_t operator_port() const { return operator_port_; }
  Gateway& gateway() { return gateway_; }

  void stop();

 private:
  void tick_loop();

  ServeOptions options_;
  TcpServer tcp_;
  Gateway gateway_;
  OperatorApi api_;
  std::uint16_t operator_port_ = 0;

  std::mutex stop_mutex_;
  std::condition_variable stop_cv_;
  bool stopping_ = false;
  std::thread ticker_;
};

}  // namespace csi::gateway
