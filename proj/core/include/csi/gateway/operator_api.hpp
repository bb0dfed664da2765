#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "csi/gateway/gateway.hpp"

namespace httplib {
class Server;
}

namespace csi::gateway {

/// What the operator API fills in for sessions it creates.
struct SessionDefaults {
  DistillerBinding binding = DistillerBinding::mock();
  std::optional<std::filesystem::path> storage_dir;
};

/// Operator HTTP endpoints:
///   POST /sessions               create (body: session_id, mode, expected_participants, config)
///   GET  /sessions               status of every session
///   POST /sessions/{id}/start    start now with whoever joined
///   GET  /sessions/{id}/status   lifecycle, clock, latest sentiment
///   GET  /sessions/{id}/export   transcripts, series, result
class OperatorApi {
 public:
  OperatorApi(Gateway& gateway, SessionDefaults defaults);
  ~OperatorApi();

  OperatorApi(const OperatorApi&) = delete;
  OperatorApi& operator=(const OperatorApi&) = delete;

  /// Binds (port 0 picks one) and serves on a background thread. Returns the
  /// bound port; throws ConfigError when binding fails.
  std::uint16_t start(const std::string& host, std::uint16_t port);
  void stop();

 private:
  void routes();

  Gateway& gateway_;
  SessionDefaults defaults_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace csi::gateway
