#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>

#include "csi/gateway/gateway.hpp"

namespace csi::gateway {

/// Newline-delimited envelope transport over plain TCP. All socket work runs
/// on one io thread; send() may be called from any thread.
class TcpServer : public Outbox {
 public:
  static constexpr std::size_t kMaxLineBytes = 64 * 1024;

  /// Binds immediately (port 0 picks a free port). Throws ConfigError on a
  /// bind failure.
  TcpServer(const std::string& host, std::uint16_t port);
  ~TcpServer() override;

  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const { return port_; }

  /// Starts accepting and dispatching lines to `handler`, which must outlive
  /// the server (or stop()).
  void start(LineHandler& handler);
  void stop();

  void send(ChannelId channel, std::string line) override;

 private:
  class Connection;
  friend class Connection;

  void accept();
  void closed(ChannelId channel);

  boost::asio::io_context io_;
  boost::asio::ip::tcp::acceptor acceptor_;
  std::uint16_t port_ = 0;
  LineHandler* handler_ = nullptr;
  std::thread thread_;
  std::atomic<bool> running_{false};
  ChannelId next_channel_ = 1;
  std::map<ChannelId, std::shared_ptr<Connection>> connections_;  // io thread only
};

}  // namespace csi::gateway
