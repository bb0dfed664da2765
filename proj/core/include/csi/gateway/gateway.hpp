#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "csi/gateway/session_host.hpp"

namespace csi::gateway {

/// Transport-facing side of the gateway: everything a connection can do.
class LineHandler {
 public:
  virtual ~LineHandler() = default;
  virtual void on_line(ChannelId channel, std::string_view line) = 0;
  virtual void on_disconnect(ChannelId channel) = 0;
};

/// Routes client envelopes to the session each channel joined and owns the
/// set of live sessions.
class Gateway : public LineHandler {
 public:
  explicit Gateway(Outbox& outbox) : outbox_(outbox) {}

  /// Throws ConfigError when the id is taken or the config is invalid.
  std::shared_ptr<SessionHost> create_session(HostConfig config);
  /// nullptr when unknown.
  std::shared_ptr<SessionHost> find(const std::string& session_id) const;
  std::vector<std::shared_ptr<SessionHost>> sessions() const;

  void on_line(ChannelId channel, std::string_view line) override;
  void on_disconnect(ChannelId channel) override;

  /// Advances every running session by dt.
  void tick_all(Millis dt);

 private:
  std::shared_ptr<SessionHost> bound(ChannelId channel) const;

  Outbox& outbox_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<SessionHost>> sessions_;
  std::map<ChannelId, std::shared_ptr<SessionHost>> bindings_;
};

}  // namespace csi::gateway
