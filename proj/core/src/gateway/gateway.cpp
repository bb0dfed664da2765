#include "csi/gateway/gateway.hpp"

#include <spdlog/spdlog.h>

#include "csi/errors.hpp"
#include "csi/gateway/envelope.hpp"

namespace csi::gateway {

std::shared_ptr<SessionHost> Gateway::create_session(HostConfig config) {
  std::lock_guard lock(mutex_);
  if (sessions_.count(config.session_id)) throw ConfigError("session already exists: " + config.session_id);
  auto id = config.session_id;
  auto host = std::make_shared<SessionHost>(std::move(config), outbox_);
  sessions_.emplace(std::move(id), host);
  spdlog::info("session {} created", host->id());
  return host;
}

std::shared_ptr<SessionHost> Gateway::find(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<SessionHost>> Gateway::sessions() const {
  std::lock_guard lock(mutex_);
  std::vector<std::shared_ptr<SessionHost>> out;
  for (const auto& [id, host] : sessions_) out.push_back(host);
  return out;
}

std::shared_ptr<SessionHost> Gateway::bound(ChannelId channel) const {
  std::lock_guard lock(mutex_);
  auto it = bindings_.find(channel);
  return it == bindings_.end() ? nullptr : it->second;
}

void Gateway::on_line(ChannelId channel, std::string_view line) {
  ClientEnvelope envelope;
  try {
    envelope = parse_client_envelope(line);
  } catch (const EnvelopeError& e) {
    outbox_.send(channel, error_envelope(e.code(), e.what()));
    return;
  }

  if (const auto* join = std::get_if<JoinRequest>(&envelope)) {
    if (bound(channel)) {
      outbox_.send(channel, error_envelope("already_joined", "this connection already joined a session"));
      return;
    }
    auto host = find(join->session_id);
    if (!host) {
      outbox_.send(channel, error_envelope("unknown_session", "no session " + join->session_id));
      return;
    }
    {
      // Bind first so a disconnect racing the join still reaches the host.
      std::lock_guard lock(mutex_);
      bindings_[channel] = host;
    }
    if (!host->join(channel, join->display_name)) {
      std::lock_guard lock(mutex_);
      bindings_.erase(channel);
    }
    return;
  }

  auto host = bound(channel);
  if (!host) {
    outbox_.send(channel, error_envelope("not_joined", "join a session first"));
    return;
  }
  if (auto* chat = std::get_if<ChatRequest>(&envelope))
    host->chat(channel, std::move(chat->text));
  else if (const auto* response = std::get_if<SurveyResponse>(&envelope))
    host->survey_response(channel, response->option_id);
}

void Gateway::on_disconnect(ChannelId channel) {
  std::shared_ptr<SessionHost> host;
  {
    std::lock_guard lock(mutex_);
    auto it = bindings_.find(channel);
    if (it == bindings_.end()) return;
    host = std::move(it->second);
    bindings_.erase(it);
  }
  host->disconnect(channel);
}

void Gateway::tick_all(Millis dt) {
  for (const auto& host : sessions()) {
    try {
      host->tick(dt);
    } catch (const std::exception& e) {
      spdlog::error("session {}: tick failed: {}", host->id(), e.what());
    }
  }
}

}  // namespace csi::gateway
