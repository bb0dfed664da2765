#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csi/config.hpp"
#include "csi/relay.hpp"
#include "csi/sentiment.hpp"
#include "csi/session.hpp"
#include "csi/survey.hpp"

namespace csi::gateway {

using ChannelId = std::uint64_t;

/// Where outbound envelope lines go. Implementations must deliver the lines
/// of one channel in the order send() was called for it.
class Outbox {
 public:
  virtual ~Outbox() = default;
  virtual void send(ChannelId channel, std::string line) = 0;
};

enum class Mode { csi, survey };

struct HostConfig {
  std::string session_id;
  SwarmConfig swarm;
  /// Start automatically once this many participants joined (0: operator only).
  std::size_t expected_participants = 0;
  Mode mode = Mode::csi;
  DistillerBinding binding = DistillerBinding::mock();
  /// Closed sessions are persisted under <storage_dir>/<session_id>.
  std::optional<std::filesystem::path> storage_dir;
};

/// Throws ConfigError for an invalid host config.
HostConfig host_config_from_json(const nlohmann::json& j);

/// One live session: its participants' channels, the room engine, the
/// observer agents and the sentiment tracker.
///
/// Every post and the fan-out that follows it happen under one lock, so each
/// receiver sees a room's messages in seq order. Participants only ever get
/// their own room's traffic, timers and lifecycle envelopes; sentiment stays
/// on the operator side (status / export).
class SessionHost {
 public:
  enum class State { waiting, running, finished };

  SessionHost(HostConfig config, Outbox& outbox);

  const std::string& id() const { return config_.session_id; }
  const HostConfig& config() const { return config_; }
  State state() const;

  /// Returns false (after sending an error envelope) when the join is refused.
  bool join(ChannelId channel, const std::string& display_name);
  void chat(ChannelId channel, std::string text);
  void survey_response(ChannelId channel, std::uint32_t option_id);
  void disconnect(ChannelId channel);

  /// Partitions the joined participants and opens the session. Throws
  /// ContractViolation when nobody joined or the session already started.
  void start();

  /// Advances the session clock: runs relay rounds, sentiment snapshots and,
  /// at the end, closes, persists and notifies everyone.
  void tick(Millis dt);

  nlohmann::json status() const;
  /// Transcripts, sentiment series, result and survey responses.
  nlohmann::json export_json() const;

 private:
  void start_locked();
  void send_locked(ChannelId channel, std::string line);
  void broadcast_locked(const std::string& line);
  void fan_out_locked(const Message& m);
  void handle_event(const DueEvent& e);
  void finish();

  HostConfig config_;
  Outbox& outbox_;

  mutable std::mutex mutex_;
  State state_ = State::waiting;
  std::vector<std::string> names_;  // join order
  std::map<std::string, std::optional<ChannelId>> channel_of_;
  std::map<ChannelId, std::string> name_of_;
  std::unique_ptr<Session> session_;
  std::unique_ptr<SentimentTracker> tracker_;
  SurveyResult survey_;
  std::optional<DeliberationResult> result_;

  std::mutex tick_mutex_;  // one clock driver at a time; owns relay_
  std::unique_ptr<ObserverRelay> relay_;
};

std::string_view to_string(SessionHost::State state);

}  // namespace csi::gateway
